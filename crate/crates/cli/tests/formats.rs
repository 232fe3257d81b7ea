use proptest::prelude::*;
use sqg_cli::checkpoint::Checkpoint;
use sqg_cli::series::fmt_f64;

proptest! {
    #[test]
    fn checkpoint_round_trip_is_bit_exact(
        sizes in prop::collection::vec(1u32..5, 1..4),
        alpha in 0.01f64..2.0,
        t in 0.0f64..1e3,
        seed in any::<u64>(),
    ) {
        let count: usize = sizes.iter().map(|&s| s as usize).product();
        let mut x = seed | 1;
        let samples: Vec<f64> = (0..count)
            .map(|_| {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                let v = f64::from_bits(x);
                if v.is_finite() { v } else { 0.5 }
            })
            .collect();
        let c = Checkpoint { sizes, alpha, t, samples };
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let back = Checkpoint::parse(&buf).unwrap();
        prop_assert_eq!(back.t.to_bits(), c.t.to_bits());
        prop_assert_eq!(back.alpha.to_bits(), c.alpha.to_bits());
        prop_assert!(back.samples.iter().zip(&c.samples).all(|(a, b)| a.to_bits() == b.to_bits()));
        for cut in [0, 5, buf.len() / 2, buf.len() - 1] {
            prop_assert!(Checkpoint::parse(&buf[..cut]).is_err());
        }
    }

    #[test]
    fn seventeen_digits_round_trip(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        let back: f64 = fmt_f64(v).parse().unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }
}
