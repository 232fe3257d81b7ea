use proptest::prelude::*;
use sqg_core::constants::{admissible_c0, chain_check, derive, LedgerOptions};
use sqg_core::degiorgi::{
    dyadic_truncation, dyadic_truncation_closed, k_plus, recursion_threshold, weighted_measure, BoxRegion,
    RecursionSpec,
};
use sqg_core::extension::{multiplier_complement, multiplier_profile};
use sqg_core::init::InitialCondition;
use sqg_core::spectral::{frac_laplacian, l2_norm, riesz_velocity, to_real, to_spectral};
use sqg_core::{GridSpec, RealField};

fn shift(f: &RealField, s: usize) -> RealField {
    let g = *f.grid();
    let n = g.n();
    let v = f.samples();
    RealField::new(g, (0..g.len()).map(|i| v[(i / n) * n + (i % n + s) % n]).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplier_is_a_decreasing_profile(alpha in 0.2f64..1.8, w in 1e-4f64..30.0, dw in 1e-3f64..1.0) {
        let q = multiplier_profile(w, alpha).unwrap();
        let q2 = multiplier_profile(w + dw, alpha).unwrap();
        prop_assert!(q > 0.0 && q < 1.0);
        prop_assert!(q2 <= q);
        let c = multiplier_complement(w, alpha).unwrap();
        prop_assert!((q + c - 1.0).abs() < 1e-10);
    }

    #[test]
    fn riesz_velocity_is_an_isometry(seed in 0u64..1000, kmax in 2.0f64..7.0) {
        let g = GridSpec::torus2(32, 0.8).unwrap();
        let ic = InitialCondition::RandomHk { k_min: 1.0, k_max: kmax, slope: 0.5, amplitude: 1.0 };
        let theta = ic.realize(g, seed).unwrap();
        let (u1, u2) = riesz_velocity(&to_spectral(&theta)).unwrap();
        let e = l2_norm(&to_real(&u1)).powi(2) + l2_norm(&to_real(&u2)).powi(2);
        prop_assert!((e.sqrt() - l2_norm(&theta)).abs() < 1e-12 * l2_norm(&theta));
    }

    #[test]
    fn fractional_laplacian_commutes_with_shifts(seed in 0u64..1000, s in 1usize..31, alpha in 0.2f64..2.0) {
        let g = GridSpec::torus2(32, alpha).unwrap();
        let ic = InitialCondition::RandomHk { k_min: 1.0, k_max: 10.0, slope: 0.0, amplitude: 1.0 };
        let theta = ic.realize(g, seed).unwrap();
        let a = shift(&to_real(&frac_laplacian(&to_spectral(&theta), alpha).unwrap()), s);
        let b = to_real(&frac_laplacian(&to_spectral(&shift(&theta, s)), alpha).unwrap());
        for (x, y) in a.samples().iter().zip(b.samples()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn weighted_measure_is_additive(cut in -1.0f64..1.0, zc in 0.0f64..2.0, eps in 0.0f64..0.95) {
        let region = BoxRegion { x: vec![(-1.0, 1.0)], z: (0.0, 2.0), t: (0.0, 1.0) };
        let all = weighted_measure(&region, eps, 12, |_, _, _| true).unwrap();
        let a = weighted_measure(&region, eps, 12, |x, z, _| x[0] < cut || z < zc).unwrap();
        let b = weighted_measure(&region, eps, 12, |x, z, _| !(x[0] < cut || z < zc)).unwrap();
        prop_assert!((a + b - all).abs() < 1e-12 * all);
        prop_assert!(a >= 0.0 && b >= 0.0);
    }

    #[test]
    fn k_plus_decreases_in_s(s in 1e-4f64..1.0, f in 1.01f64..10.0, q4 in 1.0f64..1e4) {
        prop_assert!(k_plus(s, q4).unwrap() >= k_plus((s * f).min(1.0), q4).unwrap());
    }

    #[test]
    fn dyadic_ladder_has_closed_form(v in -2.0f64..1.0, k in 0u32..30) {
        let a = dyadic_truncation(v, k);
        let b = dyadic_truncation_closed(v, k);
        prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
    }

    #[test]
    fn recursion_threshold_is_monotone_in_c(c in 1.0f64..8.0, dc in 0.1f64..4.0) {
        let beta = 4.0 / 3.0;
        let lo = recursion_threshold(&RecursionSpec::new(c, beta, [1.0; 3], 5000).unwrap()).unwrap();
        let hi = recursion_threshold(&RecursionSpec::new(c + dc, beta, [1.0; 3], 5000).unwrap()).unwrap();
        prop_assert!(hi.1 <= lo.1 * (1.0 + 1e-6));
    }

    #[test]
    fn chain_slack_is_continuous_in_c0(alpha in 0.55f64..0.95, t in 0.05f64..0.95) {
        let w = admissible_c0(alpha, None).unwrap();
        let c0 = w.lower + t * (w.upper - w.lower);
        let d = 1e-7 * (w.upper - w.lower);
        let a = chain_check(&derive(alpha, c0, &LedgerOptions::default()).unwrap());
        let b = chain_check(&derive(alpha, c0 + d, &LedgerOptions::default()).unwrap());
        for (x, y) in a.verdicts.iter().zip(&b.verdicts) {
            prop_assert!((x.slack - y.slack).abs() < 1e-4 * (1.0 + x.lhs.abs() + x.rhs.abs()));
        }
    }

    #[test]
    fn window_lower_bound_increases(alpha in 0.3f64..0.97, da in 1e-3f64..0.02) {
        let a = admissible_c0(alpha, None).unwrap();
        let b = admissible_c0(alpha + da, None).unwrap();
        prop_assert!(b.lower > a.lower);
    }
}
