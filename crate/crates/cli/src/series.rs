//! CSV output of the norm series.

use std::io::Write;

use sqg_core::solver::NormSample;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_norms_csv(w: impl Write, samples: &[NormSample]) -> csv::Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(["t", "l2", "sup", "h_alpha_half"])?;
    for s in samples {
        out.write_record([fmt_f64(s.t), fmt_f64(s.l2), fmt_f64(s.sup), fmt_f64(s.h_alpha_half)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_norms_csv(r: impl std::io::Read) -> csv::Result<Vec<[f64; 4]>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let mut row = [0.0; 4];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|e| csv::Error::from(std::io::Error::other(e)))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_and_round_trip() {
        let s = NormSample { t: 0.1, l2: 1.0 / 3.0, sup: 2.0f64.sqrt(), h_alpha_half: 1e-300, dissipation: 0.0 };
        let mut buf = Vec::new();
        write_norms_csv(&mut buf, &[s]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,l2,sup,h_alpha_half\n"));
        assert!(!text.contains('\r'));
        let rows = read_norms_csv(&buf[..]).unwrap();
        assert_eq!(rows[0][1].to_bits(), s.l2.to_bits());
        assert_eq!(rows[0][2].to_bits(), s.sup.to_bits());
    }
}
