//! Fourier-side operators on the periodic grid: the transform pair,
//! fractional powers of the Laplacian, the Riesz velocity, dealiasing and
//! the norms used by every diagnostic.
//!
//! Conventions (fixed once for the whole crate):
//!
//! * `(Λ^β f)^(k) = |2πk/L|^β f^(k)`, so `Λ^2 = -Δ` exactly and on the
//!   2π-torus the symbol is the integer `|k|^β`.
//! * `R_j` has symbol `-i k_j / |k|`; the velocity `u = R^⊥θ = (-R_2 θ, R_1 θ)`
//!   therefore has symbol `-i k^⊥ / |k|` with `k^⊥ = (-k_2, k_1)`.
//! * Odd symbols vanish on Nyquist modes, which keeps outputs real.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{Direction, FftNd};
use crate::grid::{GridSpec, RealField, SpectralField};

/// Reusable transform pair for one grid.
#[derive(Debug, Clone)]
pub struct Transform {
    grid: GridSpec,
    plan: FftNd,
}

impl Transform {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid, plan: FftNd::new(grid.dim(), grid.n()) }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn forward(&self, f: &RealField) -> Result<SpectralField> {
        self.grid.check_same(f.grid())?;
        Ok(self.forward_samples(f.samples()))
    }

    pub fn inverse(&self, spec: &SpectralField) -> Result<RealField> {
        self.grid.check_same(spec.grid())?;
        let samples = self.inverse_samples(spec.coeffs());
        RealField::new(self.grid, samples)
    }

    pub(crate) fn forward_samples(&self, samples: &[f64]) -> SpectralField {
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.plan.process(&mut buf, Direction::Forward);
        let scale = 1.0 / self.grid.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        SpectralField::new(self.grid, buf).expect("length matches grid")
    }

    /// Real part of the synthesized field; imaginary parts of non-Hermitian
    /// input are discarded.
    pub(crate) fn inverse_samples(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.plan.process(&mut buf, Direction::Inverse);
        buf.into_iter().map(|c| c.re).collect()
    }
}

/// Forward transform with a fresh plan.
pub fn to_spectral(f: &RealField) -> SpectralField {
    Transform::new(*f.grid()).forward_samples(f.samples())
}

/// Inverse transform with a fresh plan.
pub fn to_real(spec: &SpectralField) -> RealField {
    let t = Transform::new(*spec.grid());
    RealField::new(*spec.grid(), t.inverse_samples(spec.coeffs())).expect("finite synthesis")
}

/// Symbol `|2πk/L|^β` of the mode at `flat`.
pub fn frac_symbol(grid: &GridSpec, flat: usize, beta: f64) -> f64 {
    let k2 = grid.k_squared(flat);
    if k2 == 0 {
        0.0
    } else {
        (grid.wave_scale() * (k2 as f64).sqrt()).powf(beta)
    }
}

/// `Λ^β F` for `β ∈ (0, 2]`.
pub fn frac_laplacian(spec: &SpectralField, beta: f64) -> Result<SpectralField> {
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::OutOfRange { name: "beta", value: beta });
    }
    let grid = *spec.grid();
    Ok(spec.scaled_by(|flat| frac_symbol(&grid, flat, beta)))
}

/// Velocity `u = R^⊥θ` of a two-dimensional scalar.
pub fn riesz_velocity(theta: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    let grid = *theta.grid();
    if grid.dim() != 2 {
        return Err(Error::Dimension { expected: 2, found: grid.dim() });
    }
    let mut u1 = SpectralField::zeros(grid);
    let mut u2 = SpectralField::zeros(grid);
    for (flat, c) in theta.coeffs().iter().enumerate() {
        if flat == 0 || grid.is_nyquist(flat) {
            continue;
        }
        let k = grid.wavevector(flat);
        let norm = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
        // u1 = -R2 θ, u2 = R1 θ
        u1.coeffs_mut()[flat] = Complex64::new(0.0, k[1] as f64 / norm) * c;
        u2.coeffs_mut()[flat] = Complex64::new(0.0, -(k[0] as f64) / norm) * c;
    }
    Ok((u1, u2))
}

/// Spectral gradient `(∂_1 f, …, ∂_n f)`.
pub fn gradient(spec: &SpectralField) -> Vec<SpectralField> {
    let grid = *spec.grid();
    let scale = grid.wave_scale();
    (0..grid.dim())
        .map(|axis| {
            let mut out = SpectralField::zeros(grid);
            for (flat, c) in spec.coeffs().iter().enumerate() {
                if grid.is_nyquist(flat) {
                    continue;
                }
                let k = grid.wavevector(flat)[axis] as f64 * scale;
                out.coeffs_mut()[flat] = Complex64::new(0.0, k) * c;
            }
            out
        })
        .collect()
}

/// True when the mode at `flat` survives the 2/3 rule.
pub fn dealias_keeps(grid: &GridSpec, flat: usize) -> bool {
    let n = grid.n() as i64;
    grid.wavevector(flat)[..grid.dim()].iter().all(|&k| 3 * k.abs() <= n)
}

/// 2/3-rule truncation: zeroes every mode with some `|k_j| > N/3`.
pub fn dealias(spec: &SpectralField) -> SpectralField {
    let grid = *spec.grid();
    spec.scaled_by(|flat| if dealias_keeps(&grid, flat) { 1.0 } else { 0.0 })
}

/// Norms reported throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    /// Quadrature-weighted `L²` norm.
    pub l2: f64,
    /// Largest absolute sample.
    pub sup: f64,
    /// `‖Λ^{α/2} f‖₂`.
    pub h_alpha_half: f64,
}

/// Discrete `L²` norm `(ΔV Σ f²)^{1/2}`.
pub fn l2_norm(f: &RealField) -> f64 {
    (f.grid().cell_volume() * f.samples().iter().map(|v| v * v).sum::<f64>()).sqrt()
}

pub fn sup_norm(f: &RealField) -> f64 {
    f.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `‖Λ^{β} F‖₂²` by Parseval: `L^n Σ |k|^{2β} |c_k|²`.
pub fn seminorm_sq(spec: &SpectralField, beta: f64) -> f64 {
    let grid = spec.grid();
    let vol = grid.length().powi(grid.dim() as i32);
    vol * spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(flat, c)| frac_symbol(grid, flat, 2.0 * beta) * c.norm_sqr())
        .sum::<f64>()
}

/// `l2`, `sup` and the `H^{α/2}` seminorm (via the multiplier route).
pub fn norms(f: &RealField) -> Norms {
    let t = Transform::new(*f.grid());
    norms_with(&t, f)
}

pub(crate) fn norms_with(t: &Transform, f: &RealField) -> Norms {
    let spec = t.forward_samples(f.samples());
    let h = if f.grid().alpha() > 0.0 {
        let lifted = spec.scaled_by(|flat| frac_symbol(f.grid(), flat, 0.5 * f.grid().alpha()));
        let samples = t.inverse_samples(lifted.coeffs());
        let g = RealField::new(*f.grid(), samples).expect("finite");
        l2_norm(&g)
    } else {
        0.0
    };
    Norms { l2: l2_norm(f), sup: sup_norm(f), h_alpha_half: h }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: GridSpec, seed: u64) -> RealField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = (0..grid.len()).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        RealField::new(grid, s).unwrap()
    }

    #[test]
    fn constant_field_is_a_single_mode() {
        let g = GridSpec::torus2(16, 1.0).unwrap();
        let f = RealField::new(g, vec![2.5; g.len()]).unwrap();
        let s = to_spectral(&f);
        assert!((s.coeffs()[0] - Complex64::new(2.5, 0.0)).norm() < 1e-14);
        assert!(s.coeffs()[1..].iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn roundtrip_is_identity() {
        let g = GridSpec::torus2(32, 0.7).unwrap();
        let f = random_field(g, 3);
        let back = to_real(&to_spectral(&f));
        let err = f.samples().iter().zip(back.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn cosine_has_two_modes() {
        let g = GridSpec::torus2(16, 1.0).unwrap();
        let f = RealField::from_fn(g, |x| (3.0 * x[0]).cos()).unwrap();
        let s = to_spectral(&f);
        let nonzero: Vec<[i64; 3]> = (0..g.len())
            .filter(|&i| s.coeffs()[i].norm() > 1e-12)
            .map(|i| g.wavevector(i))
            .collect();
        assert_eq!(nonzero.len(), 2);
        assert!(nonzero.contains(&[3, 0, 0]) && nonzero.contains(&[-3, 0, 0]));
        assert!((s.coeff(&[3, 0]).re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn parseval_ratio_is_fixed_by_grid() {
        let g = GridSpec::torus2(16, 1.0).unwrap();
        let f = random_field(g, 11);
        let s = to_spectral(&f);
        let energy: f64 = s.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let l2 = l2_norm(&f);
        assert!((l2 * l2 - energy * (2.0 * PI).powi(2)).abs() < 1e-10 * l2 * l2);
    }

    #[test]
    fn frac_laplacian_on_eigenfunction() {
        let g = GridSpec::torus2(16, 1.0).unwrap();
        let f = RealField::from_fn(g, |x| (3.0 * x[0]).cos()).unwrap();
        let lf = to_real(&frac_laplacian(&to_spectral(&f), 1.0).unwrap());
        for (a, b) in lf.samples().iter().zip(f.samples()) {
            assert!((a - 3.0 * b).abs() < 1e-12);
        }
        let c = RealField::new(g, vec![1.0; g.len()]).unwrap();
        let lc = frac_laplacian(&to_spectral(&c), 0.5).unwrap();
        assert!(lc.coeffs().iter().all(|c| c.norm() == 0.0));
        assert!(frac_laplacian(&to_spectral(&c), 0.0).is_err());
        assert!(frac_laplacian(&to_spectral(&c), 2.1).is_err());
    }

    #[test]
    fn riesz_of_sine() {
        let g = GridSpec::torus2(16, 1.0).unwrap();
        let f = RealField::from_fn(g, |x| x[0].sin()).unwrap();
        let (u1, u2) = riesz_velocity(&to_spectral(&f)).unwrap();
        let (u1, u2) = (to_real(&u1), to_real(&u2));
        for i in 0..g.len() {
            let x0 = g.coordinate(i / 16);
            assert!(u1.samples()[i].abs() < 1e-13);
            assert!((u2.samples()[i] + x0.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn riesz_requires_two_dimensions() {
        let g = GridSpec::new(1, 16, 1.0, 1.0).unwrap();
        assert!(matches!(
            riesz_velocity(&SpectralField::zeros(g)),
            Err(Error::Dimension { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn dealias_rule() {
        let g = GridSpec::torus2(16, 1.0).unwrap();
        let mut s = SpectralField::zeros(g);
        s.set_coeff(&[6, 0], Complex64::new(1.0, 0.0));
        s.set_coeff(&[5, 0], Complex64::new(1.0, 0.0));
        let d = dealias(&s);
        assert_eq!(d.coeff(&[6, 0]).norm(), 0.0);
        assert_eq!(d.coeff(&[5, 0]).norm(), 1.0);
        assert_eq!(dealias(&d), d);
    }

    #[test]
    fn norms_examples() {
        let g = GridSpec::torus2(16, 1.0).unwrap();
        let z = norms(&RealField::zeros(g));
        assert_eq!((z.l2, z.sup, z.h_alpha_half), (0.0, 0.0, 0.0));
        let f = RealField::from_fn(g, |x| x[0].cos()).unwrap();
        let n = norms(&f);
        assert!((n.h_alpha_half.powi(2) - n.l2.powi(2)).abs() < 1e-12);
        let r = random_field(g.with_alpha(0.7).unwrap(), 5);
        let n = norms(&r);
        let parseval = seminorm_sq(&to_spectral(&r), 0.35).sqrt();
        assert!((n.h_alpha_half - parseval).abs() < 1e-12 * parseval);
    }
}
