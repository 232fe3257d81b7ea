//! Seeded initial-condition presets.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField, SpectralField};
use crate::spectral::to_real;

/// Initial-condition presets.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Mean-zero random Fourier series on the shell `k_min <= |k| <= k_max`
    /// with `|c_k| ~ |k|^{-slope}` (`slope = 0` is band-limited white noise),
    /// scaled to root-mean-square `amplitude`. Coefficients are drawn per
    /// wavevector, so the same seed gives the same function on every grid
    /// that resolves `k_max`.
    RandomHk { k_min: f64, k_max: f64, slope: f64, amplitude: f64 },
    /// `count` periodized Gaussians of width `width` with random centres and
    /// signs; the mean is removed.
    GaussianVortices { count: usize, width: f64, amplitude: f64 },
    /// `amplitude · cos(2π k x₁ / L)`.
    Shear { k: i64, amplitude: f64 },
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            Self::RandomHk { .. } => "random_hk",
            Self::GaussianVortices { .. } => "gaussian_vortices",
            Self::Shear { .. } => "shear",
        }
    }

    /// Samples the preset on `grid`.
    pub fn realize(&self, grid: GridSpec, seed: u64) -> Result<RealField> {
        match *self {
            Self::RandomHk { k_min, k_max, slope, amplitude } => {
                random_hk(grid, seed, k_min, k_max, slope, amplitude)
            }
            Self::GaussianVortices { count, width, amplitude } => {
                gaussian_vortices(grid, seed, count, width, amplitude)
            }
            Self::Shear { k, amplitude } => {
                if 2 * k.abs() >= grid.n() as i64 {
                    return Err(Error::OutOfRange { name: "shear k", value: k as f64 });
                }
                let scale = grid.wave_scale() * k as f64;
                RealField::from_fn(grid, |x| amplitude * (scale * x[0]).cos())
            }
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn random_hk(grid: GridSpec, seed: u64, k_min: f64, k_max: f64, slope: f64, amplitude: f64) -> Result<RealField> {
    if !(k_max >= k_min && k_min >= 0.0) {
        return Err(Error::OutOfRange { name: "k_max", value: k_max });
    }
    let kmax = k_max.floor() as i64;
    if 2 * kmax >= grid.n() as i64 {
        return Err(Error::OutOfRange { name: "k_max", value: k_max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = SpectralField::zeros(grid);
    let dim = grid.dim();
    let side = (2 * kmax + 1) as usize;
    let count = side.pow(dim as u32);
    let mut k = [0i64; 3];
    let mut energy = 0.0;
    for flat in 0..count {
        let mut rest = flat;
        for axis in (0..dim).rev() {
            k[axis] = (rest % side) as i64 - kmax;
            rest /= side;
        }
        let kk = &k[..dim];
        let re = gaussian(&mut rng);
        let im = gaussian(&mut rng);
        // keep one representative of each ±k pair: first nonzero component positive
        let lead = kk.iter().copied().find(|&c| c != 0);
        let Some(lead) = lead else { continue };
        if lead < 0 {
            continue;
        }
        let mag = (kk.iter().map(|c| c * c).sum::<i64>() as f64).sqrt();
        if mag < k_min || mag > k_max {
            continue;
        }
        let c = Complex64::new(re, im) * mag.powf(-slope);
        let neg: Vec<i64> = kk.iter().map(|c| -c).collect();
        spec.set_coeff(kk, c);
        spec.set_coeff(&neg, c.conj());
        energy += 2.0 * c.norm_sqr();
    }
    if energy > 0.0 {
        let s = amplitude / energy.sqrt();
        spec.coeffs_mut().iter_mut().for_each(|c| *c *= s);
    }
    Ok(to_real(&spec))
}

fn gaussian_vortices(grid: GridSpec, seed: u64, count: usize, width: f64, amplitude: f64) -> Result<RealField> {
    if !(width > 0.0) {
        return Err(Error::OutOfRange { name: "width", value: width });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let l = grid.length();
    let vortices: Vec<([f64; 3], f64)> = (0..count)
        .map(|_| {
            let mut c = [0.0; 3];
            for v in c.iter_mut().take(dim) {
                *v = rng.random::<f64>() * l;
            }
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            (c, sign * amplitude * (0.5 + 0.5 * rng.random::<f64>()))
        })
        .collect();
    let f = RealField::from_fn(grid, |x| {
        vortices
            .iter()
            .map(|(c, a)| {
                let r2: f64 = (0..dim)
                    .map(|axis| {
                        let d = grid.periodic_offset(x[axis], c[axis]);
                        d * d
                    })
                    .sum();
                a * (-0.5 * r2 / (width * width)).exp()
            })
            .sum()
    })?;
    let mean = f.mean();
    Ok(f.map(|v| v - mean))
}
