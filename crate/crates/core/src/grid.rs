//! Periodic grids and the two field representations living on them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform periodic grid on the n-torus `[0, L)^n`, together with the
/// dissipation order it is used with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    length: f64,
    alpha: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, length: f64, alpha: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {n} must be a power of two >= 8")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::OutOfRange { name: "length", value: length });
        }
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::OutOfRange { name: "alpha", value: alpha });
        }
        Ok(Self { dim, n, length, alpha })
    }

    /// Two-dimensional grid with period 2π.
    pub fn torus2(n: usize, alpha: f64) -> Result<Self> {
        Self::new(2, n, 2.0 * PI, alpha)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Weight exponent of the extension problem, `1 - alpha`.
    pub fn epsilon(&self) -> f64 {
        1.0 - self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.dim, self.n, self.length, alpha)
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.dim, n, self.length, self.alpha)
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.dim, self.n, length, self.alpha)
    }

    /// Total number of nodes, `N^n`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.spacing(), self.dim as f64)
    }

    /// Factor turning integer wavenumbers into angular ones, `2π / L`.
    pub fn wave_scale(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed integer wavenumber of FFT index `j` in `[-N/2, N/2)`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Per-axis indices of a row-major flat index (last axis fastest).
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for axis in (0..self.dim).rev() {
            out[axis] = flat % self.n;
            flat /= self.n;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Integer wavevector of the mode stored at `flat`.
    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        let mut idx = [0usize; 3];
        self.unravel(flat, &mut idx[..self.dim]);
        let mut k = [0i64; 3];
        for axis in 0..self.dim {
            k[axis] = self.wavenumber(idx[axis]);
        }
        k
    }

    /// Squared integer norm `|k|^2` of the mode stored at `flat`.
    pub fn k_squared(&self, flat: usize) -> i64 {
        self.wavevector(flat)[..self.dim].iter().map(|k| k * k).sum()
    }

    /// Angular wavenumber magnitude `|2πk/L|` of the mode stored at `flat`.
    pub fn k_magnitude(&self, flat: usize) -> f64 {
        self.wave_scale() * libm::sqrt(self.k_squared(flat) as f64)
    }

    /// True when any component sits on the Nyquist index `-N/2`.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = (self.n / 2) as i64;
        self.wavevector(flat)[..self.dim].iter().any(|&k| k == -half)
    }

    /// Coordinate of node index `j` along one axis, in `[0, L)`.
    pub fn coordinate(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    /// Periodic representative of `x - center` in `[-L/2, L/2)`.
    pub fn periodic_offset(&self, x: f64, center: f64) -> f64 {
        let l = self.length;
        let mut d = (x - center) % l;
        if d < -0.5 * l {
            d += l;
        } else if d >= 0.5 * l {
            d -= l;
        }
        d
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.dim != other.dim || self.n != other.n || self.length != other.length {
            return Err(Error::GridMismatch(format!(
                "{}^{} on L = {} vs {}^{} on L = {}",
                self.n, self.dim, self.length, other.n, other.dim, other.length
            )));
        }
        Ok(())
    }
}

/// Real samples on the grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    samples: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::OutOfRange { name: "sample", value: *bad });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, samples: vec![0.0; grid.len()] }
    }

    /// Samples `f(x)` at every node; `x` has `grid.dim()` coordinates in `[0, L)`.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let mut idx = [0usize; 3];
        let mut x = [0.0f64; 3];
        let samples = (0..grid.len())
            .map(|flat| {
                grid.unravel(flat, &mut idx[..grid.dim()]);
                for axis in 0..grid.dim() {
                    x[axis] = grid.coordinate(idx[axis]);
                }
                f(&x[..grid.dim()])
            })
            .collect();
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Applies `f` pointwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|&v| f(v)).collect() }
    }
}

/// Fourier amplitudes `c_k` with `f(x) = Σ c_k exp(i 2π k·x / L)`, stored in
/// FFT order (index `j` holds wavenumber `j` for `j < N/2`, else `j - N`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for a grid of {} nodes",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of the integer wavevector `k` (components wrap modulo N).
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs[self.flat_of(k)]
    }

    pub fn set_coeff(&mut self, k: &[i64], value: Complex64) {
        let flat = self.flat_of(k);
        self.coeffs[flat] = value;
    }

    fn flat_of(&self, k: &[i64]) -> usize {
        let n = self.grid.n() as i64;
        k.iter().fold(0usize, |acc, &kj| acc * self.grid.n() + kj.rem_euclid(n) as usize)
    }

    /// Largest deviation from `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let n = g.n();
        let mut idx = [0usize; 3];
        let mut neg = [0usize; 3];
        let mut worst = 0.0f64;
        for flat in 0..g.len() {
            g.unravel(flat, &mut idx[..g.dim()]);
            for axis in 0..g.dim() {
                neg[axis] = (n - idx[axis]) % n;
            }
            let partner = g.ravel(&neg[..g.dim()]);
            worst = worst.max((self.coeffs[flat] - self.coeffs[partner].conj()).norm());
        }
        worst
    }

    /// Applies a real-valued symbol `m(flat)` to every coefficient.
    pub fn scaled_by(&self, mut symbol: impl FnMut(usize) -> f64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(flat, c)| c * symbol(flat)).collect();
        Self { grid: self.grid, coeffs }
    }

    /// Mean of the represented field.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }
}
