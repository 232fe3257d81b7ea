//! De Giorgi diagnostics on extended fields: `z^ε`-weighted measures over
//! parabolic cylinders, level-set statistics, the weighted isoperimetric
//! inequality, oscillation decay, Hölder quotients and the abstract
//! superlinear recursion.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::extension::{extend, multiplier_profile, ExtensionField};
use crate::grid::{GridSpec, RealField, SpectralField};
use crate::solver::Trajectory;
use crate::spectral::Transform;

/// Exponent `b` in the truncation level `K = 4 S^{-b} ∫∫ z^ε |∇ϑ*₊|²`.
pub const B_EXPONENT: f64 = 0.1;
/// Conclusion exponent of the second lemma, in units of `α`.
pub const LEMMA_EXPONENT: f64 = 0.05;
/// The variant exponent that also appears for the same bound.
pub const LEMMA_EXPONENT_VARIANT: f64 = 0.005;
/// Admissible range `(1/14, 1/6)` of `m` with `LEMMA_EXPONENT = m/2`.
pub const M_RANGE: (f64, f64) = (1.0 / 14.0, 1.0 / 6.0);
/// Cap on `S`.
pub const S_CAP: f64 = 0.01;
/// `ϑ = 2θ`.
pub const LEVEL_SCALE: f64 = 2.0;

/// `Q_r* = B_r(center) × [0, r) × (t_anchor − r^α, t_anchor]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub r: f64,
    pub t_anchor: f64,
    pub alpha: f64,
    pub center: [f64; 3],
}

impl Cylinder {
    /// Centered at the origin with anchor 1.
    pub fn new(r: f64, alpha: f64) -> Result<Self> {
        Self::anchored(r, alpha, 1.0)
    }

    pub fn anchored(r: f64, alpha: f64, t_anchor: f64) -> Result<Self> {
        let c = Self { r, t_anchor, alpha, center: [0.0; 3] };
        c.validate()?;
        Ok(c)
    }

    pub fn with_center(mut self, center: &[f64]) -> Self {
        for (a, v) in center.iter().enumerate().take(3) {
            self.center[a] = *v;
        }
        self
    }

    pub fn with_radius(&self, r: f64) -> Result<Self> {
        let c = Self { r, ..*self };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::OutOfRange { name: "r", value: self.r });
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::OutOfRange { name: "alpha", value: self.alpha });
        }
        if self.r.powf(self.alpha) > self.t_anchor * (1.0 + 1e-12) {
            return Err(Error::OutOfRange { name: "t_anchor", value: self.t_anchor });
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        1.0 - self.alpha
    }

    pub fn duration(&self) -> f64 {
        self.r.powf(self.alpha)
    }

    pub fn t_start(&self) -> f64 {
        self.t_anchor - self.duration()
    }

    /// Weighted measure `(2r)^n · r^{1+ε}/(1+ε) · r^α`.
    pub fn measure(&self, n: usize) -> f64 {
        let eps = self.epsilon();
        (2.0 * self.r).powi(n as i32) * self.r.powf(1.0 + eps) / (1.0 + eps) * self.duration()
    }
}

/// Axis-aligned box in `(x, z, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub x: Vec<(f64, f64)>,
    pub z: (f64, f64),
    pub t: (f64, f64),
}

impl BoxRegion {
    pub fn of_cylinder(cyl: &Cylinder, n: usize) -> Self {
        Self {
            x: (0..n).map(|a| (cyl.center[a] - cyl.r, cyl.center[a] + cyl.r)).collect(),
            z: (0.0, cyl.r),
            t: (cyl.t_start(), cyl.t_anchor),
        }
    }
}

/// `∫_{z₀}^{z₁} z^ε dz`.
pub fn slab(z0: f64, z1: f64, eps: f64) -> f64 {
    if z1 <= z0 {
        return 0.0;
    }
    (z1.powf(1.0 + eps) - z0.powf(1.0 + eps)) / (1.0 + eps)
}

/// Closed-form `z^ε`-measure of a box.
pub fn box_measure(region: &BoxRegion, eps: f64) -> f64 {
    let x: f64 = region.x.iter().map(|(a, b)| (b - a).max(0.0)).product();
    x * slab(region.z.0.max(0.0), region.z.1, eps) * (region.t.1 - region.t.0).max(0.0)
}

/// `|Q₄*|_{z^ε}`.
pub fn q4_measure(n: usize, alpha: f64) -> f64 {
    let eps = 1.0 - alpha;
    8f64.powi(n as i32) * 4f64.powf(1.0 + eps) / (1.0 + eps) * 4f64.powf(alpha)
}

/// `z^ε`-measure of `{indicator}` inside `region`: the box is cut into
/// `cells` slabs per axis, each classified at its midpoint, with the `z`
/// weight of every slab integrated exactly.
pub fn weighted_measure(
    region: &BoxRegion,
    eps: f64,
    cells: usize,
    indicator: impl Fn(&[f64], f64, f64) -> bool,
) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::OutOfRange { name: "epsilon", value: eps });
    }
    if cells == 0 {
        return Err(Error::OutOfRange { name: "cells", value: 0.0 });
    }
    let n = region.x.len();
    let cf = cells as f64;
    let xw: f64 = region.x.iter().map(|(a, b)| (b - a) / cf).product();
    let tw = (region.t.1 - region.t.0) / cf;
    let (z0, z1) = region.z;
    let mut x = vec![0.0; n];
    let mut total = 0.0;
    for xi in 0..cells.pow(n as u32) {
        let mut rest = xi;
        for a in (0..n).rev() {
            let (lo, hi) = region.x[a];
            x[a] = lo + (hi - lo) * ((rest % cells) as f64 + 0.5) / cf;
            rest /= cells;
        }
        for zi in 0..cells {
            let za = z0 + (z1 - z0) * zi as f64 / cf;
            let zb = z0 + (z1 - z0) * (zi + 1) as f64 / cf;
            let zw = slab(za, zb, eps);
            for ti in 0..cells {
                let t = region.t.0 + (ti as f64 + 0.5) * tw;
                if indicator(&x, 0.5 * (za + zb), t) {
                    total += xw * zw * tw;
                }
            }
        }
    }
    Ok(total)
}

/// Snapshots of an extended solution: `θ` and `θ*` on a common grid and
/// height ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedTrajectory {
    grid: GridSpec,
    z_levels: Vec<f64>,
    times: Vec<f64>,
    base: Vec<RealField>,
    fields: Vec<ExtensionField>,
}

impl ExtendedTrajectory {
    /// Pairs of boundary data and extension per time.
    pub fn new(times: Vec<f64>, base: Vec<RealField>, fields: Vec<ExtensionField>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() || times.len() != base.len() {
            return Err(Error::Coverage("times, bases and fields must have equal non-zero length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::OutOfRange { name: "times", value: times[0] });
        }
        let grid = *fields[0].grid();
        let z_levels = fields[0].z_levels().to_vec();
        for (b, f) in base.iter().zip(&fields) {
            if f.grid() != &grid || b.grid() != &grid || f.z_levels() != z_levels.as_slice() {
                return Err(Error::GridMismatch("snapshots differ in grid or ladder".into()));
            }
        }
        Ok(Self { grid, z_levels, times, base, fields })
    }

    /// Extends the snapshots of `traj` with times in `window` (all when
    /// `None`).
    pub fn from_trajectory(traj: &Trajectory, z_levels: &[f64], window: Option<(f64, f64)>) -> Result<Self> {
        let t = Transform::new(*traj.grid());
        let mut times = Vec::new();
        let mut base = Vec::new();
        let mut fields = Vec::new();
        for (time, f) in traj.snapshots() {
            if let Some((a, b)) = window {
                if *time < a || *time > b {
                    continue;
                }
            }
            times.push(*time);
            fields.push(extend(&t.forward(f)?, z_levels)?);
            base.push(f.clone());
        }
        Self::new(times, base, fields)
    }

    /// A single time slice.
    pub fn single(t: f64, base: RealField, field: ExtensionField) -> Result<Self> {
        Self::new(vec![t], vec![base], vec![field])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn z_levels(&self) -> &[f64] {
        &self.z_levels
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn base(&self, i: usize) -> &RealField {
        &self.base[i]
    }

    pub fn field(&self, i: usize) -> &ExtensionField {
        &self.fields[i]
    }
}

/// Length of `[a, b] ∩ [lo, hi]`.
fn overlap(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    (b.min(hi) - a.max(lo)).max(0.0)
}

/// Per-node `x` weights: dual cells of the periodic grid clipped to
/// `[c − r, c + r]` on every axis.
fn x_weights(grid: &GridSpec, cyl: &Cylinder) -> Result<Vec<f64>> {
    let l = grid.length();
    if 2.0 * cyl.r > l * (1.0 + 1e-12) {
        return Err(Error::Coverage(alloc::format!("radius {} exceeds half the period {}", cyl.r, l / 2.0)));
    }
    let h = grid.spacing();
    let n = grid.n();
    let dim = grid.dim();
    let axis: Vec<Vec<f64>> = (0..dim)
        .map(|a| {
            (0..n)
                .map(|j| {
                    let d = grid.periodic_offset(grid.coordinate(j), cyl.center[a]);
                    [-l, 0.0, l].iter().map(|m| overlap(d + m - 0.5 * h, d + m + 0.5 * h, -cyl.r, cyl.r)).sum()
                })
                .collect()
        })
        .collect();
    let mut idx = [0usize; 3];
    Ok((0..grid.len())
        .map(|flat| {
            grid.unravel(flat, &mut idx[..dim]);
            (0..dim).map(|a| axis[a][idx[a]]).product()
        })
        .collect())
}

/// Per-level `z^ε` weights of the dual cells clipped to `[0, r)`.
fn z_weights(z: &[f64], r: f64, eps: f64) -> Result<Vec<f64>> {
    let m = z.len();
    let top = if m == 1 { 2.0 * z[0] } else { z[m - 1] + 0.5 * (z[m - 1] - z[m - 2]) };
    if top < r * (1.0 - 1e-12) {
        return Err(Error::Coverage(alloc::format!("height ladder ends at {top} below r = {r}")));
    }
    Ok((0..m)
        .map(|i| {
            let lo = if i == 0 { 0.0 } else { 0.5 * (z[i - 1] + z[i]) };
            let hi = if i + 1 == m { top } else { 0.5 * (z[i] + z[i + 1]) };
            slab(lo.min(r), hi.min(r), eps)
        })
        .collect())
}

/// Per-snapshot weights of the dual cells clipped to `(t_start, t_anchor]`.
fn t_weights(times: &[f64], cyl: &Cylinder) -> Result<Vec<f64>> {
    let m = times.len();
    let (a, b) = (cyl.t_start(), cyl.t_anchor);
    let tol = 1e-9 * (b - a).abs().max(1e-12);
    if m < 2 {
        return Err(Error::Coverage("need at least two snapshots".into()));
    }
    let lo_edge = times[0] - 0.5 * (times[1] - times[0]);
    let hi_edge = times[m - 1] + 0.5 * (times[m - 1] - times[m - 2]);
    if lo_edge > a + tol || hi_edge < b - tol || times[0] > a + tol && times[0] > a + 0.5 * (times[1] - times[0]) {
        return Err(Error::Coverage(alloc::format!("snapshots [{}, {}] do not cover ({a}, {b}]", times[0], times[m - 1])));
    }
    Ok((0..m)
        .map(|i| {
            let lo = if i == 0 { lo_edge } else { 0.5 * (times[i - 1] + times[i]) };
            let hi = if i + 1 == m { hi_edge } else { 0.5 * (times[i] + times[i + 1]) };
            overlap(lo, hi, a, b)
        })
        .collect())
}

/// Weighted gradient energy density `Σ_x w_x |∇v|²` of one level, with
/// periodic central differences in `x` and one-sided or centred
/// differences in `z`.
fn level_energy(e: &[&[f64]], z: &[f64], level: usize, grid: &GridSpec, xw: &[f64]) -> f64 {
    let n = grid.n();
    let dim = grid.dim();
    let h = grid.spacing();
    let m = z.len();
    let cur = e[level];
    let mut idx = [0usize; 3];
    let mut total = 0.0;
    for flat in 0..grid.len() {
        if xw[flat] == 0.0 {
            continue;
        }
        grid.unravel(flat, &mut idx[..dim]);
        let mut g2 = 0.0;
        for a in 0..dim {
            let mut up = idx;
            let mut dn = idx;
            up[a] = (idx[a] + 1) % n;
            dn[a] = (idx[a] + n - 1) % n;
            let d = (cur[grid.ravel(&up[..dim])] - cur[grid.ravel(&dn[..dim])]) / (2.0 * h);
            g2 += d * d;
        }
        let dz = if m == 1 {
            0.0
        } else if level == 0 {
            (e[1][flat] - e[0][flat]) / (z[1] - z[0])
        } else if level + 1 == m {
            (e[m - 1][flat] - e[m - 2][flat]) / (z[m - 1] - z[m - 2])
        } else {
            // three-point derivative on a non-uniform ladder
            let (h0, h1) = (z[level] - z[level - 1], z[level + 1] - z[level]);
            let (a0, a1, a2) = (e[level - 1][flat], cur[flat], e[level + 1][flat]);
            (-h1 / (h0 * (h0 + h1))) * a0 + ((h1 - h0) / (h0 * h1)) * a1 + (h0 / (h1 * (h0 + h1))) * a2
        };
        total += xw[flat] * (g2 + dz * dz);
    }
    total
}

/// `z^ε`-weighted measures of `𝒜 = {ϑ* ≤ 0}`, `ℬ = {ϑ* ≥ 1}` and
/// `𝒞 = {0 < ϑ* < 1}` (with `ϑ* = 2θ*`) over a cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetStats {
    pub meas_a: f64,
    pub meas_b: f64,
    pub meas_c: f64,
    /// `min(meas_c, 1/100)`.
    pub s: f64,
    /// `∫∫∫ z^ε |∇ϑ*₊|²` over the cylinder.
    pub dirichlet: f64,
    /// Weighted measure of the cylinder covered by the cells.
    pub total: f64,
}

fn classify(v: f64) -> usize {
    let w = LEVEL_SCALE * v;
    if w <= 0.0 {
        0
    } else if w >= 1.0 {
        1
    } else {
        2
    }
}

pub fn level_set_stats(traj: &ExtendedTrajectory, cyl: &Cylinder) -> Result<LevelSetStats> {
    check_alpha(traj.grid(), cyl)?;
    let grid = *traj.grid();
    let eps = cyl.epsilon();
    let xw = x_weights(&grid, cyl)?;
    let zw = z_weights(traj.z_levels(), cyl.r, eps)?;
    let tw = t_weights(traj.times(), cyl)?;
    let mut meas = [0.0; 3];
    let mut dirichlet = 0.0;
    for (ti, wt) in tw.iter().enumerate() {
        if *wt == 0.0 {
            continue;
        }
        let f = traj.field(ti);
        let truncated: Vec<Vec<f64>> =
            (0..zw.len()).map(|l| f.level(l).iter().map(|v| (LEVEL_SCALE * v).max(0.0)).collect()).collect();
        let levels: Vec<&[f64]> = truncated.iter().map(|v| v.as_slice()).collect();
        for (li, wz) in zw.iter().enumerate() {
            if *wz == 0.0 {
                continue;
            }
            for (node, wx) in xw.iter().enumerate() {
                if *wx > 0.0 {
                    meas[classify(f.value(li, node))] += wt * wz * wx;
                }
            }
            dirichlet += wt * wz * level_energy(&levels, traj.z_levels(), li, &grid, &xw);
        }
    }
    Ok(LevelSetStats {
        meas_a: meas[0],
        meas_b: meas[1],
        meas_c: meas[2],
        s: meas[2].min(S_CAP),
        dirichlet,
        total: meas.iter().sum(),
    })
}

fn check_alpha(grid: &GridSpec, cyl: &Cylinder) -> Result<()> {
    if (grid.alpha() - cyl.alpha).abs() > 1e-12 {
        return Err(Error::GridMismatch(alloc::format!("grid alpha {} vs cylinder alpha {}", grid.alpha(), cyl.alpha)));
    }
    Ok(())
}

/// Both sides of `C**|𝒞|_{z^ε} ≥ |𝒜|²_{z^ε} |ℬ|²_{z^ε}` on `B₄*` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoperimetricCheck {
    pub meas_a: f64,
    pub meas_b: f64,
    pub meas_c: f64,
    /// `∫_{B₄*} z^ε |∇ϑ*₊|²`.
    pub energy: f64,
    /// `max(energy, energy_cap)`.
    pub c_star: f64,
    /// `C** |𝒞|`.
    pub lhs: f64,
    /// `|𝒜|² |ℬ|²`.
    pub rhs: f64,
    pub satisfied: bool,
    /// Smallest constant making the inequality hold, `rhs / |𝒞|`.
    pub required_constant: f64,
}

pub fn isoperimetric_check(e: &ExtensionField, energy_cap: f64) -> Result<IsoperimetricCheck> {
    let grid = *e.grid();
    let cyl = Cylinder::anchored(4.0, grid.alpha(), 4f64.powf(grid.alpha()))?;
    let xw = x_weights(&grid, &cyl)?;
    let zw = z_weights(e.z_levels(), 4.0, cyl.epsilon())?;
    let truncated: Vec<Vec<f64>> =
        (0..zw.len()).map(|l| e.level(l).iter().map(|v| (LEVEL_SCALE * v).max(0.0)).collect()).collect();
    let levels: Vec<&[f64]> = truncated.iter().map(|v| v.as_slice()).collect();
    let mut meas = [0.0; 3];
    let mut energy = 0.0;
    for (li, wz) in zw.iter().enumerate() {
        if *wz == 0.0 {
            continue;
        }
        for (node, wx) in xw.iter().enumerate() {
            if *wx > 0.0 {
                meas[classify(e.value(li, node))] += wz * wx;
            }
        }
        energy += wz * level_energy(&levels, e.z_levels(), li, &grid, &xw);
    }
    let c_star = energy.max(energy_cap);
    let lhs = c_star * meas[2];
    let rhs = meas[0] * meas[0] * meas[1] * meas[1];
    let required_constant = if rhs == 0.0 {
        0.0
    } else if meas[2] == 0.0 {
        f64::INFINITY
    } else {
        rhs / meas[2]
    };
    Ok(IsoperimetricCheck {
        meas_a: meas[0],
        meas_b: meas[1],
        meas_c: meas[2],
        energy,
        c_star,
        lhs,
        rhs,
        satisfied: lhs >= rhs,
        required_constant,
    })
}

/// Pointwise access to `θ*(x, z, t)`.
pub trait FieldProbe {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], z: f64, t: f64) -> f64;
}

/// Exact evaluation of the linear flow `∂_t θ + Λ^α θ = 0` extended in
/// `z`: `Σ θ̂₀(k) e^{-|κ|^α t} Q(|κ| z) e^{iκ·x}`.
#[derive(Debug)]
pub struct LinearEvolution {
    dim: usize,
    alpha: f64,
    /// `(κ, |κ|², coefficient)` for the half of the spectrum with the
    /// conjugate partners folded in.
    modes: Vec<([f64; 3], u64, Complex64)>,
    constant: f64,
    q_cache: RefCell<BTreeMap<(u64, u64), f64>>,
}

impl LinearEvolution {
    pub fn new(theta0: &SpectralField) -> Self {
        let grid = *theta0.grid();
        let dim = grid.dim();
        let s = grid.wave_scale();
        let mut modes = Vec::new();
        for (flat, c) in theta0.coeffs().iter().enumerate() {
            if flat == 0 || c.norm() == 0.0 || grid.is_nyquist(flat) {
                continue;
            }
            let k = grid.wavevector(flat);
            let lead = k[..dim].iter().copied().find(|&v| v != 0).unwrap_or(0);
            if lead < 0 {
                continue;
            }
            let mut kv = [0.0; 3];
            for a in 0..dim {
                kv[a] = s * k[a] as f64;
            }
            let mag2 = grid.k_magnitude(flat).powi(2);
            modes.push((kv, mag2.to_bits(), 2.0 * c));
        }
        Self { dim, alpha: grid.alpha(), modes, constant: theta0.coeffs()[0].re, q_cache: RefCell::new(BTreeMap::new()) }
    }

    fn q(&self, mag2_bits: u64, z: f64) -> f64 {
        if z == 0.0 {
            return 1.0;
        }
        let key = (mag2_bits, z.to_bits());
        if let Some(v) = self.q_cache.borrow().get(&key) {
            return *v;
        }
        let k = f64::from_bits(mag2_bits).sqrt();
        let v = multiplier_profile(k * z, self.alpha).unwrap_or(0.0);
        self.q_cache.borrow_mut().insert(key, v);
        v
    }
}

impl FieldProbe for LinearEvolution {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], z: f64, t: f64) -> f64 {
        let mut total = self.constant;
        for (kv, m2, c) in &self.modes {
            let phase: f64 = (0..self.dim).map(|a| kv[a] * x[a]).sum();
            let decay = (-f64::from_bits(*m2).powf(0.5 * self.alpha) * t).exp();
            let (s, co) = phase.sin_cos();
            total += (c.re * co - c.im * s) * decay * self.q(*m2, z);
        }
        total
    }
}

/// A profile of `x` alone, frozen in `z` and `t`.
pub struct FrozenProfile<F: Fn(&[f64]) -> f64> {
    pub dim: usize,
    pub profile: F,
}

impl<F: Fn(&[f64]) -> f64> FieldProbe for FrozenProfile<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], _z: f64, _t: f64) -> f64 {
        (self.profile)(x)
    }
}

/// `θ ↦ r₀^{-α}(θ(r₀x, r₀z, 1 − r₀^α(1 − t)) − m)`.
pub struct Rescaled<P> {
    pub inner: P,
    pub r0: f64,
    pub alpha: f64,
    pub shift: f64,
}

impl<P: FieldProbe> FieldProbe for Rescaled<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64], z: f64, t: f64) -> f64 {
        let y: Vec<f64> = x.iter().map(|v| self.r0 * v).collect();
        let ra = self.r0.powf(self.alpha);
        (self.inner.eval(&y, self.r0 * z, 1.0 - ra * (1.0 - t)) - self.shift) / ra
    }
}

impl<P: FieldProbe + ?Sized> FieldProbe for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &[f64], z: f64, t: f64) -> f64 {
        (**self).eval(x, z, t)
    }
}

/// Anything whose oscillation over a cylinder can be measured.
pub trait OscillationSource {
    fn oscillation(&self, cyl: &Cylinder) -> Result<f64>;
    /// Smallest radius the source resolves.
    fn floor(&self) -> f64;
}

/// Grid sup minus grid inf of `θ*` over the nodes inside the cylinder;
/// the boundary data count as the `z = 0` level.
pub fn oscillation(traj: &ExtendedTrajectory, cyl: &Cylinder) -> Result<f64> {
    let grid = *traj.grid();
    let dim = grid.dim();
    let inside_x: Vec<usize> = (0..grid.len())
        .filter(|&flat| {
            let mut idx = [0usize; 3];
            grid.unravel(flat, &mut idx[..dim]);
            (0..dim).all(|a| grid.periodic_offset(grid.coordinate(idx[a]), cyl.center[a]).abs() <= cyl.r * (1.0 + 1e-12))
        })
        .collect();
    let (a, b) = (cyl.t_start(), cyl.t_anchor);
    let tol = 1e-12 * b.abs().max(1.0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (ti, t) in traj.times().iter().enumerate() {
        if !(*t > a + tol && *t <= b + tol) {
            continue;
        }
        let base = traj.base(ti).samples();
        for &node in &inside_x {
            lo = lo.min(base[node]);
            hi = hi.max(base[node]);
        }
        let f = traj.field(ti);
        for (li, z) in traj.z_levels().iter().enumerate() {
            if *z >= cyl.r {
                break;
            }
            for &node in &inside_x {
                let v = f.value(li, node);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if inside_x.is_empty() || !lo.is_finite() {
        return Err(Error::EmptySet(alloc::format!("no grid node inside the cylinder of radius {}", cyl.r)));
    }
    Ok(hi - lo)
}

impl OscillationSource for ExtendedTrajectory {
    fn oscillation(&self, cyl: &Cylinder) -> Result<f64> {
        oscillation(self, cyl)
    }

    fn floor(&self) -> f64 {
        4.0 * self.grid.spacing()
    }
}

/// Oscillation from `samples` equispaced points per axis of the cylinder
/// (`z` from 0, `t` down from the anchor).
pub fn probed_oscillation<P: FieldProbe + ?Sized>(probe: &P, cyl: &Cylinder, samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(Error::OutOfRange { name: "samples", value: samples as f64 });
    }
    let n = probe.dim();
    let m = samples;
    let mut x = vec![0.0; n];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for ti in 0..m {
        let t = cyl.t_anchor - cyl.duration() * ti as f64 / m as f64;
        for zi in 0..m {
            let z = cyl.r * zi as f64 / m as f64;
            for p in 0..m.pow(n as u32) {
                let mut rest = p;
                for a in (0..n).rev() {
                    x[a] = cyl.center[a] + cyl.r * (-1.0 + 2.0 * (rest % m) as f64 / (m - 1) as f64);
                    rest /= m;
                }
                let v = probe.eval(&x, z, t);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    Ok(hi - lo)
}

/// A probe sampled on a fixed lattice per cylinder.
pub struct Probed<P> {
    pub probe: P,
    pub samples: usize,
}

impl<P: FieldProbe> OscillationSource for Probed<P> {
    fn oscillation(&self, cyl: &Cylinder) -> Result<f64> {
        probed_oscillation(&self.probe, cyl, self.samples)
    }

    fn floor(&self) -> f64 {
        0.0
    }
}

/// `(r_k, osc_k)` over nested cylinders `r_k = r ρ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySequence {
    pub levels: Vec<(f64, f64)>,
    /// True when the sequence stopped at the source's resolution floor.
    pub truncated: bool,
    /// Log–log slope over the levels from `skip` on.
    pub exponent: Option<f64>,
    pub skip: usize,
}

/// The default shrink factor `c₀² a / 128` with `a = 0.99 · 4 / 2^{1/α}`.
pub fn default_shrink(alpha: f64, c0: f64) -> f64 {
    let a = 0.99 * 4.0 / 2f64.powf(1.0 / alpha);
    c0 * c0 * a / 128.0
}

pub fn oscillation_decay_sequence<S: OscillationSource + ?Sized>(
    source: &S,
    base: &Cylinder,
    rho: f64,
    k_max: usize,
    skip: usize,
) -> Result<DecaySequence> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::OutOfRange { name: "rho", value: rho });
    }
    let mut levels = Vec::new();
    let mut truncated = false;
    for k in 0..=k_max {
        let r = base.r * rho.powi(k as i32);
        if r < source.floor() {
            truncated = true;
            break;
        }
        let cyl = base.with_radius(r)?;
        levels.push((r, source.oscillation(&cyl)?));
    }
    let fit: Vec<(f64, f64)> = levels.iter().skip(skip).copied().filter(|(_, o)| *o > 0.0).collect();
    let exponent = if fit.len() >= 2 {
        let n = fit.len() as f64;
        let xs: Vec<f64> = fit.iter().map(|(r, _)| r.ln()).collect();
        let ys: Vec<f64> = fit.iter().map(|(_, o)| o.ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(DecaySequence { levels, truncated, exponent, skip })
}

/// `max |θ(x) − θ(y)| / |x − y|^γ` over nodes and dyadic offsets along
/// each axis.
pub fn holder_seminorm(theta: &RealField, exponent: f64) -> Result<f64> {
    if !(exponent > 0.0 && exponent <= 1.0) {
        return Err(Error::OutOfRange { name: "exponent", value: exponent });
    }
    let grid = *theta.grid();
    let dim = grid.dim();
    let n = grid.n();
    let v = theta.samples();
    let mut best = 0.0f64;
    let mut idx = [0usize; 3];
    let mut step = 1;
    while step <= n / 2 {
        let dist = (step as f64 * grid.spacing()).powf(exponent);
        for flat in 0..grid.len() {
            grid.unravel(flat, &mut idx[..dim]);
            for a in 0..dim {
                let mut j = idx;
                j[a] = (idx[a] + step) % n;
                let d = (v[flat] - v[grid.ravel(&j[..dim])]).abs() / dist;
                best = best.max(d);
            }
        }
        step *= 2;
    }
    Ok(best)
}

/// `A_k = C^k A_{k−3}^β` from the seed triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionSpec {
    pub c: f64,
    pub beta: f64,
    pub seed: [f64; 3],
    pub k_max: usize,
}

impl RecursionSpec {
    pub fn new(c: f64, beta: f64, seed: [f64; 3], k_max: usize) -> Result<Self> {
        let s = Self { c, beta, seed, k_max };
        s.validate()?;
        Ok(s)
    }

    /// `β = n / (n − α/2)`.
    pub fn for_dimension(n: usize, alpha: f64, c: f64, seed: [f64; 3], k_max: usize) -> Result<Self> {
        let nf = n as f64;
        Self::new(c, nf / (nf - 0.5 * alpha), seed, k_max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::OutOfRange { name: "C", value: self.c });
        }
        if !(self.beta > 1.0 && self.beta.is_finite()) {
            return Err(Error::OutOfRange { name: "beta", value: self.beta });
        }
        if let Some(s) = self.seed.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::OutOfRange { name: "seed", value: *s });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecursionClass {
    Converges,
    Diverges,
    /// Neither limit reached within `k_max` steps.
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionOutcome {
    pub class: RecursionClass,
    pub converges: bool,
    /// Steps taken before classification.
    pub steps: usize,
    /// Seed scale at the convergence boundary (upper end of the final bracket).
    pub threshold_epsilon0: f64,
    pub bracket: (f64, f64),
}

/// `ln A` beyond which the sequence counts as having left every bounded
/// region (and below whose negative as having reached zero).
const LOG_LIMIT: f64 = 700.0;

/// Classifies the iteration for the seed triple scaled by `scale`, in
/// logarithms: `L_k = k ln C + β L_{k−3}`.
fn classify_recursion(spec: &RecursionSpec, scale: f64) -> (RecursionClass, usize) {
    let ln_c = spec.c.ln();
    let mut l: [f64; 3] = [0.0; 3];
    for (i, s) in spec.seed.iter().enumerate() {
        l[i] = (s * scale).ln();
    }
    if l.iter().all(|v| *v == f64::NEG_INFINITY) {
        return (RecursionClass::Converges, 0);
    }
    for k in 3..spec.k_max.max(3) {
        let next = k as f64 * ln_c + spec.beta * l[k % 3];
        l[k % 3] = next;
        if l.iter().all(|v| *v < -LOG_LIMIT) {
            return (RecursionClass::Converges, k);
        }
        if next > LOG_LIMIT {
            return (RecursionClass::Diverges, k);
        }
    }
    (RecursionClass::Unclassified, spec.k_max)
}

/// Bisection bracket `(lo, hi)` of the seed scale separating convergence
/// from non-convergence; unclassified runs count as non-convergent.
pub fn recursion_threshold(spec: &RecursionSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let conv = |s: f64| classify_recursion(spec, s).0 == RecursionClass::Converges;
    let (mut lo, mut hi) = (1.0, 1.0);
    if conv(1.0) {
        while conv(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Ok((lo, f64::INFINITY));
            }
        }
    } else {
        while !conv(lo) {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Ok((0.0, hi));
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if conv(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

pub fn degiorgi_recursion(spec: &RecursionSpec) -> Result<RecursionOutcome> {
    spec.validate()?;
    let (class, steps) = classify_recursion(spec, 1.0);
    let bracket = recursion_threshold(spec)?;
    Ok(RecursionOutcome {
        class,
        converges: class == RecursionClass::Converges,
        steps,
        threshold_epsilon0: bracket.1,
        bracket,
    })
}

/// `K⁺ = ⌈(1/S + 1) |Q₄*|_{z^ε}⌉`.
pub fn k_plus(s: f64, q4: f64) -> Result<u64> {
    if !(s > 0.0) {
        return Err(Error::OutOfRange { name: "S", value: s });
    }
    if !(q4 > 0.0 && q4.is_finite()) {
        return Err(Error::OutOfRange { name: "|Q4*|", value: q4 });
    }
    Ok(((1.0 / s + 1.0) * q4).ceil() as u64)
}

/// `k` applications of `v ↦ 2(v − 1/2)`.
pub fn dyadic_truncation(v: f64, k: u32) -> f64 {
    (0..k).fold(v, |acc, _| 2.0 * (acc - 0.5))
}

/// `2^k (v − 1) + 1`.
pub fn dyadic_truncation_closed(v: f64, k: u32) -> f64 {
    2f64.powi(k as i32) * (v - 1.0) + 1.0
}

/// Hypotheses and conclusion of the second technical lemma on `Q₄*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondLemma {
    /// `max θ*` over the cylinder nodes (hypothesis: `≤ 1`).
    pub sup: f64,
    /// `|{θ* ≤ 0}| / |Q₄*|` (hypothesis: `≥ 1/2`).
    pub nonpositive_fraction: f64,
    pub hypotheses_hold: bool,
    /// `min(|{0 < θ* < 1/2}|, 1/100)`.
    pub s: f64,
    /// `∫_{A*} z^ε (θ* − 1/2)₊² + ∫_A (θ − 1/2)₊²`.
    pub lhs: f64,
    /// `S^{0.05α}`.
    pub bound: f64,
    /// `S^{0.005α}`.
    pub bound_variant: f64,
    pub holds: bool,
    pub holds_variant: bool,
    /// `ln(lhs) / (α ln S)`: the exponent (in units of `α`) the data support.
    pub measured_exponent: Option<f64>,
}

/// Evaluates the second lemma with unit constant on `Q₄*` anchored at
/// `t_anchor`, with `A* = B₄* × [t_anchor − a^α, t_anchor]`.
pub fn second_lemma_check(traj: &ExtendedTrajectory, a: f64, t_anchor: f64) -> Result<SecondLemma> {
    let grid = *traj.grid();
    let alpha = grid.alpha();
    let q4 = Cylinder::anchored(4.0, alpha, t_anchor)?;
    let eps = q4.epsilon();
    let xw = x_weights(&grid, &q4)?;
    let zw = z_weights(traj.z_levels(), 4.0, eps)?;
    let tw = t_weights(traj.times(), &q4)?;
    let ta = Cylinder { r: 4.0, t_anchor, alpha, center: [0.0; 3] };
    // time weights restricted to [t_anchor − a^α, t_anchor]
    let tw_a = t_weights(traj.times(), &Cylinder { r: a, ..ta }).unwrap_or_else(|_| vec![0.0; tw.len()]);
    let mut sup = f64::NEG_INFINITY;
    let mut nonpos = 0.0;
    let mut mid = 0.0;
    let mut lhs = 0.0;
    for (ti, wt) in tw.iter().enumerate() {
        if *wt == 0.0 && tw_a[ti] == 0.0 {
            continue;
        }
        let f = traj.field(ti);
        for (li, wz) in zw.iter().enumerate() {
            if *wz == 0.0 {
                continue;
            }
            for (node, wx) in xw.iter().enumerate() {
                if *wx == 0.0 {
                    continue;
                }
                let v = f.value(li, node);
                if *wt > 0.0 {
                    sup = sup.max(v);
                    if v <= 0.0 {
                        nonpos += wt * wz * wx;
                    } else if v < 0.5 {
                        mid += wt * wz * wx;
                    }
                }
                let p = (v - 0.5).max(0.0);
                lhs += tw_a[ti] * wz * wx * p * p;
            }
        }
        let b = traj.base(ti).samples();
        for (node, wx) in xw.iter().enumerate() {
            let p = (b[node] - 0.5).max(0.0);
            lhs += tw_a[ti] * wx * p * p;
        }
    }
    let total = q4.measure(grid.dim());
    let fraction = nonpos / total;
    let s = mid.min(S_CAP);
    let bound = s.powf(LEMMA_EXPONENT * alpha);
    let bound_variant = s.powf(LEMMA_EXPONENT_VARIANT * alpha);
    let measured_exponent = if lhs > 0.0 && s > 0.0 && s < 1.0 { Some(lhs.ln() / (alpha * s.ln())) } else { None };
    Ok(SecondLemma {
        sup,
        nonpositive_fraction: fraction,
        hypotheses_hold: sup <= 1.0 && fraction >= 0.5,
        s,
        lhs,
        bound,
        bound_variant,
        holds: lhs <= bound,
        holds_variant: lhs <= bound_variant,
        measured_exponent,
    })
}

/// Extension of a real field on a height ladder.
pub fn extend_real(f: &RealField, z_levels: &[f64]) -> Result<ExtensionField> {
    extend(&Transform::new(*f.grid()).forward(f)?, z_levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::geometric_levels;
    use crate::init::InitialCondition;
    use crate::spectral::{frac_symbol, to_spectral};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid8(n: usize, alpha: f64) -> GridSpec {
        GridSpec::new(2, n, 8.0, alpha).unwrap()
    }

    fn ladder() -> Vec<f64> {
        geometric_levels(1e-3, 4.0, 24).unwrap()
    }

    fn constant_traj(g: GridSpec, v: f64, times: &[f64]) -> ExtendedTrajectory {
        let z = ladder();
        let fields = times.iter().map(|_| ExtensionField::from_fn(g, z.clone(), |_, _| v).unwrap()).collect();
        let base = times.iter().map(|_| RealField::from_fn(g, |_| v).unwrap()).collect();
        ExtendedTrajectory::new(times.to_vec(), base, fields).unwrap()
    }

    fn q4_times(alpha: f64) -> (f64, Vec<f64>) {
        let anchor = 4f64.powf(alpha);
        (anchor, (0..=8).map(|i| anchor * i as f64 / 8.0).collect())
    }

    #[test]
    fn q4_measure_closed_form() {
        let m = q4_measure(2, 0.5);
        assert!((m - 64.0 * (8.0 / 1.5) * 2.0).abs() < 1e-10);
        assert!((m - 682.6666666666666).abs() < 1e-10);
        let cyl = Cylinder::anchored(4.0, 0.5, 2.0).unwrap();
        assert!((cyl.measure(2) - m).abs() < 1e-10);
        assert!((box_measure(&BoxRegion::of_cylinder(&cyl, 2), 0.5) - m).abs() < 1e-10);
    }

    #[test]
    fn q4_measure_monte_carlo() {
        let cyl = Cylinder::anchored(4.0, 0.5, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = 400_000;
        // z^ε has sup 4^ε on [0, 4): hit-or-miss under the box
        let mut hits = 0usize;
        for _ in 0..samples {
            let z: f64 = 4.0 * rng.random::<f64>();
            let u: f64 = rng.random::<f64>() * 2.0;
            if u < z.sqrt() {
                hits += 1;
            }
        }
        let est = 64.0 * 4.0 * 2.0 * 2.0 * hits as f64 / samples as f64;
        assert!((est - cyl.measure(2)).abs() < 0.005 * cyl.measure(2), "{est}");
    }

    #[test]
    fn weighted_measure_basic_properties() {
        let region = BoxRegion { x: vec![(-1.0, 1.0), (0.0, 2.0)], z: (0.0, 1.0), t: (0.0, 0.5) };
        let eps = 0.4;
        assert_eq!(weighted_measure(&region, eps, 8, |_, _, _| false).unwrap(), 0.0);
        let full = weighted_measure(&region, eps, 8, |_, _, _| true).unwrap();
        assert!((full - box_measure(&region, eps)).abs() < 1e-12);
        // random partitions are additive
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let cut: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let zc: f64 = rng.random::<f64>();
            let parts = [
                weighted_measure(&region, eps, 8, |x, z, _| x[0] < cut && z < zc).unwrap(),
                weighted_measure(&region, eps, 8, |x, z, _| x[0] < cut && z >= zc).unwrap(),
                weighted_measure(&region, eps, 8, |x, _, _| x[0] >= cut).unwrap(),
            ];
            assert!((parts.iter().sum::<f64>() - full).abs() < 1e-10);
            // monotone under inclusion
            assert!(parts[0] <= parts[0] + parts[1]);
        }
        // exact on z-slabs aligned with the cells
        let lower = weighted_measure(&region, eps, 8, |_, z, _| z < 0.5).unwrap();
        assert!((lower - 4.0 * slab(0.0, 0.5, eps) * 0.5).abs() < 1e-12);
    }

    #[test]
    fn level_sets_of_constants() {
        let alpha = 0.5;
        let g = grid8(16, alpha);
        let (anchor, times) = q4_times(alpha);
        let cyl = Cylinder::anchored(4.0, alpha, anchor).unwrap();
        let q = cyl.measure(2);
        // θ* = −1/2 means ϑ* = −1
        let s = level_set_stats(&constant_traj(g, -0.5, &times), &cyl).unwrap();
        assert!((s.meas_a - q).abs() < 1e-10 * q && s.meas_b == 0.0 && s.meas_c == 0.0);
        assert_eq!(s.dirichlet, 0.0);
        let s = level_set_stats(&constant_traj(g, 0.25, &times), &cyl).unwrap();
        assert!((s.meas_c - q).abs() < 1e-10 * q);
        assert_eq!(s.s, S_CAP);
        assert!((s.total - q).abs() < 1e-10 * q);
    }

    #[test]
    fn level_sets_of_linear_ramp() {
        // ϑ* = x₁/4 on Q₄*: 𝒜 = {x₁ ≤ 0}, ℬ = {x₁ ≥ 4}; nodal cells commit
        // an error of half a cell on each interface
        let alpha = 0.5;
        let (anchor, times) = q4_times(alpha);
        let cyl = Cylinder::anchored(4.0, alpha, anchor).unwrap();
        let q = cyl.measure(2);
        let mut errs = Vec::new();
        for n in [16, 32, 64] {
            let g = grid8(n, alpha);
            let z = ladder();
            let ramp = |x: &[f64]| g.periodic_offset(x[0], 0.0) / 8.0;
            let fields = times.iter().map(|_| ExtensionField::from_fn(g, z.clone(), |x, _| ramp(x)).unwrap()).collect();
            let base = times.iter().map(|_| RealField::from_fn(g, ramp).unwrap()).collect();
            let traj = ExtendedTrajectory::new(times.clone(), base, fields).unwrap();
            let s = level_set_stats(&traj, &cyl).unwrap();
            assert!((s.meas_a + s.meas_b + s.meas_c - q).abs() < 1e-10 * q);
            let h = g.spacing();
            // x₁ ∈ [−4, 0] plus half a cell, plus the node at ±4 which wraps
            // to −4 and carries a full cell
            let want_a = q * (4.0 + h) / 8.0;
            assert!((s.meas_a - want_a).abs() < 1e-9 * q, "n={n}");
            errs.push((s.meas_a - q / 2.0).abs());
            assert!((s.meas_b - 0.0).abs() < 1e-12);
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1]);
    }

    #[test]
    fn coverage_errors() {
        let g = grid8(16, 0.5);
        let traj = constant_traj(g, 0.0, &[0.0, 0.5, 1.0]);
        let cyl = Cylinder::anchored(4.0, 0.5, 2.0).unwrap();
        assert!(matches!(level_set_stats(&traj, &cyl), Err(Error::Coverage(_))));
        let g2 = GridSpec::torus2(16, 0.5).unwrap();
        let traj = constant_traj(g2, 0.0, &[0.0, 1.0, 2.0]);
        assert!(matches!(level_set_stats(&traj, &cyl), Err(Error::Coverage(_))));
    }

    #[test]
    fn isoperimetric_trivial_and_step() {
        let alpha = 0.5;
        let g = grid8(256, alpha);
        let e = ExtensionField::from_fn(g, ladder(), |_, _| 0.3).unwrap();
        let c = isoperimetric_check(&e, 0.0).unwrap();
        assert_eq!(c.rhs, 0.0);
        assert!(c.satisfied);
        // ϑ* = tanh(s(x₁)/w) + 1/2 with s periodic and s(x₁) ≈ x₁ near 0, z-independent
        let mut ratios = Vec::new();
        for w in [0.5, 0.25, 0.125] {
            let e = ExtensionField::from_fn(g, ladder(), |x, _| {
                let s = (core::f64::consts::PI * x[0] / 4.0).sin() * 4.0 / core::f64::consts::PI;
                0.5 * ((s / w).tanh() + 0.5)
            })
            .unwrap();
            let c = isoperimetric_check(&e, 0.0).unwrap();
            assert!(c.meas_a > 0.0 && c.meas_b > 0.0 && c.meas_c > 0.0);
            ratios.push(c.rhs / c.lhs);
        }
        // energy grows like 1/w while |𝒞| shrinks like w
        let (q1, q2) = (ratios[1] / ratios[0], ratios[2] / ratios[1]);
        assert!(q2 < q1 && q2 < 1.1, "{ratios:?}");
    }

    #[test]
    fn oscillation_properties() {
        let alpha = 0.75;
        let g = grid8(32, alpha);
        let ic = InitialCondition::RandomHk { k_min: 1.0, k_max: 6.0, slope: 0.0, amplitude: 1.0 };
        let theta = ic.realize(g, 5).unwrap();
        let (anchor, times) = q4_times(alpha);
        let z = ladder();
        let mk = |shift: f64| {
            let f = theta.map(|v| v + shift);
            let e = extend_real(&f, &z).unwrap();
            ExtendedTrajectory::new(times.clone(), vec![f; times.len()], vec![e; times.len()]).unwrap()
        };
        let traj = mk(0.0);
        let shifted = mk(3.0);
        let mut prev = 0.0;
        for r in [0.5, 1.0, 2.0, 4.0] {
            let cyl = Cylinder::anchored(r, alpha, anchor).unwrap();
            let o = oscillation(&traj, &cyl).unwrap();
            assert!(o >= prev);
            assert!((o - oscillation(&shifted, &cyl).unwrap()).abs() < 1e-12);
            prev = o;
        }
        let flat = constant_traj(g, 1.5, &times);
        assert_eq!(oscillation(&flat, &Cylinder::new(1.0, alpha).unwrap()).unwrap(), 0.0);
        assert!(matches!(oscillation(&traj, &Cylinder::new(0.01, alpha).unwrap().with_center(&[0.1, 0.1])), Err(Error::EmptySet(_))));
    }

    #[test]
    fn nodal_sequence_hits_the_floor() {
        let alpha = 0.75;
        let g = grid8(32, alpha);
        let traj = constant_traj(g, 0.0, &[0.0, 0.5, 1.0]);
        let rho = default_shrink(alpha, 0.6);
        let seq = oscillation_decay_sequence(&traj, &Cylinder::new(1.0, alpha).unwrap(), rho, 4, 0).unwrap();
        assert!(seq.truncated);
        assert_eq!(seq.levels.len(), 1);
        assert!(seq.levels.iter().all(|(_, o)| *o == 0.0));
    }

    #[test]
    fn frozen_power_profile_has_exponent_alpha() {
        let alpha = 0.75;
        let probe = FrozenProfile { dim: 2, profile: |x: &[f64]| x[0].abs().powf(alpha) };
        let src = Probed { probe, samples: 9 };
        let seq = oscillation_decay_sequence(&src, &Cylinder::new(1.0, alpha).unwrap(), 0.25, 5, 0).unwrap();
        assert!((seq.exponent.unwrap() - alpha).abs() < 1e-9);
    }

    #[test]
    fn linear_evolution_matches_spectral_extension() {
        let alpha = 0.6;
        let g = grid8(16, alpha);
        let ic = InitialCondition::RandomHk { k_min: 1.0, k_max: 4.0, slope: 0.0, amplitude: 1.0 };
        let f = to_spectral(&ic.realize(g, 2).unwrap());
        let probe = LinearEvolution::new(&f);
        let z = [0.05, 0.7];
        let e = extend(&f, &z).unwrap();
        let mut idx = [0usize; 2];
        for node in [0, 17, 100, 255] {
            g.unravel(node, &mut idx);
            let x = [g.coordinate(idx[0]), g.coordinate(idx[1])];
            for (l, zz) in z.iter().enumerate() {
                assert!((probe.eval(&x, *zz, 0.0) - e.value(l, node)).abs() < 1e-12);
            }
            // time decay of each mode
            let t = 0.3;
            let direct: f64 = {
                let mut s = SpectralField::zeros(g);
                for (flat, c) in f.coeffs().iter().enumerate() {
                    s.coeffs_mut()[flat] = c * (-frac_symbol(&g, flat, alpha) * t).exp();
                }
                crate::spectral::to_real(&s).samples()[node]
            };
            assert!((probe.eval(&x, 0.0, t) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn rescaling_composes_to_closed_form() {
        let alpha = 0.75;
        let r0 = 0.3;
        let inner = FrozenProfile { dim: 2, profile: |x: &[f64]| (x[0] + 0.3 * x[1]).sin() + x[1] * x[1] };
        let base = |x: &[f64], z: f64, t: f64| (inner.profile)(x) + z * z - 0.2 * t;
        struct Full<F: Fn(&[f64], f64, f64) -> f64>(F);
        impl<F: Fn(&[f64], f64, f64) -> f64> FieldProbe for Full<F> {
            fn dim(&self) -> usize {
                2
            }
            fn eval(&self, x: &[f64], z: f64, t: f64) -> f64 {
                (self.0)(x, z, t)
            }
        }
        let shifts = [0.4, -0.1, 0.25];
        let p1 = Rescaled { inner: Full(base), r0, alpha, shift: shifts[0] };
        let p2 = Rescaled { inner: p1, r0, alpha, shift: shifts[1] };
        let p3 = Rescaled { inner: p2, r0, alpha, shift: shifts[2] };
        let ra = r0.powf(alpha);
        for (x, z, t) in [([0.3, -0.2], 0.1, 0.9), ([-0.7, 0.5], 0.4, 0.2)] {
            let k = 3;
            let rk = r0.powi(k);
            let y = [rk * x[0], rk * x[1]];
            let shift: f64 = shifts.iter().enumerate().map(|(j, m)| ra.powi(j as i32) * m).sum();
            let closed = (base(&y, rk * z, 1.0 - ra.powi(k) * (1.0 - t)) - shift) / ra.powi(k);
            assert!((p3.eval(&x, z, t) - closed).abs() < 1e-9 * closed.abs().max(1.0));
        }
    }

    #[test]
    fn dyadic_truncation_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let v: f64 = rng.random::<f64>() * 2.0 - 1.0;
            for k in 0..20 {
                let a = dyadic_truncation(v, k);
                let b = dyadic_truncation_closed(v, k);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
                assert!(b <= 1.0);
            }
        }
    }

    #[test]
    fn holder_quotients() {
        let g = GridSpec::torus2(64, 1.0).unwrap();
        assert_eq!(holder_seminorm(&RealField::from_fn(g, |_| 2.0).unwrap(), 0.5).unwrap(), 0.0);
        let c = holder_seminorm(&RealField::from_fn(g, |x| x[0].cos()).unwrap(), 1.0).unwrap();
        assert!(c <= 1.0 + 1e-12 && c > 0.99);
        assert!(holder_seminorm(&RealField::zeros(g), 0.0).is_err());
    }

    #[test]
    fn holder_of_smoothed_step_scales_with_width() {
        let g = GridSpec::torus2(512, 1.0).unwrap();
        let gamma = 0.5;
        let c: Vec<f64> = [0.5, 0.25, 0.125]
            .iter()
            .map(|w| {
                let f = RealField::from_fn(g, |x| (x[0].sin() / w).tanh()).unwrap();
                holder_seminorm(&f, gamma).unwrap()
            })
            .collect();
        for pair in c.windows(2) {
            let rate = (pair[1] / pair[0]).log2();
            assert!((rate - gamma).abs() < 0.1, "{c:?}");
        }
    }

    #[test]
    fn recursion_closed_form_threshold() {
        let spec = RecursionSpec::new(1.0, 2.0, [1.0; 3], 5000).unwrap();
        let out = degiorgi_recursion(&spec).unwrap();
        assert_eq!(out.threshold_epsilon0, 1.0);
        assert_eq!(out.class, RecursionClass::Unclassified);
        let below = RecursionSpec::new(1.0, 2.0, [0.9; 3], 5000).unwrap();
        assert!(degiorgi_recursion(&below).unwrap().converges);
        let above = RecursionSpec::new(1.0, 2.0, [1.1; 3], 5000).unwrap();
        assert_eq!(degiorgi_recursion(&above).unwrap().class, RecursionClass::Diverges);
        let zero = RecursionSpec::new(3.0, 1.5, [0.0; 3], 100).unwrap();
        assert!(degiorgi_recursion(&zero).unwrap().converges);
    }

    #[test]
    fn recursion_threshold_monotonicity() {
        let mut prev = f64::INFINITY;
        for c in [1.5, 2.0, 3.0, 5.0] {
            let spec = RecursionSpec::for_dimension(2, 1.0, c, [1.0; 3], 5000).unwrap();
            let (lo, hi) = recursion_threshold(&spec).unwrap();
            assert!(hi - lo <= 1e-6 * hi);
            assert!(hi <= prev);
            prev = hi;
        }
        let mut prev = 0.0;
        for beta in [1.2, 4.0 / 3.0, 1.5, 2.0] {
            let spec = RecursionSpec::new(2.0, beta, [1.0; 3], 5000).unwrap();
            let (_, hi) = recursion_threshold(&spec).unwrap();
            assert!(hi >= prev);
            prev = hi;
        }
        assert!(RecursionSpec::new(2.0, 1.0, [1.0; 3], 10).is_err());
    }

    #[test]
    fn k_plus_values() {
        let q4 = q4_measure(2, 0.5);
        assert_eq!(k_plus(0.01, q4).unwrap(), 68950);
        assert_eq!(k_plus(1.0, q4).unwrap(), (2.0 * q4).ceil() as u64);
        assert!(k_plus(0.0, q4).is_err());
        let mut prev = u64::MAX;
        for s in [0.001, 0.005, 0.01, 0.1, 1.0] {
            let k = k_plus(s, q4).unwrap();
            assert!(k < prev);
            prev = k;
        }
    }

    #[test]
    fn constants_of_second_lemma() {
        assert!(2.0 * LEMMA_EXPONENT > M_RANGE.0 && 2.0 * LEMMA_EXPONENT < M_RANGE.1);
        assert_eq!(B_EXPONENT, 0.1);
    }
}
