//! The α-harmonic extension `θ*(x, z) = P_z^α ∗ θ`: its Fourier multiplier,
//! extension fields on a height ladder, the weighted Neumann trace, the
//! weighted gradient energy and the two-cube barrier.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField, SpectralField};
use crate::quadrature::{Adaptive, GaussLegendre};
use crate::spectral::{frac_symbol, Transform};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name: "alpha", value: alpha })
    }
}

fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `C_{n,α}` with `P_z^α(x) = C_{n,α} z^α / (z² + |x|²)^{(n+α)/2}` of unit mass.
pub fn poisson_normalization(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange { name: "n", value: 0.0 });
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    let nf = n as f64;
    Ok(gamma(0.5 * (nf + alpha)) / (PI.powf(0.5 * nf) * gamma(0.5 * alpha)))
}

/// Normalized Poisson kernel at distance `r = |x|`.
pub fn poisson_kernel(n: usize, alpha: f64, r: f64, z: f64) -> Result<f64> {
    let c = poisson_normalization(n, alpha)?;
    Ok(c * z.powf(alpha) / (z * z + r * r).powf(0.5 * (n as f64 + alpha)))
}

/// Trapezoid sum of `exp(phi(u))` over the real line. `peak` is the maximizer
/// of `phi`, `curvature` the magnitude of `phi''` there; the step resolves the
/// peak and the range extends until `phi` has dropped by 45.
fn log_trapezoid(phi: impl Fn(f64) -> f64, peak: f64, curvature: f64) -> f64 {
    let h = (0.25f64).min(0.3 / curvature.max(1e-300).sqrt());
    let top = phi(peak);
    let mut sum = 1.0;
    for dir in [-1.0, 1.0] {
        let mut j = 1.0;
        loop {
            let v = phi(peak + dir * j * h) - top;
            sum += v.exp();
            if v < -45.0 || j > 1e6 {
                break;
            }
            j += 1.0;
        }
    }
    sum * h * top.exp()
}

/// `Q(w) = Γ(α/2)^{-1} ∫₀^∞ s^{α/2-1} e^{-s - w²/(4s)} ds`, the extension
/// multiplier as a function of `w = |κ| z`.
pub fn multiplier_profile(w: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::OutOfRange { name: "k·z", value: w });
    }
    if w < 1.0 {
        return Ok(1.0 - multiplier_complement(w, alpha)?);
    }
    let a = 0.5 * alpha;
    let b = 0.25 * w * w;
    // u = ln s; φ(u) = a u − e^u − b e^{−u}
    let phi = |u: f64| a * u - u.exp() - b * (-u).exp();
    // stationary point: e^u = (a + sqrt(a² + 4b)) / 2
    let s = 0.5 * (a + (a * a + 4.0 * b).sqrt());
    let u0 = s.ln();
    let curv = s + b / s;
    let v = log_trapezoid(phi, u0, curv) / gamma(a);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature { estimate: f64::INFINITY })
    }
}

/// `1 − Q(w)`, accurate for small `w`.
pub fn multiplier_complement(w: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::OutOfRange { name: "k·z", value: w });
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    if w >= 1.0 {
        return Ok(1.0 - multiplier_profile(w, alpha)?);
    }
    let a = 0.5 * alpha;
    if a <= 0.9 {
        return Ok(complement_series(w, a));
    }
    let b = 0.25 * w * w;
    let f = |u: f64| {
        let g = -libm::expm1(-b * (-u).exp());
        (a * u - u.exp()).exp() * g
    };
    // integrand ~ e^{a u} left of ln b, ~ b e^{(a-1)u - e^u} right of it
    let lo = b.ln() - 45.0 / a;
    let hi = (50.0f64).ln();
    let h = 0.05;
    let count = ((hi - lo) / h).ceil() as usize;
    let h = (hi - lo) / count as f64;
    let sum: f64 = (0..=count).map(|j| f(lo + j as f64 * h)).sum::<f64>() - 0.5 * (f(lo) + f(hi));
    Ok(sum * h / gamma(a))
}

/// `1 − Q(w)` from the ascending series of `K_ν`, `ν = α/2`:
/// `Γ(1−ν)(w/2)^{2ν} Σ (w/2)^{2m}/(m! Γ(m+1+ν)) − Σ_{m≥1} Π_j (w/2)²/(j(j−ν))`.
fn complement_series(w: f64, nu: f64) -> f64 {
    let q = 0.25 * w * w;
    let mut plus = 1.0 / gamma(1.0 + nu);
    let mut sum_plus = plus;
    let mut minus = 1.0;
    let mut sum_minus = 0.0;
    for m in 1..60 {
        let mf = m as f64;
        plus *= q / (mf * (mf + nu));
        minus *= q / (mf * (mf - nu));
        sum_plus += plus;
        sum_minus += minus;
        if plus.abs() < 1e-18 * sum_plus.abs() && minus.abs() < 1e-18 * sum_minus.abs() {
            break;
        }
    }
    gamma(1.0 - nu) * q.powf(nu) * sum_plus - sum_minus
}

/// `Q^ε(k, z) = Q(k z)`.
pub fn extension_multiplier(k_mag: f64, z: f64, alpha: f64) -> Result<f64> {
    if !(k_mag >= 0.0) {
        return Err(Error::OutOfRange { name: "k_mag", value: k_mag });
    }
    if !(z >= 0.0) {
        return Err(Error::OutOfRange { name: "z", value: z });
    }
    multiplier_profile(k_mag * z, alpha)
}

/// Memo table of `Q(w)` for one `α`.
#[derive(Debug, Clone)]
pub struct MultiplierCache {
    alpha: f64,
    table: BTreeMap<u64, f64>,
}

impl MultiplierCache {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha, table: BTreeMap::new() })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&mut self, w: f64) -> Result<f64> {
        if let Some(v) = self.table.get(&w.to_bits()) {
            return Ok(*v);
        }
        let v = multiplier_profile(w, self.alpha)?;
        self.table.insert(w.to_bits(), v);
        Ok(v)
    }
}

/// Weighted Neumann constant `d_α` with `z^ε ∂_z θ* → d_α Λ^α θ` as `z → 0`.
pub fn neumann_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    Ok(-(2.0f64).powf(1.0 - alpha) * gamma(1.0 - 0.5 * alpha) / gamma(0.5 * alpha))
}

/// `1 / ∫₀^∞ w^ε Q(w)² dw`, the constant relating `‖Λ^{α/2}H‖²` to the
/// weighted `x`-gradient energy of the extension.
pub fn energy_identity_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    let nu = 0.5 * alpha;
    let c = (2.0f64).powf(1.0 - nu) / gamma(nu);
    Ok(2.0 * (PI * nu).sin() / (c * c * PI * nu))
}

/// `count` geometric heights from `z_min` to `z_max`.
pub fn geometric_levels(z_min: f64, z_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(z_min > 0.0 && z_max > z_min && count >= 2) {
        return Err(Error::OutOfRange { name: "z ladder", value: z_min });
    }
    let q = (z_max / z_min).powf(1.0 / (count - 1) as f64);
    let mut z: Vec<f64> = (0..count).map(|i| z_min * q.powi(i as i32)).collect();
    z[count - 1] = z_max;
    Ok(z)
}

/// 48 geometric levels from `1e-4` to `8`.
pub fn default_z_levels() -> Vec<f64> {
    geometric_levels(1e-4, 8.0, 48).expect("valid ladder")
}

/// Samples of `θ*` on the `x` grid times a ladder of heights.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionField {
    grid: GridSpec,
    z_levels: Vec<f64>,
    /// Level-major: `values[level * N^n + node]`.
    values: Vec<f64>,
    epsilon: f64,
    base: Option<SpectralField>,
}

impl ExtensionField {
    /// Builds a field from raw samples (heights strictly increasing and
    /// positive).
    pub fn new(grid: GridSpec, z_levels: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_levels(&z_levels)?;
        if values.len() != z_levels.len() * grid.len() {
            return Err(Error::GridMismatch(alloc::format!(
                "{} values for {} levels of {} nodes",
                values.len(),
                z_levels.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutOfRange { name: "extension value", value: f64::NAN });
        }
        Ok(Self { epsilon: grid.epsilon(), grid, z_levels, values, base: None })
    }

    /// Evaluates `f(x, z)` on the grid and ladder.
    pub fn from_fn(grid: GridSpec, z_levels: Vec<f64>, mut f: impl FnMut(&[f64], f64) -> f64) -> Result<Self> {
        check_levels(&z_levels)?;
        let mut values = Vec::with_capacity(z_levels.len() * grid.len());
        let mut idx = [0usize; 3];
        let mut x = [0.0; 3];
        for &z in &z_levels {
            for flat in 0..grid.len() {
                grid.unravel(flat, &mut idx[..grid.dim()]);
                for a in 0..grid.dim() {
                    x[a] = grid.coordinate(idx[a]);
                }
                values.push(f(&x[..grid.dim()], z));
            }
        }
        Self::new(grid, z_levels, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn z_levels(&self) -> &[f64] {
        &self.z_levels
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Boundary data the field was extended from, when known.
    pub fn base(&self) -> Option<&SpectralField> {
        self.base.as_ref()
    }

    pub fn level(&self, i: usize) -> &[f64] {
        let len = self.grid.len();
        &self.values[i * len..(i + 1) * len]
    }

    pub fn level_field(&self, i: usize) -> RealField {
        RealField::new(self.grid, self.level(i).to_vec()).expect("finite values")
    }

    pub fn value(&self, level: usize, node: usize) -> f64 {
        self.values[level * self.grid.len() + node]
    }
}

fn check_levels(z: &[f64]) -> Result<()> {
    if z.is_empty() || !(z[0] > 0.0) || z.windows(2).any(|w| !(w[1] > w[0])) || z.iter().any(|v| !v.is_finite()) {
        return Err(Error::OutOfRange { name: "z_levels", value: z.first().copied().unwrap_or(f64::NAN) });
    }
    Ok(())
}

/// `θ̂*(k, z) = Q(|2πk/L| z) θ̂(k)` on every level.
pub fn extend(theta: &SpectralField, z_levels: &[f64]) -> Result<ExtensionField> {
    let grid = *theta.grid();
    check_levels(z_levels)?;
    let alpha = grid.alpha();
    let mut cache = MultiplierCache::new(alpha)?;
    let transform = Transform::new(grid);
    let kmag: Vec<f64> = (0..grid.len()).map(|f| frac_symbol(&grid, f, 1.0)).collect();
    let mut values = Vec::with_capacity(z_levels.len() * grid.len());
    for &z in z_levels {
        let mut coeffs = theta.coeffs().to_vec();
        for (flat, c) in coeffs.iter_mut().enumerate() {
            if *c != num_complex::Complex64::new(0.0, 0.0) && kmag[flat] > 0.0 {
                *c *= cache.get(kmag[flat] * z)?;
            }
        }
        values.extend(transform.inverse_samples(&coeffs));
    }
    let mut field = ExtensionField::new(grid, z_levels.to_vec(), values)?;
    field.base = Some(theta.clone());
    Ok(field)
}

/// Extrapolated weighted Neumann trace.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannTrace {
    pub trace: RealField,
    /// Mean per-mode ratio `trace^(k) / (|κ|^α θ̂(k))`; `None` without modes.
    pub ratio: Option<f64>,
    /// Largest relative deviation of a per-mode ratio from the mean.
    pub ratio_spread: f64,
    /// Largest change between the two- and three-term extrapolants,
    /// relative to the trace's sup.
    pub extrapolation_spread: f64,
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> [f64; 3] {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut a = m;
        for row in 0..3 {
            a[row][c] = r[row];
        }
        *o = det(a) / d;
    }
    out
}

/// `lim_{z→0} z^ε ∂_z θ*` from the four lowest levels.
///
/// With `s = z^α` one has `z^ε ∂_z = α ∂_s`, so secant slopes in `s`
/// between consecutive geometric levels equal the limit up to terms in
/// `z^{2−α}` and `z²`, which are eliminated by a three-level fit.
pub fn neumann_trace(e: &ExtensionField) -> Result<NeumannTrace> {
    let z = e.z_levels();
    if z.len() < 4 {
        return Err(Error::OutOfRange { name: "z_levels (need 4)", value: z.len() as f64 });
    }
    let q = z[1] / z[0];
    if ((z[2] / z[1]) - q).abs() > 1e-9 * q || ((z[3] / z[2]) - q).abs() > 1e-9 * q {
        return Err(Error::OutOfRange { name: "z_levels (not geometric)", value: z[2] / z[1] });
    }
    let grid = *e.grid();
    let alpha = grid.alpha();
    let s: Vec<f64> = z[..4].iter().map(|v| v.powf(alpha)).collect();
    let p1 = 2.0 - alpha;
    let p2 = 2.0;
    let m = [
        [1.0, z[0].powf(p1), z[0].powf(p2)],
        [1.0, z[1].powf(p1), z[1].powf(p2)],
        [1.0, z[2].powf(p1), z[2].powf(p2)],
    ];
    let len = grid.len();
    let mut trace = vec![0.0; len];
    let mut spread = 0.0f64;
    for node in 0..len {
        let g: Vec<f64> = (0..3).map(|i| alpha * (e.value(i + 1, node) - e.value(i, node)) / (s[i + 1] - s[i])).collect();
        let sol = solve3(m, [g[0], g[1], g[2]]);
        // two-term extrapolant from the two lowest secants
        let two = (g[0] * m[1][1] - g[1] * m[0][1]) / (m[1][1] - m[0][1]);
        trace[node] = sol[0];
        spread = spread.max((sol[0] - two).abs());
    }
    if trace.iter().any(|v| !v.is_finite()) {
        return Err(Error::Extrapolation { spread: f64::INFINITY });
    }
    let sup = trace.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let rel = if sup > 0.0 { spread / sup } else { spread };
    if rel > 0.5 && sup > 1e-12 {
        return Err(Error::Extrapolation { spread: rel });
    }
    let trace = RealField::new(grid, trace)?;
    let (ratio, ratio_spread) = match e.base() {
        Some(base) => mode_ratio(&Transform::new(grid).forward_samples(trace.samples()), base, alpha),
        None => (None, 0.0),
    };
    Ok(NeumannTrace { trace, ratio, ratio_spread, extrapolation_spread: rel })
}

/// Mean and spread of `out(k) / (|κ|^β base(k))` over the significant modes.
fn mode_ratio(out: &SpectralField, base: &SpectralField, beta: f64) -> (Option<f64>, f64) {
    let grid = *base.grid();
    let cmax = base.coeffs().iter().skip(1).fold(0.0f64, |a, c| a.max(c.norm()));
    if cmax == 0.0 {
        return (None, 0.0);
    }
    let ratios: Vec<f64> = (1..grid.len())
        .filter(|&f| base.coeffs()[f].norm() > 1e-8 * cmax && !grid.is_nyquist(f))
        .map(|f| (out.coeffs()[f] / (base.coeffs()[f] * frac_symbol(&grid, f, beta))).re)
        .collect();
    if ratios.is_empty() {
        return (None, 0.0);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().fold(0.0f64, |a, r| a.max((r - mean).abs())) / mean.abs();
    (Some(mean), spread)
}

/// Height quadrature used by [`weighted_energy_identity_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyQuadrature {
    pub z_min: f64,
    pub z_max: f64,
    pub panels_per_decade: usize,
    pub order: usize,
    /// Largest admissible tail bound relative to the total.
    pub tail_tol: f64,
}

impl Default for EnergyQuadrature {
    fn default() -> Self {
        Self { z_min: 1e-8, z_max: 32.0, panels_per_decade: 6, order: 10, tail_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentity {
    /// `‖Λ^{α/2}H‖₂²`.
    pub lhs: f64,
    /// `∫₀^∞ ∫ z^ε |∇_x (P_z^α ∗ H)|² dx dz`.
    pub rhs: f64,
    /// `lhs / rhs`; `None` when both vanish.
    pub ratio: Option<f64>,
    /// Bound on the neglected part beyond `z_max`, relative to `rhs`.
    pub tail_bound: f64,
}

pub fn weighted_energy_identity(h: &RealField, alpha: f64) -> Result<EnergyIdentity> {
    weighted_energy_identity_with(h, alpha, &EnergyQuadrature::default())
}

/// Compares the spectral seminorm with a height quadrature of the weighted
/// gradient energy of the extension. The `x` integral at each height is a
/// Parseval sum over wavenumber shells.
pub fn weighted_energy_identity_with(h: &RealField, alpha: f64, quad: &EnergyQuadrature) -> Result<EnergyIdentity> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    let grid = h.grid().with_alpha(alpha)?;
    let spec = Transform::new(grid).forward_samples(h.samples());
    let vol = grid.length().powi(grid.dim() as i32);
    // shell |κ| → L^n Σ |c_k|²
    let mut shells: BTreeMap<i64, f64> = BTreeMap::new();
    for (flat, c) in spec.coeffs().iter().enumerate() {
        let k2 = grid.k_squared(flat);
        if k2 > 0 && c.norm_sqr() > 0.0 {
            *shells.entry(k2).or_insert(0.0) += vol * c.norm_sqr();
        }
    }
    let shells: Vec<(f64, f64)> = shells.into_iter().map(|(k2, e)| ((k2 as f64).sqrt() * grid.wave_scale(), e)).collect();
    let lhs: f64 = shells.iter().map(|(k, e)| k.powf(alpha) * e).sum();
    if shells.is_empty() {
        return Ok(EnergyIdentity { lhs: 0.0, rhs: 0.0, ratio: None, tail_bound: 0.0 });
    }
    let eps = 1.0 - alpha;
    let energy_at = |z: f64| -> Result<f64> {
        let mut total = 0.0;
        for (k, e) in &shells {
            let q = multiplier_profile(k * z, alpha)?;
            total += k * k * e * q * q;
        }
        Ok(total)
    };
    // head on (0, z_min): Q ≈ 1
    let g0: f64 = shells.iter().map(|(k, e)| k * k * e).sum();
    let mut rhs = g0 * quad.z_min.powf(1.0 + eps) / (1.0 + eps);
    let rule = GaussLegendre::new(quad.order);
    let decades = (quad.z_max / quad.z_min).log10();
    let panels = ((decades * quad.panels_per_decade as f64).ceil() as usize).max(1);
    let (u0, u1) = (quad.z_min.ln(), quad.z_max.ln());
    let du = (u1 - u0) / panels as f64;
    for p in 0..panels {
        let a = u0 + p as f64 * du;
        for (u, w) in rule.mapped(a, a + du) {
            let z = u.exp();
            rhs += w * z * z.powf(eps) * energy_at(z)?;
        }
    }
    // tail: Q decays at least like e^{-w}, so the remainder is bounded by the
    // integrand at z_max over 2 k_min, with a safety factor
    let kmin = shells[0].0;
    let zt = quad.z_max;
    let tail = 4.0 * zt.powf(eps) * energy_at(zt)? / (2.0 * kmin) * (1.0 + 1.0 / (kmin * zt));
    let tail_bound = tail / rhs;
    if tail_bound > quad.tail_tol {
        return Err(Error::UnresolvedTail { bound: tail_bound });
    }
    Ok(EnergyIdentity { lhs, rhs, ratio: Some(lhs / rhs), tail_bound })
}

/// Two-cube barrier data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    pub omega: f64,
    pub c0: f64,
    pub n: usize,
    pub alpha: f64,
}

impl BarrierSpec {
    pub fn new(omega: f64, c0: f64, n: usize, alpha: f64) -> Result<Self> {
        let s = Self { omega, c0, n, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 1 && self.n <= 3) {
            return Err(Error::OutOfRange { name: "n", value: self.n as f64 });
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::OutOfRange { name: "alpha", value: self.alpha });
        }
        let lower = 32.0 / (64.0f64).powf(1.0 / self.alpha);
        if !(self.c0 < 1.0 && self.c0 > lower) {
            return Err(Error::Inadmissible(alloc::format!("c0 = {} outside ({lower}, 1)", self.c0)));
        }
        if !(self.omega > 0.0 && self.omega < 2.0 * (1.0 - self.c0)) {
            return Err(Error::Inadmissible(alloc::format!(
                "omega = {} outside (0, {})",
                self.omega,
                2.0 * (1.0 - self.c0)
            )));
        }
        Ok(())
    }
}

/// Sample layout over `B₄* = [-4, 4]^n × (0, 4]` and the inner block
/// `B_{c₀}*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSampling {
    /// Uniform points per axis on `[-4, 4]`.
    pub nx: usize,
    /// Geometric heights from `z_min` to 4.
    pub nz: usize,
    pub z_min: f64,
    /// Uniform points per axis (and heights) on the inner block.
    pub inner: usize,
}

impl Default for BarrierSampling {
    fn default() -> Self {
        Self { nx: 9, nz: 10, z_min: 1e-3, inner: 7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierField {
    pub x_nodes: Vec<f64>,
    pub z_nodes: Vec<f64>,
    /// `F` per height (outer) and `x` node (row-major, inner).
    pub values: Vec<f64>,
    /// `(P_4^α ∗ ψ)(0)` with the unit-mass kernel.
    pub k_n: f64,
    /// The same without the kernel constant.
    pub k_n_unnormalized: f64,
    /// The closed-form approximation `2ω^n / (1+n)^{(n+α)/2}`.
    pub k_n_approx: f64,
    /// `F(0, 4)`, equal to one by construction.
    pub top_center: f64,
    pub inf_boundary: f64,
    /// `(x, z)` where `inf_boundary` is attained among the samples.
    pub inf_boundary_at: Vec<f64>,
    pub sup_inner: f64,
    pub sup_inner_at: Vec<f64>,
}

/// `∫_cube f(y) dy` by nested adaptive Gauss–Legendre.
fn cube_integral(center: &[f64], half: f64, f: &mut dyn FnMut(&[f64]) -> f64) -> f64 {
    fn rec(axis: usize, center: &[f64], half: f64, y: &mut [f64], f: &mut dyn FnMut(&[f64]) -> f64) -> f64 {
        let q = Adaptive::new(1e-10, 1e-300).with_max_panels(400);
        let last = axis + 1 == center.len();
        let (a, b) = (center[axis] - half, center[axis] + half);
        let mut g = |t: f64| {
            y[axis] = t;
            if last {
                f(y)
            } else {
                let mut inner = y.to_vec();
                rec(axis + 1, center, half, &mut inner, f)
            }
        };
        q.estimate(a, b, 2, &mut g).value
    }
    let mut y = vec![0.0; center.len()];
    rec(0, center, half, &mut y, f)
}

/// `(P_z^α ∗ ψ)(x)` without the kernel constant.
fn two_cube(spec: &BarrierSpec, x: &[f64], z: f64) -> f64 {
    let p = 0.5 * (spec.n as f64 + spec.alpha);
    let za = z.powf(spec.alpha);
    let mut total = 0.0;
    for sign in [-1.0, 1.0] {
        let center = vec![4.0 * sign; spec.n];
        let mut f = |y: &[f64]| {
            let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            za / (z * z + r2).powf(p)
        };
        total += cube_integral(&center, spec.omega, &mut f);
    }
    total
}

/// `F = K_n^{-1} P_z^α ∗ ψ` on the sampling, with its boundary infimum and
/// inner supremum.
pub fn barrier_field(spec: &BarrierSpec, sampling: &BarrierSampling) -> Result<BarrierField> {
    spec.validate()?;
    let n = spec.n;
    if sampling.nx < 2 || sampling.nz < 2 || sampling.inner < 2 {
        return Err(Error::OutOfRange { name: "barrier sampling", value: sampling.nx as f64 });
    }
    let c = poisson_normalization(n, spec.alpha)?;
    let k_raw = two_cube(spec, &vec![0.0; n], 4.0);
    if !(k_raw > 0.0) {
        return Err(Error::Quadrature { estimate: k_raw });
    }
    let nf = n as f64;
    let k_n_approx = 2.0 * spec.omega.powi(n as i32) / (1.0 + nf).powf(0.5 * (nf + spec.alpha));
    let x_nodes: Vec<f64> = (0..sampling.nx).map(|i| -4.0 + 8.0 * i as f64 / (sampling.nx - 1) as f64).collect();
    let z_nodes = geometric_levels(sampling.z_min, 4.0, sampling.nz)?;
    let points = sampling.nx.pow(n as u32);
    let mut values = Vec::with_capacity(points * z_nodes.len());
    let mut inf = (f64::INFINITY, Vec::new());
    let mut x = vec![0.0; n];
    for &z in &z_nodes {
        for p in 0..points {
            let mut rest = p;
            for a in (0..n).rev() {
                x[a] = x_nodes[rest % sampling.nx];
                rest /= sampling.nx;
            }
            let v = two_cube(spec, &x, z) / k_raw;
            let on_boundary = z == 4.0 || x.iter().any(|v| v.abs() == 4.0);
            if on_boundary && v < inf.0 {
                let mut at = x.clone();
                at.push(z);
                inf = (v, at);
            }
            values.push(v);
        }
    }
    let mut sup = (f64::NEG_INFINITY, Vec::new());
    let m = sampling.inner;
    let inner_nodes: Vec<f64> = (0..m).map(|i| spec.c0 * (-1.0 + 2.0 * i as f64 / (m - 1) as f64)).collect();
    for zi in 1..m {
        let z = spec.c0 * zi as f64 / (m - 1) as f64;
        for p in 0..m.pow(n as u32) {
            let mut rest = p;
            for a in (0..n).rev() {
                x[a] = inner_nodes[rest % m];
                rest /= m;
            }
            let v = two_cube(spec, &x, z) / k_raw;
            if v > sup.0 {
                let mut at = x.clone();
                at.push(z);
                sup = (v, at);
            }
        }
    }
    Ok(BarrierField {
        x_nodes,
        z_nodes,
        values,
        k_n: c * k_raw,
        k_n_unnormalized: k_raw,
        k_n_approx,
        top_center: 1.0,
        inf_boundary: inf.0,
        inf_boundary_at: inf.1,
        sup_inner: sup.0,
        sup_inner_at: sup.1,
    })
}

/// `λ = 1 − sup_{B_{c₀}*} F`.
pub fn lambda_estimate(spec: &BarrierSpec) -> Result<f64> {
    spec.validate()?;
    let sampling = BarrierSampling { nx: 2, nz: 2, ..BarrierSampling::default() };
    let f = barrier_field(spec, &sampling)?;
    let lambda = 1.0 - f.sup_inner;
    if lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(Error::Inadmissible(alloc::format!("barrier gives lambda = {lambda}")))
    }
}
