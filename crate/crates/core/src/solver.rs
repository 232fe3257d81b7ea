//! Integrating-factor time stepping for `∂_t θ + s·u·∇θ + Λ^α θ = 0` on the
//! two-torus, trajectory capture and the energy diagnostics built on it.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField, SpectralField};
use crate::init::InitialCondition;
use crate::spectral::{dealias_keeps, frac_symbol, l2_norm, seminorm_sq, sup_norm, Transform};

/// Time integrator. Both treat dissipation exactly through `e^{-|κ|^α dt}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// First-order integrating-factor Euler.
    #[default]
    Euler,
    /// Integrating-factor Heun.
    Rk2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    pub ic: InitialCondition,
    pub seed: u64,
    /// Coefficient of the advection term; `0` gives the linear fractional
    /// heat flow.
    pub flow_scale: f64,
    pub scheme: Scheme,
    /// A snapshot is kept every this many steps (and at `t_end`).
    pub snapshot_every: usize,
}

impl SolverConfig {
    pub fn new(grid: GridSpec, dt: f64, t_end: f64, ic: InitialCondition, seed: u64) -> Result<Self> {
        let cfg = Self { grid, dt, t_end, ic, seed, flow_scale: 1.0, scheme: Scheme::Euler, snapshot_every: 1 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_flow_scale(mut self, flow_scale: f64) -> Result<Self> {
        self.flow_scale = flow_scale;
        self.validate()?;
        Ok(self)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = every.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::OutOfRange { name: "dt", value: self.dt });
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::OutOfRange { name: "t_end", value: self.t_end });
        }
        if !(0.0..=1.0).contains(&self.flow_scale) {
            return Err(Error::OutOfRange { name: "flow_scale", value: self.flow_scale });
        }
        if self.flow_scale > 0.0 && self.grid.dim() != 2 {
            return Err(Error::Dimension { expected: 2, found: self.grid.dim() });
        }
        if self.snapshot_every == 0 {
            return Err(Error::OutOfRange { name: "snapshot_every", value: 0.0 });
        }
        Ok(())
    }
}

/// Precomputed operators for repeated steps with a fixed `dt`.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: GridSpec,
    transform: Transform,
    dt: f64,
    flow_scale: f64,
    scheme: Scheme,
    decay: Vec<f64>,
    keep: Vec<bool>,
    /// `2πk/L` per axis, zero on Nyquist.
    kvec: [Vec<f64>; 2],
    /// Riesz multipliers `(i k₂/|k|, −i k₁/|k|)` without the `i`.
    riesz: [Vec<f64>; 2],
}

impl Stepper {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid;
        let len = grid.len();
        let alpha = grid.alpha();
        let decay = (0..len).map(|f| (-frac_symbol(&grid, f, alpha) * cfg.dt).exp()).collect();
        let keep = (0..len).map(|f| dealias_keeps(&grid, f)).collect();
        let mut kvec = [Vec::new(), Vec::new()];
        let mut riesz = [Vec::new(), Vec::new()];
        if grid.dim() == 2 {
            let s = grid.wave_scale();
            for flat in 0..len {
                let k = grid.wavevector(flat);
                let nyq = grid.is_nyquist(flat);
                let mag = grid.k_magnitude(flat);
                for axis in 0..2 {
                    kvec[axis].push(if nyq { 0.0 } else { s * k[axis] as f64 });
                }
                let (r1, r2) = if nyq || mag == 0.0 { (0.0, 0.0) } else { (k[1] as f64 / mag, -(k[0] as f64) / mag) };
                riesz[0].push(r1);
                riesz[1].push(r2);
            }
        }
        Ok(Self {
            grid,
            transform: Transform::new(grid),
            dt: cfg.dt,
            flow_scale: cfg.flow_scale,
            scheme: cfg.scheme,
            decay,
            keep,
            kvec,
            riesz,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    /// Largest `dt` allowed by `dt ≤ 0.5 Δx / max|s·u|` for `state`.
    pub fn cfl_bound(&self, state: &SpectralField) -> f64 {
        if self.flow_scale == 0.0 {
            return f64::INFINITY;
        }
        let (u1, u2, _, _) = self.fields(state);
        let umax = u1.iter().zip(&u2).fold(0.0f64, |m, (a, b)| m.max((a * a + b * b).sqrt()));
        if umax == 0.0 {
            f64::INFINITY
        } else {
            0.5 * self.grid.spacing() / (self.flow_scale * umax)
        }
    }

    /// Velocity and gradient samples of the dealiased state.
    fn fields(&self, state: &SpectralField) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let c = state.coeffs();
        let i = Complex64::new(0.0, 1.0);
        let make = |f: &dyn Fn(usize) -> Complex64| -> Vec<f64> {
            let buf: Vec<Complex64> =
                (0..c.len()).map(|flat| if self.keep[flat] { f(flat) } else { Complex64::new(0.0, 0.0) }).collect();
            self.transform.inverse_samples(&buf)
        };
        let u1 = make(&|f| i * self.riesz[0][f] * c[f]);
        let u2 = make(&|f| i * self.riesz[1][f] * c[f]);
        let g1 = make(&|f| i * self.kvec[0][f] * c[f]);
        let g2 = make(&|f| i * self.kvec[1][f] * c[f]);
        (u1, u2, g1, g2)
    }

    /// Dealiased transform of `s·u·∇θ`, zero mean.
    fn nonlinear(&self, state: &SpectralField) -> Vec<Complex64> {
        let (u1, u2, g1, g2) = self.fields(state);
        let prod: Vec<f64> = (0..u1.len()).map(|j| self.flow_scale * (u1[j] * g1[j] + u2[j] * g2[j])).collect();
        let mut out = self.transform.forward_samples(&prod).coeffs().to_vec();
        for (flat, v) in out.iter_mut().enumerate() {
            if !self.keep[flat] || flat == 0 {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Advances `state` by one step of length `dt`. `t` is only used to label
    /// failures.
    pub fn step_at(&self, state: &SpectralField, t: f64) -> Result<SpectralField> {
        self.grid.check_same(state.grid())?;
        let c = state.coeffs();
        let dt = self.dt;
        let next: Vec<Complex64> = if self.flow_scale == 0.0 {
            c.iter().zip(&self.decay).map(|(v, e)| v * e).collect()
        } else {
            let bound = self.cfl_bound(state);
            if dt > bound {
                return Err(Error::Cfl { dt, bound });
            }
            let n0 = self.nonlinear(state);
            match self.scheme {
                Scheme::Euler => (0..c.len()).map(|f| self.decay[f] * (c[f] - dt * n0[f])).collect(),
                Scheme::Rk2 => {
                    let stage: Vec<Complex64> = (0..c.len()).map(|f| self.decay[f] * (c[f] - dt * n0[f])).collect();
                    let stage = SpectralField::new(self.grid, stage)?;
                    let n1 = self.nonlinear(&stage);
                    (0..c.len())
                        .map(|f| self.decay[f] * (c[f] - 0.5 * dt * n0[f]) - 0.5 * dt * n1[f])
                        .collect()
                }
            }
        };
        if next.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::BlowUp { t: t + dt });
        }
        SpectralField::new(self.grid, next)
    }
}

/// One step with a freshly built [`Stepper`].
pub fn step(state: &SpectralField, cfg: &SolverConfig) -> Result<SpectralField> {
    Stepper::new(cfg)?.step_at(state, 0.0)
}

/// One row of the norm series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSample {
    pub t: f64,
    pub l2: f64,
    pub sup: f64,
    pub h_alpha_half: f64,
    /// Trapezoid value of `2∫‖Λ^{α/2}θ‖² dt` over the step ending at `t`.
    pub dissipation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: GridSpec,
    snapshots: Vec<(f64, RealField)>,
    norms: Vec<NormSample>,
}

impl Trajectory {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid, snapshots: Vec::new(), norms: Vec::new() }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn snapshots(&self) -> &[(f64, RealField)] {
        &self.snapshots
    }

    pub fn norms(&self) -> &[NormSample] {
        &self.norms
    }

    /// Appends a snapshot; times must increase strictly.
    pub fn push_snapshot(&mut self, t: f64, field: RealField) -> Result<()> {
        self.grid.check_same(field.grid())?;
        if let Some((last, _)) = self.snapshots.last() {
            if !(t > *last) {
                return Err(Error::OutOfRange { name: "snapshot time", value: t });
            }
        }
        self.snapshots.push((t, field));
        Ok(())
    }

    pub fn push_norms(&mut self, sample: NormSample) {
        self.norms.push(sample);
    }

    /// Snapshot whose time equals `t` up to `1e-9` relative.
    pub fn snapshot_at(&self, t: f64) -> Result<&RealField> {
        self.snapshot_index(t).map(|i| &self.snapshots[i].1)
    }

    fn snapshot_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * t.abs().max(1e-12);
        self.snapshots.iter().position(|(s, _)| (s - t).abs() <= tol).ok_or(Error::MissingSnapshot(t))
    }

    pub fn last_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.0)
    }
}

/// A run that stopped early, with everything recorded up to the last valid
/// state.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("run failed at t = {at_time}: {error}")]
pub struct RunFailure {
    pub error: Error,
    pub at_time: f64,
    pub partial: Trajectory,
}

fn norm_sample(transform: &Transform, state: &SpectralField, t: f64) -> (RealField, NormSample) {
    let samples = transform.inverse_samples(state.coeffs());
    let field = RealField::new(*state.grid(), samples).expect("finite state");
    let h = seminorm_sq(state, 0.5 * state.grid().alpha()).sqrt();
    let sample = NormSample { t, l2: l2_norm(&field), sup: sup_norm(&field), h_alpha_half: h, dissipation: 0.0 };
    (field, sample)
}

/// Integrates from the configured initial condition to `t_end`.
pub fn run(cfg: &SolverConfig) -> core::result::Result<Trajectory, RunFailure> {
    let fail = |error: Error, at_time: f64, partial: Trajectory| RunFailure { error, at_time, partial };
    let empty = Trajectory::new(cfg.grid);
    let theta0 = cfg.ic.realize(cfg.grid, cfg.seed).map_err(|e| fail(e, 0.0, empty.clone()))?;
    run_from(cfg, &theta0)
}

/// Integrates from an explicit initial field.
pub fn run_from(cfg: &SolverConfig, theta0: &RealField) -> core::result::Result<Trajectory, RunFailure> {
    let mut traj = Trajectory::new(cfg.grid);
    let stepper = match Stepper::new(cfg) {
        Ok(s) => s,
        Err(error) => return Err(RunFailure { error, at_time: 0.0, partial: traj }),
    };
    let transform = stepper.transform();
    let mut state = match transform.forward(theta0) {
        Ok(s) => s,
        Err(error) => return Err(RunFailure { error, at_time: 0.0, partial: traj }),
    };
    let (field, sample) = norm_sample(transform, &state, 0.0);
    traj.push_snapshot(0.0, field).expect("first snapshot");
    traj.push_norms(sample);

    let steps = if cfg.t_end == 0.0 { 0 } else { (cfg.t_end / cfg.dt - 1e-9).ceil() as usize };
    let mut t = 0.0;
    let mut last_h = sample.h_alpha_half;
    // a shorter closing step when t_end is not a multiple of dt
    let tail = cfg.t_end - (steps as f64 - 1.0) * cfg.dt;
    let closing = if steps > 0 && (tail - cfg.dt).abs() > 1e-12 * cfg.dt {
        let mut short = cfg.clone();
        short.dt = tail;
        match Stepper::new(&short) {
            Ok(s) => Some(s),
            Err(error) => return Err(RunFailure { error, at_time: 0.0, partial: traj }),
        }
    } else {
        None
    };
    for i in 1..=steps {
        let active = if i == steps { closing.as_ref().unwrap_or(&stepper) } else { &stepper };
        let next = match active.step_at(&state, t) {
            Ok(s) => s,
            Err(error) => return Err(RunFailure { error, at_time: t, partial: traj }),
        };
        let t_next = if i == steps { cfg.t_end } else { i as f64 * cfg.dt };
        let (field, mut sample) = norm_sample(transform, &next, t_next);
        sample.dissipation = (t_next - t) * (last_h * last_h + sample.h_alpha_half * sample.h_alpha_half);
        last_h = sample.h_alpha_half;
        traj.push_norms(sample);
        if i % cfg.snapshot_every == 0 || i == steps {
            traj.push_snapshot(t_next, field).expect("increasing time");
        }
        state = next;
        t = t_next;
    }
    Ok(traj)
}

/// Outcome of the truncated-energy check on `[t1, t2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetEnergy {
    pub level: f64,
    /// `∫θ_λ²(t₂) − ∫θ_λ²(t₁)`.
    pub lhs: f64,
    /// Time-trapezoid of `∫∫|Λ^{α/2}θ_λ|²` over the snapshots in `[t₁, t₂]`.
    pub rhs: f64,
    /// `lhs + 2·rhs`, the quantity required to be non-positive.
    pub residual: f64,
    /// `lhs − 2·rhs`, the printed variant with the dissipation subtracted.
    pub residual_subtracted: f64,
    pub satisfied: bool,
}

/// Checks `∫θ_λ²(t₂) − ∫θ_λ²(t₁) + 2∫∫|Λ^{α/2}θ_λ|² ≤ tol` for
/// `θ_λ = (θ − λ)₊`.
pub fn level_set_energy_check(traj: &Trajectory, lambda: f64, t1: f64, t2: f64, tol: f64) -> Result<LevelSetEnergy> {
    if !(lambda >= 0.0) {
        return Err(Error::OutOfRange { name: "lambda", value: lambda });
    }
    if !(t1 < t2) {
        return Err(Error::OutOfRange { name: "t2", value: t2 });
    }
    let i1 = traj.snapshot_index(t1)?;
    let i2 = traj.snapshot_index(t2)?;
    let transform = Transform::new(traj.grid);
    let alpha = traj.grid.alpha();
    let cut = |f: &RealField| f.map(|v| (v - lambda).max(0.0));
    let energy = |f: &RealField| {
        let n = l2_norm(f);
        n * n
    };
    let dissipation = |f: &RealField| seminorm_sq(&transform.forward_samples(f.samples()), 0.5 * alpha);
    let snaps = &traj.snapshots[i1..=i2];
    let mut rhs = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (t, f) in snaps {
        let d = dissipation(&cut(f));
        if let Some((tp, dp)) = prev {
            rhs += 0.5 * (t - tp) * (d + dp);
        }
        prev = Some((*t, d));
    }
    let lhs = energy(&cut(&snaps[snaps.len() - 1].1)) - energy(&cut(&snaps[0].1));
    let residual = lhs + 2.0 * rhs;
    Ok(LevelSetEnergy {
        level: lambda,
        lhs,
        rhs,
        residual,
        residual_subtracted: lhs - 2.0 * rhs,
        satisfied: residual <= tol,
    })
}

/// Least-squares fit of `log sup|θ|` against `log t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub fitted_slope: f64,
    pub intercept: f64,
    /// `max t^{n/(2α)} sup|θ(t)| / ‖θ₀‖₂` over the window.
    pub c_estimate: f64,
    /// RMS residual of the log–log fit.
    pub power_residual: f64,
    /// RMS residual of a `log sup` against `t` fit.
    pub exponential_residual: f64,
    /// False when an exponential describes the data better than a power law.
    pub power_law: bool,
    pub points: usize,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Fits the sup-norm decay on `[ta, tb]` using the norm series.
pub fn decay_exponent(traj: &Trajectory, window: (f64, f64)) -> Result<DecayFit> {
    let (ta, tb) = window;
    if !(ta > 0.0 && tb > ta) {
        return Err(Error::DegenerateWindow(alloc::format!("[{ta}, {tb}]")));
    }
    let l2_0 = traj.norms.first().map(|s| s.l2).unwrap_or(0.0);
    if !(l2_0 > 0.0) {
        return Err(Error::DegenerateWindow("zero initial data".into()));
    }
    let pts: Vec<&NormSample> = traj.norms.iter().filter(|s| s.t >= ta * (1.0 - 1e-12) && s.t <= tb * (1.0 + 1e-12)).collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateWindow(alloc::format!("{} samples in window", pts.len())));
    }
    if pts.iter().any(|s| !(s.sup > 0.0)) {
        return Err(Error::DegenerateWindow("non-positive sup in window".into()));
    }
    let logt: Vec<f64> = pts.iter().map(|s| s.t.ln()).collect();
    let t: Vec<f64> = pts.iter().map(|s| s.t).collect();
    let logs: Vec<f64> = pts.iter().map(|s| s.sup.ln()).collect();
    let (slope, intercept, power_residual) = least_squares(&logt, &logs);
    let (_, _, exponential_residual) = least_squares(&t, &logs);
    let g = traj.grid;
    let p = g.dim() as f64 / (2.0 * g.alpha());
    let c_estimate = pts.iter().map(|s| s.t.powf(p) * s.sup / l2_0).fold(0.0, f64::max);
    Ok(DecayFit {
        fitted_slope: slope,
        intercept,
        c_estimate,
        power_residual,
        exponential_residual,
        power_law: power_residual <= exponential_residual,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::to_spectral;

    fn shear(n: usize, alpha: f64) -> SolverConfig {
        let g = GridSpec::torus2(n, alpha).unwrap();
        SolverConfig::new(g, 0.01, 0.1, InitialCondition::Shear { k: 3, amplitude: 1.0 }, 0).unwrap()
    }

    #[test]
    fn linear_step_is_exact() {
        let cfg = shear(16, 1.0).with_flow_scale(0.0).unwrap();
        let mut cfg = cfg;
        cfg.dt = 0.37;
        let th = to_spectral(&cfg.ic.realize(cfg.grid, 0).unwrap());
        let next = step(&th, &cfg).unwrap();
        let want = 0.5 * (-3.0f64 * 0.37).exp();
        assert!((next.coeff(&[3, 0]).re - want).abs() < 1e-12);
        assert!((next.coeff(&[-3, 0]).re - want).abs() < 1e-12);
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = GridSpec::torus2(16, 0.7).unwrap();
        let cfg = SolverConfig::new(g, 0.01, 0.05, InitialCondition::Shear { k: 1, amplitude: 0.0 }, 0).unwrap();
        let traj = run(&cfg).unwrap();
        assert!(traj.norms().iter().all(|s| s.l2 == 0.0 && s.sup == 0.0));
    }

    #[test]
    fn closing_step_lands_on_t_end() {
        let mut cfg = shear(16, 1.0).with_flow_scale(0.0).unwrap();
        cfg.dt = 0.03;
        let traj = run(&cfg).unwrap();
        let last = traj.norms().last().unwrap();
        assert_eq!(last.t, 0.1);
        assert!((last.sup - (-0.3f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn t_end_zero_gives_single_snapshot() {
        let mut cfg = shear(16, 1.0);
        cfg.t_end = 0.0;
        let traj = run(&cfg).unwrap();
        assert_eq!(traj.snapshots().len(), 1);
        assert_eq!(traj.norms().len(), 1);
    }

    #[test]
    fn shear_is_a_steady_nonlinear_state() {
        // u is parallel to the level lines of a single mode, so only dissipation acts
        let cfg = shear(32, 0.8);
        let traj = run(&cfg).unwrap();
        let last = traj.norms().last().unwrap();
        let want = (-(3f64).powf(0.8) * 0.1).exp() * traj.norms()[0].sup;
        assert!((last.sup - want).abs() < 1e-12);
    }

    #[test]
    fn cfl_violation_is_reported() {
        let g = GridSpec::torus2(32, 0.8).unwrap();
        let ic = InitialCondition::RandomHk { k_min: 1.0, k_max: 6.0, slope: 0.0, amplitude: 5.0 };
        let cfg = SolverConfig::new(g, 0.5, 1.0, ic, 1).unwrap();
        let err = run(&cfg).unwrap_err();
        assert!(matches!(err.error, Error::Cfl { .. }));
        assert_eq!(err.at_time, 0.0);
        assert_eq!(err.partial.snapshots().len(), 1);
    }

    #[test]
    fn runs_are_deterministic_and_conserve_mean() {
        let g = GridSpec::torus2(32, 0.8).unwrap();
        let ic = InitialCondition::GaussianVortices { count: 3, width: 0.6, amplitude: 1.0 };
        let cfg = SolverConfig::new(g, 0.005, 0.1, ic, 5).unwrap().with_snapshot_every(5);
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.norms(), b.norms());
        for (_, f) in a.snapshots() {
            assert!(f.mean().abs() < 1e-13);
        }
        for w in a.norms().windows(2) {
            assert!(w[1].l2 <= w[0].l2 * (1.0 + 1e-10));
        }
    }

    #[test]
    fn rk2_agrees_with_euler_at_small_dt() {
        let g = GridSpec::torus2(32, 0.8).unwrap();
        let ic = InitialCondition::RandomHk { k_min: 1.0, k_max: 4.0, slope: 0.0, amplitude: 1.0 };
        let e = SolverConfig::new(g, 1e-3, 0.05, ic.clone(), 2).unwrap();
        let r = e.clone().with_scheme(Scheme::Rk2);
        let (a, b) = (run(&e).unwrap(), run(&r).unwrap());
        let d = a.norms().last().unwrap().sup - b.norms().last().unwrap().sup;
        assert!(d.abs() < 1e-3);
    }

    #[test]
    fn linear_flow_has_parabolic_scaling() {
        let alpha = 0.7;
        let r = 2.0;
        let ic = InitialCondition::RandomHk { k_min: 1.0, k_max: 5.0, slope: 0.5, amplitude: 1.0 };
        let g = GridSpec::torus2(32, alpha).unwrap();
        let base = SolverConfig::new(g, 0.01, 0.2, ic.clone(), 3).unwrap().with_flow_scale(0.0).unwrap();
        let a = run(&base).unwrap();
        // θ_r(x) = r^{-α} θ(r x) lives on the torus of side L/r
        let gr = g.with_length(g.length() / r).unwrap();
        let theta_r = ic.realize(g, 3).unwrap();
        let theta_r = RealField::new(gr, theta_r.samples().iter().map(|v| r.powf(-alpha) * v).collect()).unwrap();
        let mut scaled = base.clone();
        scaled.grid = gr;
        scaled.dt = 0.01 / r.powf(alpha);
        scaled.t_end = 0.2 / r.powf(alpha);
        let b = run_from(&scaled, &theta_r).unwrap();
        let fa = &a.snapshots().last().unwrap().1;
        let fb = &b.snapshots().last().unwrap().1;
        for (x, y) in fa.samples().iter().zip(fb.samples()) {
            assert!((r.powf(-alpha) * x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn level_set_check_is_trivial_above_sup() {
        let g = GridSpec::torus2(32, 0.8).unwrap();
        let ic = InitialCondition::RandomHk { k_min: 1.0, k_max: 4.0, slope: 0.0, amplitude: 1.0 };
        let cfg = SolverConfig::new(g, 0.01, 0.1, ic, 2).unwrap();
        let traj = run(&cfg).unwrap();
        let r = level_set_energy_check(&traj, traj.norms()[0].sup + 1.0, 0.0, 0.1, 0.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.satisfied);
        assert!(matches!(level_set_energy_check(&traj, 0.1, 0.0, 0.123, 0.0), Err(Error::MissingSnapshot(_))));
    }

    #[test]
    fn single_mode_decay_is_not_a_power_law() {
        let cfg = shear(16, 1.0).with_flow_scale(0.0).unwrap();
        let mut cfg = cfg;
        cfg.t_end = 0.5;
        let traj = run(&cfg).unwrap();
        let fit = decay_exponent(&traj, (0.02, 0.5)).unwrap();
        assert!(!fit.power_law);
        assert!(matches!(decay_exponent(&traj, (0.5, 0.2)), Err(Error::DegenerateWindow(_))));
    }
}
