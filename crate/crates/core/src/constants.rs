//! The explicit constants of the oscillation argument as functions of `α`
//! (and of `α₀` in the small-`α` regime), their admissibility window and
//! the inequalities they must satisfy.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::degiorgi::{k_plus, q4_measure, S_CAP};
use crate::error::{Error, Result};
use crate::extension::{lambda_estimate, BarrierSpec};

/// One lower bound on `c₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub name: &'static str,
    pub value: f64,
}

/// `(lower, upper)` with every bound that was applied.
#[derive(Debug, Clone, PartialEq)]
pub struct C0Window {
    pub lower: f64,
    pub upper: f64,
    pub bounds: Vec<Bound>,
    /// Name of the largest lower bound.
    pub binding: &'static str,
    pub empty: bool,
}

impl C0Window {
    pub fn contains(&self, c0: f64) -> bool {
        c0 > self.lower && c0 < self.upper
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// `32 / 64^{1/α}`.
pub fn scaling_bound(alpha: f64) -> f64 {
    32.0 / 64f64.powf(1.0 / alpha)
}

/// `32^{1 − 1/α}`.
pub fn shrink_bound(alpha: f64) -> f64 {
    32f64.powf(1.0 - 1.0 / alpha)
}

/// `2^{-1/α₀}`.
pub fn a_positive_bound(alpha0: f64) -> f64 {
    2f64.powf(-1.0 / alpha0)
}

/// The window of admissible `c₀`. With `α₀` the condition `A > 0` is
/// imposed exactly: a lower bound for `α₀ < 1/2`, an upper bound for
/// `α₀ > 1/2`, and an empty window at `α₀ = 1/2`.
pub fn admissible_c0(alpha: f64, alpha0: Option<f64>) -> Result<C0Window> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    let mut bounds = alloc::vec![
        Bound { name: "scaling", value: scaling_bound(alpha) },
        Bound { name: "shrink", value: shrink_bound(alpha) },
    ];
    let mut upper = 1.0f64;
    let mut forced_empty = false;
    if let Some(a0) = alpha0 {
        if !(a0 > 0.0 && a0 <= alpha) {
            return Err(Error::OutOfRange { name: "alpha0", value: a0 });
        }
        let b = a_positive_bound(a0);
        if a0 < 0.5 {
            bounds.push(Bound { name: "a_positive", value: b });
        } else if a0 > 0.5 {
            upper = upper.min(b);
        } else {
            forced_empty = true;
        }
    }
    let top = bounds.iter().copied().fold(Bound { name: "none", value: f64::NEG_INFINITY }, |acc, b| {
        if b.value > acc.value {
            b
        } else {
            acc
        }
    });
    Ok(C0Window { lower: top.value, upper, bounds, binding: top.name, empty: forced_empty || top.value >= upper })
}

/// Where `λ` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSource {
    /// `1 − c₀^α`.
    Heuristic,
    /// `1 − sup_{B*_{c₀}} F` for the barrier with the ledger's `ω`.
    Barrier { n: usize },
    Given(f64),
}

/// Free parameters of [`derive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerOptions {
    pub alpha0: Option<f64>,
    /// `a` as a fraction of its supremum `4 / 2^{1/α}`.
    pub a_fraction: f64,
    /// Generic constant inside `ε̃`.
    pub generic_c: f64,
    /// Velocity bound `C_u` inside `B`.
    pub c_u: f64,
    /// `S` entering `K⁺`.
    pub s: f64,
    /// Space dimension for `|Q₄*|`.
    pub n: usize,
    /// Barrier half-width; defaults to `1 − c₀`, the middle of `(0, 2(1 − c₀))`.
    pub omega: Option<f64>,
    pub lambda: LambdaSource,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        Self {
            alpha0: None,
            a_fraction: 0.99,
            generic_c: 1.0,
            c_u: 1.0,
            s: S_CAP,
            n: 2,
            omega: None,
            lambda: LambdaSource::Heuristic,
        }
    }
}

/// A named inequality `lhs < rhs`; `slack = rhs − lhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl Verdict {
    pub fn strict(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self { name, lhs, rhs, slack, holds: slack > 0.0 }
    }
}

/// Every constant of the chain at one `(α, c₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsLedger {
    pub alpha: f64,
    pub epsilon: f64,
    pub alpha0: Option<f64>,
    pub c0: f64,
    pub omega: f64,
    pub r0: f64,
    pub a: f64,
    pub a_max: f64,
    /// `c₀² a / 128`.
    pub shrink: f64,
    pub lambda: f64,
    /// `λ 2^{-K⁺}`; underflows to zero for realistic `K⁺`.
    pub lambda_star: f64,
    /// `log₂ λ*`, exact even when `λ*` underflows.
    pub lambda_star_log2: f64,
    pub lambda_starstar: f64,
    pub eta: f64,
    pub c1: f64,
    pub c_alpha: f64,
    pub s: f64,
    pub q4: f64,
    pub k_plus: u64,
    pub epsilon_tilde: f64,
    pub a_lower: Option<f64>,
    pub b_upper: Option<f64>,
    pub window: C0Window,
}

/// `r₀ = c₀ / 64^{1/α}`.
pub fn r0_of(alpha: f64, c0: f64) -> f64 {
    c0 / 64f64.powf(1.0 / alpha)
}

/// `4 / 2^{1/α}`.
pub fn a_max(alpha: f64) -> f64 {
    4.0 / 2f64.powf(1.0 / alpha)
}

/// `256 (128 / (a c₀²))^α`.
pub fn c_alpha_of(alpha: f64, a: f64, c0: f64) -> f64 {
    256.0 * (128.0 / (a * c0 * c0)).powf(alpha)
}

/// `1 / (C 2^{7(ε − α)/α})`.
pub fn epsilon_tilde_of(alpha: f64, generic_c: f64) -> f64 {
    let eps = 1.0 - alpha;
    1.0 / (generic_c * 2f64.powf(7.0 * (eps - alpha) / alpha))
}

/// `λ** = λ(1 − λ*) + λ*`.
pub fn lambda_starstar_of(lambda: f64, lambda_star: f64) -> f64 {
    lambda * (1.0 - lambda_star) + lambda_star
}

pub fn derive(alpha: f64, c0: f64, opts: &LedgerOptions) -> Result<ConstantsLedger> {
    let window = admissible_c0(alpha, opts.alpha0)?;
    if window.empty || !window.contains(c0) {
        return Err(Error::OutOfRange { name: "c0", value: c0 });
    }
    if !(opts.a_fraction > 0.0 && opts.a_fraction < 1.0) {
        return Err(Error::OutOfRange { name: "a_fraction", value: opts.a_fraction });
    }
    let epsilon = 1.0 - alpha;
    let omega = opts.omega.unwrap_or(1.0 - c0);
    let a_sup = a_max(alpha);
    let a = opts.a_fraction * a_sup;
    let lambda = match opts.lambda {
        LambdaSource::Heuristic => 1.0 - c0.powf(alpha),
        LambdaSource::Barrier { n } => lambda_estimate(&BarrierSpec::new(omega, c0, n, alpha)?)?,
        LambdaSource::Given(l) => l,
    };
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::OutOfRange { name: "lambda", value: lambda });
    }
    let q4 = q4_measure(opts.n, alpha);
    let kp = k_plus(opts.s, q4)?;
    let lambda_star_log2 = lambda.log2() - kp as f64;
    let lambda_star = 2f64.powf(lambda_star_log2);
    let lambda_starstar = lambda_starstar_of(lambda, lambda_star);
    let (a_lower, b_upper) = match opts.alpha0 {
        Some(a0) => (
            Some(1.0 - (2f64.powf(1.0 / a0) * c0).powf(2.0 * a0 - 1.0)),
            Some(opts.c_u * 2f64.powf(17.0 / a0)),
        ),
        None => (None, None),
    };
    Ok(ConstantsLedger {
        alpha,
        epsilon,
        alpha0: opts.alpha0,
        c0,
        omega,
        r0: r0_of(alpha, c0),
        a,
        a_max: a_sup,
        shrink: c0 * c0 * a / 128.0,
        lambda,
        lambda_star,
        lambda_star_log2,
        lambda_starstar,
        eta: eta_from_lambda(lambda_starstar, None)?.eta,
        c1: 64.0 / c0,
        c_alpha: c_alpha_of(alpha, a, c0),
        s: opts.s,
        q4,
        k_plus: kp,
        epsilon_tilde: epsilon_tilde_of(alpha, opts.generic_c),
        a_lower,
        b_upper,
        window,
    })
}

/// Verdicts of the chain with the overall result.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub verdicts: Vec<Verdict>,
    pub all_hold: bool,
}

pub fn chain_check(l: &ConstantsLedger) -> ChainReport {
    let ra = l.r0.powf(l.alpha);
    let verdicts = alloc::vec![
        Verdict::strict("2(1-eta) < 256 r0^alpha", 2.0 * (1.0 - l.eta), 256.0 * ra),
        Verdict::strict("r0 < c0^2 a/128", l.r0, l.c0 * l.c0 * l.a / 128.0),
        Verdict::strict("r0^-alpha < C1", 1.0 / ra, l.c1),
        Verdict::strict("r0 < c0^2/(2^(1/alpha) 32)", l.r0, l.c0 * l.c0 / (2f64.powf(1.0 / l.alpha) * 32.0)),
        Verdict::strict("c0/128^(1/alpha) < r0", l.c0 / 128f64.powf(1.0 / l.alpha), l.r0),
    ];
    let all_hold = verdicts.iter().all(|v| v.holds);
    ChainReport { verdicts, all_hold }
}

/// `η = λ**/2` and, given `λ`, the bracket `(λ/2, λ)` implied by
/// `λ < λ** < 2λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaEstimate {
    pub eta: f64,
    pub bracket: Option<(f64, f64)>,
}

pub fn eta_from_lambda(lambda_starstar: f64, lambda: Option<f64>) -> Result<EtaEstimate> {
    if !(lambda_starstar > 0.0 && lambda_starstar < 1.0) {
        return Err(Error::OutOfRange { name: "lambda_starstar", value: lambda_starstar });
    }
    let bracket = match lambda {
        Some(l) if l > 0.0 && l < 1.0 => Some((0.5 * l, l)),
        Some(l) => return Err(Error::OutOfRange { name: "lambda", value: l }),
        None => None,
    };
    Ok(EtaEstimate { eta: 0.5 * lambda_starstar, bracket })
}
