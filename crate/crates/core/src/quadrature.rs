//! Gauss–Legendre rules and a globally adaptive bisection integrator.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Fixed-order rule on `[-1, 1]`, nodes found by Newton iteration on the
/// Legendre recurrence.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..(order + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, w * half))
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Value and error estimate of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive integrator: the panel with the largest local error
/// (difference between one rule application and two half-panel ones) is
/// bisected until the summed error meets the tolerance.
#[derive(Debug, Clone)]
pub struct Adaptive {
    rule: GaussLegendre,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self::new(1e-12, 1e-300)
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Adaptive {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rule: GaussLegendre::new(15), rel_tol, abs_tol, max_panels: 4000 }
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    fn panel(&self, a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> Panel {
        let m = 0.5 * (a + b);
        let whole = self.rule.integrate(a, b, &mut *f);
        let left = self.rule.integrate(a, m, &mut *f);
        let right = self.rule.integrate(m, b, &mut *f);
        Panel { a, b, value: left + right, error: (whole - left - right).abs() }
    }

    /// Integrates over `[a, b]` starting from `initial` equal panels. Returns
    /// the estimate even when the tolerance was not met.
    pub fn estimate(&self, a: f64, b: f64, initial: usize, mut f: impl FnMut(f64) -> f64) -> Estimate {
        let initial = initial.max(1);
        let width = (b - a) / initial as f64;
        let mut panels: Vec<Panel> = (0..initial)
            .map(|i| {
                let lo = a + width * i as f64;
                let hi = if i + 1 == initial { b } else { lo + width };
                self.panel(lo, hi, &mut f)
            })
            .collect();
        loop {
            let value: f64 = panels.iter().map(|p| p.value).sum();
            let error: f64 = panels.iter().map(|p| p.error).sum();
            let tol = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= tol || panels.len() >= self.max_panels {
                return Estimate { value, error };
            }
            let (worst, _) = panels
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
            let p = panels.swap_remove(worst);
            let m = 0.5 * (p.a + p.b);
            if m <= p.a || m >= p.b {
                // panel no longer divisible in floating point
                panels.push(Panel { error: 0.0, ..p });
                continue;
            }
            panels.push(self.panel(p.a, m, &mut f));
            panels.push(self.panel(m, p.b, &mut f));
        }
    }

    /// Like [`Adaptive::estimate`] but fails when the error estimate exceeds
    /// `accept` times the requested tolerance.
    pub fn integrate(&self, a: f64, b: f64, initial: usize, f: impl FnMut(f64) -> f64) -> Result<f64> {
        let est = self.estimate(a, b, initial, f);
        let tol = self.abs_tol.max(self.rel_tol * est.value.abs());
        if est.error.is_finite() && est.value.is_finite() && est.error <= 100.0 * tol {
            Ok(est.value)
        } else {
            Err(Error::Quadrature { estimate: est.error })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(10);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(19));
        assert!((v - 2f64.powi(20) / 20.0).abs() < 1e-9 * v);
        assert!((gl.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = Adaptive::new(1e-11, 0.0);
        let v = q.integrate(0.0, 1.0, 4, |x| x.powf(-0.6)).unwrap();
        assert!((v - 2.5).abs() < 1e-9, "{v}");
    }

    #[test]
    fn adaptive_finds_narrow_peak() {
        let q = Adaptive::new(1e-12, 0.0);
        let v = q.integrate(-20.0, 20.0, 8, |x| (-(x - 3.1) * (x - 3.1) * 400.0).exp()).unwrap();
        let exact = (PI / 400.0).sqrt();
        assert!((v - exact).abs() < 1e-12 * exact * 10.0);
    }
}
