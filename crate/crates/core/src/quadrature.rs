//! Gauss–Legendre rules and composite / adaptive panel integration.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Nodes per Gauss–Legendre panel.
pub const PANEL_NODES: usize = 32;

/// Smallest panel width produced by grading toward an endpoint singularity.
pub const GRADING_FLOOR: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("quadrature did not converge on [{a}, {b}]: estimated error {estimate:e}")]
pub struct QuadratureError {
    pub a: f64,
    pub b: f64,
    pub estimate: f64,
}

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_n` from Chebyshev-like
    /// starting guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Maps the rule to `[a, b]`, yielding `(s, w)` pairs.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.mapped(a, b).map(|(s, w)| w * f(s)).sum()
    }

    /// Panel-wise adaptive integration: each panel is accepted when the
    /// one-panel and two-half-panel estimates agree to `tol` (relative to the
    /// panel's magnitude, floored at 1), otherwise it is bisected up to
    /// `max_depth` times.
    pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        tol: f64,
        max_depth: u32,
        f: &mut F,
    ) -> Result<f64, QuadratureError> {
        if b <= a {
            return Ok(0.0);
        }
        let whole = self.integrate(a, b, &mut *f);
        self.refine(a, b, whole, tol, max_depth, f)
    }

    fn refine<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        f: &mut F,
    ) -> Result<f64, QuadratureError> {
        let m = 0.5 * (a + b);
        let left = self.integrate(a, m, &mut *f);
        let right = self.integrate(m, b, &mut *f);
        let estimate = libm::fabs(left + right - whole);
        let scale = libm::fabs(left) + libm::fabs(right);
        if estimate <= tol * scale.max(1.0) {
            return Ok(left + right);
        }
        if depth == 0 {
            return Err(QuadratureError { a, b, estimate });
        }
        Ok(self.refine(a, m, left, tol, depth - 1, f)? + self.refine(m, b, right, tol, depth - 1, f)?)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Breakpoints of `[a, b]` graded geometrically toward `s = 0`:
/// `a, …, b/8, b/4, b/2, b`, stopping once a piece would reach `a` or
/// [`GRADING_FLOOR`]. Assumes `0 ≤ a < b`.
pub fn graded_toward_zero(a: f64, b: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    pts.push(b);
    let mut h = b;
    while h * 0.5 > a && h * 0.5 >= GRADING_FLOOR {
        h *= 0.5;
        pts.push(h);
    }
    pts.push(a);
    pts.reverse();
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_exact_for_polynomials() {
        let gl = GaussLegendre::new(PANEL_NODES);
        let total: f64 = gl.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // x^62 over [0,1] is integrated exactly
        let v = gl.integrate(0.0, 1.0, |x| libm::pow(x, 62.0));
        assert!((v - 1.0 / 63.0).abs() < 1e-15);
        assert!(gl.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn small_rules_match_known_nodes() {
        let gl = GaussLegendre::new(2);
        assert!((gl.nodes()[1] - 1.0 / libm::sqrt(3.0)).abs() < 1e-15);
        let gl = GaussLegendre::new(3);
        assert!((gl.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_log_singularity() {
        let gl = GaussLegendre::new(PANEL_NODES);
        let mut f = |s: f64| s * libm::log(s);
        let mut total = 0.0;
        let pts = graded_toward_zero(0.0, 1.0);
        for w in pts.windows(2) {
            total += gl.integrate_adaptive(w[0], w[1], 1e-13, 20, &mut f).unwrap();
        }
        assert!((total + 0.25).abs() < 1e-14, "{total}");
    }

    #[test]
    fn adaptive_reports_failure() {
        let gl = GaussLegendre::new(4);
        let mut f = |s: f64| if s < 0.3 { 0.0 } else { 1.0 };
        let err = gl.integrate_adaptive(0.0, 1.0, 1e-15, 2, &mut f).unwrap_err();
        assert!(err.estimate > 0.0);
    }

    #[test]
    fn grading_breakpoints() {
        let p = graded_toward_zero(0.1, 1.0);
        assert_eq!(p, alloc::vec![0.1, 0.125, 0.25, 0.5, 1.0]);
        let p = graded_toward_zero(0.0, 1.0);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[1], GRADING_FLOOR);
    }
}
