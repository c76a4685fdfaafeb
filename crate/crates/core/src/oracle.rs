//! Independent finite-difference solver used to cross-check the series.
//!
//! Second-order central differences on a uniform grid, a regularity row at
//! `x = 0`, damped Newton on the coupled system and a banded LU solve. It
//! shares nothing with the series machinery except the expression
//! evaluator.

use alloc::vec;
use alloc::vec::Vec;

use crate::expr::{eval_scalar, eval_series, EvalError, Expression};
use crate::series::{SeriesError, TruncatedSeries};
use crate::solver::{LeftBc, ProblemSpec, SolveError};

pub const MIN_INTERVALS: usize = 16;
const MAX_HALVINGS: usize = 20;
/// Lower and upper bandwidth of the interleaved Jacobian.
const KL: usize = 4;
const KU: usize = 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    InvalidProblem(#[from] SolveError),
    #[error("the oracle needs at least {MIN_INTERVALS} intervals, got {0}")]
    TooFewIntervals(usize),
    #[error("component {component}: right-hand side failed at x={x}: {source}")]
    Eval {
        component: usize,
        x: f64,
        #[source]
        source: EvalError,
    },
    #[error("singular Jacobian at row {row}")]
    SingularJacobian { row: usize },
    #[error("Newton did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub nodes: Vec<f64>,
    pub values: [Vec<f64>; 2],
    pub iterations: usize,
    /// Max norm of the discrete residual at the returned iterate.
    pub residual: f64,
}

impl OracleSolution {
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Component `c` at `x`, by cubic interpolation through the four
    /// nearest nodes.
    pub fn eval(&self, c: usize, x: f64) -> f64 {
        let m = self.intervals();
        let h = 1.0 / m as f64;
        let k = libm::floor(x / h) as isize;
        let start = (k - 1).clamp(0, m as isize - 3) as usize;
        let ys = &self.values[c];
        let mut acc = 0.0;
        for i in start..start + 4 {
            let mut w = 1.0;
            for j in start..start + 4 {
                if j != i {
                    w *= (x - self.nodes[j]) / (self.nodes[i] - self.nodes[j]);
                }
            }
            acc += w * ys[i];
        }
        acc
    }
}

/// Band storage: row `i` keeps columns `i − KL ..= i + KU + KL`, leaving
/// room for pivoting fill-in.
struct Band {
    n: usize,
    data: Vec<f64>,
}

impl Band {
    const WIDTH: usize = 2 * KL + KU + 1;

    fn new(n: usize) -> Self {
        Self { n, data: vec![0.0; n * Self::WIDTH] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + KL >= i && j <= i + KU + KL);
        i * Self::WIDTH + (j + KL - i)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Gaussian elimination with partial pivoting, applied to `rhs` on the
    /// fly; returns the solution in `rhs`.
    fn solve(mut self, rhs: &mut [f64]) -> Result<(), OracleError> {
        let n = self.n;
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
        for k in 0..n {
            let last_row = (k + KL).min(n - 1);
            let last_col = (k + KL + KU).min(n - 1);
            let mut p = k;
            for r in k + 1..=last_row {
                if libm::fabs(self.get(r, k)) > libm::fabs(self.get(p, k)) {
                    p = r;
                }
            }
            let pivot = self.get(p, k);
            if !(libm::fabs(pivot) > 1e-14 * scale) {
                return Err(OracleError::SingularJacobian { row: k });
            }
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.get(k, j), self.get(p, j));
                    self.set(k, j, b);
                    self.set(p, j, a);
                }
                rhs.swap(k, p);
            }
            for r in k + 1..=last_row {
                let factor = self.get(r, k) / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in k..=last_col {
                    let v = self.get(k, j);
                    self.add(r, j, -factor * v);
                }
                rhs[r] -= factor * rhs[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + KL + KU).min(n - 1);
            let mut acc = rhs[k];
            for j in k + 1..=last_col {
                acc -= self.get(k, j) * rhs[j];
            }
            rhs[k] = acc / self.get(k, k);
        }
        Ok(())
    }
}

struct Discretization<'a> {
    p: &'a ProblemSpec,
    m: usize,
    h: f64,
}

impl Discretization<'_> {
    fn x(&self, k: usize) -> f64 {
        if k == self.m {
            1.0
        } else {
            k as f64 * self.h
        }
    }

    fn f(&self, c: usize, k: usize, y: &[f64]) -> Result<f64, OracleError> {
        let x = self.x(k);
        eval_scalar(&self.p.components[c].rhs, x, y[2 * k], y[2 * k + 1])
            .map_err(|source| OracleError::Eval { component: c + 1, x, source })
    }

    /// `(∂f_c/∂y1, ∂f_c/∂y2)` at node `k`.
    fn df(&self, c: usize, k: usize, y: &[f64]) -> Result<(f64, f64), OracleError> {
        let x = self.x(k);
        let rhs: &Expression = &self.p.components[c].rhs;
        let (v1, v2) = (y[2 * k], y[2 * k + 1]);
        let wrap = |e: SeriesError| {
            let source = match e {
                SeriesError::SingularDivision { .. } => EvalError::DivisionByZero { x, y1: v1, y2: v2 },
                _ => EvalError::NonFinite { x, y1: v1, y2: v2 },
            };
            OracleError::Eval { component: c + 1, x, source }
        };
        let series = |a: f64, b: f64| TruncatedSeries::new(vec![a, b]).expect("finite seeds");
        let d1 = eval_series(rhs, x, &series(v1, 1.0), &series(v2, 0.0)).map_err(wrap)?.coeff(1);
        let d2 = eval_series(rhs, x, &series(v1, 0.0), &series(v2, 1.0)).map_err(wrap)?.coeff(1);
        Ok((d1, d2))
    }

    fn residual(&self, y: &[f64]) -> Result<Vec<f64>, OracleError> {
        let (m, h) = (self.m, self.h);
        let h2 = h * h;
        let mut out = vec![0.0; 2 * (m + 1)];
        for c in 0..2 {
            let spec = &self.p.components[c];
            let alpha = spec.alpha();
            let at = |k: usize| y[2 * k + c];
            out[c] = match spec.left {
                LeftBc::Dirichlet(u0) => at(0) - u0,
                // mirror node y_{-1} = y_1 in the regularity limit (1+α)y''(0) = f
                LeftBc::Neumann0 => (1.0 + alpha) * 2.0 * (at(1) - at(0)) / h2 - self.f(c, 0, y)?,
            };
            for k in 1..m {
                let second = (at(k + 1) - 2.0 * at(k) + at(k - 1)) / h2;
                let first = (at(k + 1) - at(k - 1)) / (2.0 * h);
                out[2 * k + c] = second + alpha / self.x(k) * first - self.f(c, k, y)?;
            }
            let r = spec.right;
            let slope = (3.0 * at(m) - 4.0 * at(m - 1) + at(m - 2)) / (2.0 * h);
            out[2 * m + c] = r.a * at(m) + r.b * slope - r.c;
        }
        Ok(out)
    }

    fn jacobian(&self, y: &[f64]) -> Result<Band, OracleError> {
        let (m, h) = (self.m, self.h);
        let h2 = h * h;
        let mut jac = Band::new(2 * (m + 1));
        for c in 0..2 {
            let spec = &self.p.components[c];
            let alpha = spec.alpha();
            let col = |k: usize| 2 * k + c;
            let nonlinear = |jac: &mut Band, row: usize, k: usize| -> Result<(), OracleError> {
                let (d1, d2) = self.df(c, k, y)?;
                jac.add(row, 2 * k, -d1);
                jac.add(row, 2 * k + 1, -d2);
                Ok(())
            };
            match spec.left {
                LeftBc::Dirichlet(_) => jac.add(c, col(0), 1.0),
                LeftBc::Neumann0 => {
                    let w = (1.0 + alpha) * 2.0 / h2;
                    jac.add(c, col(0), -w);
                    jac.add(c, col(1), w);
                    nonlinear(&mut jac, c, 0)?;
                }
            }
            for k in 1..m {
                let row = 2 * k + c;
                let drift = alpha / self.x(k) / (2.0 * h);
                jac.add(row, col(k - 1), 1.0 / h2 - drift);
                jac.add(row, col(k), -2.0 / h2);
                jac.add(row, col(k + 1), 1.0 / h2 + drift);
                nonlinear(&mut jac, row, k)?;
            }
            let r = spec.right;
            let row = 2 * m + c;
            jac.add(row, col(m), r.a + r.b * 1.5 / h);
            if r.b != 0.0 {
                jac.add(row, col(m - 1), -r.b * 2.0 / h);
                jac.add(row, col(m - 2), r.b * 0.5 / h);
            }
        }
        Ok(jac)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)))
}

/// Solves the problem on `m` uniform intervals by damped Newton from the
/// affine baselines, to a max-norm residual of `newton_tol`.
pub fn fd_solve(p: &ProblemSpec, m: usize, newton_tol: f64, max_iters: usize) -> Result<OracleSolution, OracleError> {
    p.validate()?;
    if m < MIN_INTERVALS {
        return Err(OracleError::TooFewIntervals(m));
    }
    let d = Discretization { p, m, h: 1.0 / m as f64 };
    let nodes: Vec<f64> = (0..=m).map(|k| d.x(k)).collect();
    let base = [p.components[0].baseline(), p.components[1].baseline()];
    let mut y: Vec<f64> = nodes.iter().flat_map(|&x| [base[0].eval(x), base[1].eval(x)]).collect();

    let mut res = d.residual(&y)?;
    let mut norm = max_abs(&res);
    let mut iterations = 0;
    while !(norm <= newton_tol) {
        if iterations == max_iters {
            return Err(OracleError::NoConvergence { iterations, residual: norm });
        }
        iterations += 1;
        let mut step: Vec<f64> = res.iter().map(|r| -r).collect();
        d.jacobian(&y)?.solve(&mut step)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = y.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            // a pole along the step counts as a rejected trial
            if let Ok(r) = d.residual(&trial) {
                let n = max_abs(&r);
                if n < norm {
                    y = trial;
                    res = r;
                    norm = n;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(OracleError::NoConvergence { iterations, residual: norm });
        }
    }
    let values = [y.iter().step_by(2).copied().collect(), y.iter().skip(1).step_by(2).copied().collect()];
    Ok(OracleSolution { nodes, values, iterations, residual: norm })
}
