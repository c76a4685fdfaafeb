//! Residuals of partial sums and the contraction-based error bound.
//!
//! The residual of component `i` is `|Lψ_{i,n} − f_i(x, ψ_{1,n}, ψ_{2,n})|`
//! with `f_i` exactly the right-hand side of the problem. Two ways of
//! computing `Lψ` are offered:
//!
//! * [`ResidualMethod::Spectral`] differentiates the partial sum (spectral
//!   differentiation on the grid backend, exact on the polynomial one);
//! * [`ResidualMethod::AdomianIdentity`] uses `Lψ_{i,n} = Σ_{j<n} A_{i,j}`,
//!   which holds term by term and avoids differentiation altogether.

use alloc::vec::Vec;

use crate::adomian::{adomian_coefficients, AdomianError};
use crate::expr::{eval_scalar, EvalError, Expression};
use crate::kernels::{kernel_bound_m, KernelError};
use crate::search::scan_then_golden;
use crate::solver::{build_baseline, Profile, SolutionSeries, SolveError};

/// Relative inflation applied to sampled Lipschitz constants.
pub const LIPSCHITZ_SAFETY: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("component {component}: {source}")]
    Eval {
        component: usize,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Adomian(#[from] AdomianError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("error bound inapplicable: gamma = {gamma} is not below 1")]
    BoundInapplicable { gamma: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualMethod {
    Spectral,
    #[default]
    AdomianIdentity,
}

/// Which quantity is maximised by [`max_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxResidualForm {
    /// `r(x)` itself.
    #[default]
    Plain,
    /// `x^α·r(x)`, the residual of the divergence form `(x^α ψ')' = x^α f`.
    Divergence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxResidualOptions {
    pub method: ResidualMethod,
    pub form: MaxResidualForm,
    /// Search interval.
    pub interval: (f64, f64),
    /// Uniform samples before refinement.
    pub points: usize,
}

impl Default for MaxResidualOptions {
    fn default() -> Self {
        Self { method: ResidualMethod::default(), form: MaxResidualForm::default(), interval: (0.001, 0.999), points: 901 }
    }
}

/// Pointwise residual evaluator for a fixed partial sum.
pub struct ResidualEvaluator<'a> {
    sol: &'a SolutionSeries,
    n: usize,
    method: ResidualMethod,
    profiles: Option<[Profile; 2]>,
}

impl<'a> ResidualEvaluator<'a> {
    pub fn new(sol: &'a SolutionSeries, n: usize, method: ResidualMethod) -> Result<Self, AnalysisError> {
        if n > sol.n_terms() {
            return Err(SolveError::TermOutOfRange { requested: n, available: sol.n_terms() }.into());
        }
        let profiles = match method {
            ResidualMethod::Spectral => Some([sol.profile(0, n)?, sol.profile(1, n)?]),
            ResidualMethod::AdomianIdentity => None,
        };
        Ok(Self { sol, n, method, profiles })
    }

    /// `[r_1(x), r_2(x)]`.
    pub fn at(&self, x: f64) -> Result<[f64; 2], AnalysisError> {
        let p = self.sol.problem();
        match self.method {
            ResidualMethod::Spectral => {
                let profiles = self.profiles.as_ref().expect("built for the spectral method");
                let (v1, a1, b1) = profiles[0].eval(x);
                let (v2, a2, b2) = profiles[1].eval(x);
                let mut out = [0.0; 2];
                for (c, (d1, d2)) in [(a1, b1), (a2, b2)].into_iter().enumerate() {
                    let alpha = p.components[c].alpha();
                    // regularity limit ψ'' + (α/x)ψ' → (1+α)ψ''(0)
                    let l = if x == 0.0 { (1.0 + alpha) * d2 } else { d2 + alpha / x * d1 };
                    let f = eval_component(&p.components[c].rhs, c, x, v1, v2)?;
                    out[c] = libm::fabs(l - f);
                }
                Ok(out)
            }
            ResidualMethod::AdomianIdentity => {
                let [t1, t2] = self.sol.term_values(self.n, x)?;
                let psi1: f64 = t1.iter().sum();
                let psi2: f64 = t2.iter().sum();
                let mut out = [0.0; 2];
                for (c, out_c) in out.iter_mut().enumerate() {
                    let rhs = &p.components[c].rhs;
                    let l: f64 = if self.n == 0 {
                        0.0
                    } else {
                        adomian_coefficients(rhs, x, &t1[..self.n], &t2[..self.n])?.iter().sum()
                    };
                    let f = eval_component(rhs, c, x, psi1, psi2)?;
                    *out_c = libm::fabs(l - f);
                }
                Ok(out)
            }
        }
    }

    /// The maximised quantity of `form` at `x`.
    pub fn weighted_at(&self, x: f64, form: MaxResidualForm) -> Result<[f64; 2], AnalysisError> {
        let mut r = self.at(x)?;
        if form == MaxResidualForm::Divergence {
            for (c, rc) in r.iter_mut().enumerate() {
                *rc *= weight(x, self.sol.problem().components[c].alpha());
            }
        }
        Ok(r)
    }
}

fn weight(x: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        libm::pow(x, alpha)
    }
}

fn eval_component(rhs: &Expression, c: usize, x: f64, y1: f64, y2: f64) -> Result<f64, AnalysisError> {
    eval_scalar(rhs, x, y1, y2).map_err(|source| AnalysisError::Eval { component: c + 1, source })
}

/// `[r_{1,n}(x), r_{2,n}(x)]` for each `x` in `xs`.
pub fn residual(sol: &SolutionSeries, n: usize, xs: &[f64], method: ResidualMethod) -> Result<Vec<[f64; 2]>, AnalysisError> {
    let ev = ResidualEvaluator::new(sol, n, method)?;
    xs.iter().map(|&x| ev.at(x)).collect()
}

/// `[maxr_{1,n}, maxr_{2,n}]`: each component maximised separately over
/// the configured interval.
pub fn max_residual(sol: &SolutionSeries, n: usize, opts: &MaxResidualOptions) -> Result<[f64; 2], AnalysisError> {
    let (lo, hi) = opts.interval;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(AnalysisError::InvalidArgument("max-residual interval must satisfy 0 <= lo < hi <= 1"));
    }
    let ev = ResidualEvaluator::new(sol, n, opts.method)?;
    let mut out = [0.0; 2];
    for (c, o) in out.iter_mut().enumerate() {
        let (_, v) = scan_then_golden(lo, hi, opts.points, |x| ev.weighted_at(x, opts.form).map(|r| r[c]))?;
        *o = v;
    }
    Ok(out)
}

/// One per-point row of a [`ResidualReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub n: usize,
    pub x: f64,
    pub r: [f64; 2],
}

/// One summary row of a [`ResidualReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxResidualRow {
    pub n: usize,
    pub maxr: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub method: ResidualMethod,
    pub form: MaxResidualForm,
    pub points: Vec<ResidualRow>,
    pub maxima: Vec<MaxResidualRow>,
}

/// Pointwise residuals at `xs` and max residuals for every `n` in `ns`.
pub fn residual_report(
    sol: &SolutionSeries,
    ns: &[usize],
    xs: &[f64],
    opts: &MaxResidualOptions,
) -> Result<ResidualReport, AnalysisError> {
    let mut points = Vec::with_capacity(ns.len() * xs.len());
    let mut maxima = Vec::with_capacity(ns.len());
    for &n in ns {
        for (&x, r) in xs.iter().zip(residual(sol, n, xs, opts.method)?) {
            points.push(ResidualRow { n, x, r });
        }
        maxima.push(MaxResidualRow { n, maxr: max_residual(sol, n, opts)? });
    }
    Ok(ResidualReport { method: opts.method, form: opts.form, points, maxima })
}

/// Axis-aligned box `x × y1 × y2` for Lipschitz sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzBox {
    pub x: (f64, f64),
    pub y1: (f64, f64),
    pub y2: (f64, f64),
}

impl LipschitzBox {
    /// The range of all partial sums `ψ_{c,0..=n}` on `[0, 1]` (sampled at
    /// `samples` points), padded by 10% of its width on each side.
    pub fn from_solution(sol: &SolutionSeries, n: usize, samples: usize) -> Result<Self, AnalysisError> {
        let samples = samples.max(2);
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for k in 0..samples {
            let x = k as f64 / (samples - 1) as f64;
            let terms = sol.term_values(n, x)?;
            for c in 0..2 {
                let mut acc = 0.0;
                for t in &terms[c] {
                    acc += t;
                    lo[c] = lo[c].min(acc);
                    hi[c] = hi[c].max(acc);
                }
            }
        }
        let pad = |l: f64, h: f64| {
            let w = if h > l { 0.1 * (h - l) } else { 0.1 * libm::fabs(h).max(1.0) };
            (l - w, h + w)
        };
        Ok(Self { x: (0.0, 1.0), y1: pad(lo[0], hi[0]), y2: pad(lo[1], hi[1]) })
    }
}

/// `(l1, l2)`: `l_j` bounds `|∂f_i/∂y_j|` over both components on the box,
/// sampled on a `samples³` lattice with central differences and inflated
/// by [`LIPSCHITZ_SAFETY`].
pub fn lipschitz_estimate(
    f1: &Expression,
    f2: &Expression,
    bx: &LipschitzBox,
    samples: usize,
) -> Result<(f64, f64), AnalysisError> {
    let samples = samples.max(2);
    let axis = |(lo, hi): (f64, f64), k: usize| lo + (hi - lo) * k as f64 / (samples - 1) as f64;
    let step = |(lo, hi): (f64, f64)| {
        let range = hi - lo;
        if range > 0.0 {
            1e-6 * range
        } else {
            1e-6 * libm::fabs(lo).max(1.0)
        }
    };
    let (h1, h2) = (step(bx.y1), step(bx.y2));
    let mut l = [0.0f64; 2];
    for i in 0..samples {
        let x = axis(bx.x, i);
        for j in 0..samples {
            let y1 = axis(bx.y1, j);
            for k in 0..samples {
                let y2 = axis(bx.y2, k);
                for (c, f) in [f1, f2].into_iter().enumerate() {
                    let e = |a: f64, b: f64| eval_component(f, c, x, a, b);
                    let d1 = (e(y1 + h1, y2)? - e(y1 - h1, y2)?) / (2.0 * h1);
                    let d2 = (e(y1, y2 + h2)? - e(y1, y2 - h2)?) / (2.0 * h2);
                    l[0] = l[0].max(libm::fabs(d1));
                    l[1] = l[1].max(libm::fabs(d2));
                }
            }
        }
    }
    Ok((l[0] * LIPSCHITZ_SAFETY, l[1] * LIPSCHITZ_SAFETY))
}

/// Truncation bound `γⁿ·m/(1−γ)·max_f0` with `γ = 2ml`.
pub fn error_bound(m: f64, l: f64, max_f0: f64, n: usize) -> Result<f64, AnalysisError> {
    let gamma = 2.0 * m * l;
    if !(gamma < 1.0) {
        return Err(AnalysisError::BoundInapplicable { gamma });
    }
    if max_f0 == 0.0 {
        return Ok(0.0);
    }
    Ok(libm::pow(gamma, n as f64) * m / (1.0 - gamma) * max_f0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceEstimate {
    /// Kernel bound `m = max(m_1, m_2)`.
    pub m: f64,
    pub m_components: [f64; 2],
    pub l1: f64,
    pub l2: f64,
    pub l: f64,
    pub gamma: f64,
    /// `max_x max_i |f_i(x, y_{1,0}(x), y_{2,0}(x))|`.
    pub max_f0: f64,
    pub lipschitz_box: LipschitzBox,
    /// `(n, bound)`; `None` when `γ ≥ 1`.
    pub bounds: Vec<(usize, Option<f64>)>,
}

/// Samples used for `max_f0` and the default Lipschitz box.
const SAMPLES_ON_X: usize = 201;

/// Evaluates `m`, `l`, `γ` and the bounds for each `n` in `ns`. The
/// Lipschitz box defaults to [`LipschitzBox::from_solution`].
pub fn convergence_estimate(
    sol: &SolutionSeries,
    ns: &[usize],
    bx: Option<LipschitzBox>,
    lipschitz_samples: usize,
) -> Result<ConvergenceEstimate, AnalysisError> {
    let p = sol.problem();
    let m_components = [kernel_bound_m(&p.components[0].kernel()?)?, kernel_bound_m(&p.components[1].kernel()?)?];
    let m = m_components[0].max(m_components[1]);
    let bx = match bx {
        Some(b) => b,
        None => LipschitzBox::from_solution(sol, sol.n_terms(), SAMPLES_ON_X)?,
    };
    let (l1, l2) = lipschitz_estimate(&p.components[0].rhs, &p.components[1].rhs, &bx, lipschitz_samples)?;
    let l = l1.max(l2);
    let (b1, b2) = build_baseline(p);
    let mut max_f0 = 0.0f64;
    for k in 0..SAMPLES_ON_X {
        let x = k as f64 / (SAMPLES_ON_X - 1) as f64;
        let (y1, y2) = (b1.eval(x), b2.eval(x));
        for c in 0..2 {
            max_f0 = max_f0.max(libm::fabs(eval_component(&p.components[c].rhs, c, x, y1, y2)?));
        }
    }
    let bounds = ns.iter().map(|&n| (n, error_bound(m, l, max_f0, n).ok())).collect();
    Ok(ConvergenceEstimate { m, m_components, l1, l2, l, gamma: 2.0 * m * l, max_f0, lipschitz_box: bx, bounds })
}

/// `‖Ψ_{j+1} − Ψ_j‖ / ‖Ψ_j − Ψ_{j−1}‖` for `j = 1 … n_terms − 1`.
pub fn increment_ratios(sol: &SolutionSeries) -> Result<Vec<f64>, AnalysisError> {
    let norms: Vec<f64> = (1..=sol.n_terms()).map(|j| sol.increment_norm(j, SAMPLES_ON_X)).collect::<Result<_, _>>()?;
    Ok(norms.windows(2).map(|w| w[1] / w[0]).collect())
}
