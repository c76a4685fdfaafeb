//! The decomposition recursion
//!
//! ```text
//! y_{i,0} = baseline_i,   y_{i,j}(x) = ∫₀¹ G_i(x,s)·s^{α_i}·A_{i,j−1}(s) ds
//! ```
//!
//! and the partial sums `ψ_{i,n} = Σ_{j≤n} y_{i,j}`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::adomian::AdomianTableau;
use crate::chebyshev::ChebyshevGrid;
use crate::expr::{Algebra, Expression};
use crate::kernels::{kernel_polynomial_image, KernelError, KernelMatrix, KernelSpec};
use crate::poly::Polynomial;
use crate::series::SeriesError;

/// Default Chebyshev degree of the grid backend.
pub const DEFAULT_GRID_SIZE: usize = 64;
/// Highest polynomial degree the exact backend will produce.
pub const MAX_POLY_DEGREE: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operator {
    /// `y'' + (α/x)·y'`
    LaneEmden { alpha: f64 },
    /// `y''`
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeftBc {
    /// `y'(0) = 0`
    Neumann0,
    /// `y(0) = value`
    Dirichlet(f64),
}

/// `a·y(1) + b·y'(1) = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightBc {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Where the boundary data of a two-sided Dirichlet component enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaselineMode {
    /// Term 0 is the affine function meeting both conditions.
    #[default]
    Affine,
    /// Term 0 is the constant left value; the linear ramp joins term 1.
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    pub operator: Operator,
    pub left: LeftBc,
    pub right: RightBc,
    pub rhs: Expression,
}

impl ComponentSpec {
    /// Shape factor of the operator (0 for the flat operator).
    pub fn alpha(&self) -> f64 {
        match self.operator {
            Operator::LaneEmden { alpha } => alpha,
            Operator::Flat => 0.0,
        }
    }

    pub fn kernel(&self) -> Result<KernelSpec, SolveError> {
        let shift = self.right.b / self.right.a;
        let k = match self.left {
            LeftBc::Neumann0 => KernelSpec::lane_emden(self.alpha(), shift),
            LeftBc::Dirichlet(_) => KernelSpec::dirichlet_dirichlet(shift),
        };
        k.map_err(SolveError::Kernel)
    }

    /// The baseline term: `c/a` for a regular left end, otherwise the affine
    /// function with `y(0) = u0` and `a·y(1) + b·y'(1) = c`.
    pub fn baseline(&self) -> Polynomial {
        let RightBc { a, b, c } = self.right;
        match self.left {
            LeftBc::Neumann0 => Polynomial::constant(c / a),
            LeftBc::Dirichlet(u0) => Polynomial::new(vec![u0, (c - a * u0) / (a + b)]),
        }
    }

    fn validate(&self, index: usize) -> Result<(), SolveError> {
        let bad = |reason: &'static str| Err(SolveError::InvalidProblem { component: index + 1, reason });
        let RightBc { a, b, c } = self.right;
        if ![a, b, c].iter().all(|v| v.is_finite()) {
            return bad("boundary data must be finite");
        }
        if a == 0.0 {
            return bad("coefficient a of the right condition must be non-zero");
        }
        if b / a < 0.0 {
            return bad("b/a must be non-negative");
        }
        match (self.operator, self.left) {
            (Operator::LaneEmden { alpha }, _) if !(alpha >= 0.0 && alpha.is_finite()) => bad("alpha must be non-negative"),
            (Operator::LaneEmden { alpha }, LeftBc::Dirichlet(_)) if alpha != 0.0 => {
                bad("a singular operator needs the regularity condition y'(0) = 0")
            }
            (_, LeftBc::Dirichlet(u0)) if !u0.is_finite() => bad("boundary data must be finite"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub components: [ComponentSpec; 2],
    pub baseline_mode: BaselineMode,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), SolveError> {
        for (i, c) in self.components.iter().enumerate() {
            c.validate(i)?;
        }
        Ok(())
    }

    pub fn rhs(&self) -> [&Expression; 2] {
        [&self.components[0].rhs, &self.components[1].rhs]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("component {component}: {reason}")]
    InvalidProblem { component: usize, reason: &'static str },
    #[error("component {component}: nonlinearity could not be expanded at x={x} ({source})")]
    Nonlinearity {
        component: usize,
        x: f64,
        #[source]
        source: SeriesError,
    },
    #[error("unsupported backend: {0}")]
    UnsupportedBackend(&'static str),
    #[error("component {component}: term {term} reached degree {degree}, above the cap of {MAX_POLY_DEGREE}")]
    DegreeCap { component: usize, term: usize, degree: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("partial sum {requested} requested but only {available} terms were computed")]
    TermOutOfRange { requested: usize, available: usize },
    #[error("x={0} is outside [0, 1]")]
    OutsideDomain(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Chebyshev–Lobatto grid with `grid_size + 1` nodes.
    Grid { grid_size: usize },
    /// Exact polynomial terms; needs polynomial right-hand sides.
    ExactPolynomial,
}

#[derive(Debug, Clone)]
pub enum Terms {
    Grid {
        grid: Arc<ChebyshevGrid>,
        /// `values[c][j][k]`: term `j` of component `c` at node `k`.
        values: [Vec<Vec<f64>>; 2],
        adomian: AdomianTableau,
    },
    Polynomial {
        terms: [Vec<Polynomial>; 2],
        adomian: [Vec<Polynomial>; 2],
    },
}

/// Derivatives of a partial sum, ready for pointwise evaluation.
#[derive(Debug, Clone)]
pub enum Profile {
    Grid { grid: Arc<ChebyshevGrid>, value: Vec<f64>, d1: Vec<f64>, d2: Vec<f64> },
    Polynomial { value: Polynomial, d1: Polynomial, d2: Polynomial },
}

impl Profile {
    /// `(ψ(x), ψ'(x), ψ''(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        match self {
            Profile::Grid { grid, value, d1, d2 } => {
                let row = grid.cardinal_row(x);
                let dot = |v: &[f64]| row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
                (dot(value), dot(d1), dot(d2))
            }
            Profile::Polynomial { value, d1, d2 } => (value.eval(x), d1.eval(x), d2.eval(x)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolutionSeries {
    problem: ProblemSpec,
    terms: Terms,
}

impl SolutionSeries {
    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn backend(&self) -> Backend {
        match &self.terms {
            Terms::Grid { grid, .. } => Backend::Grid { grid_size: grid.degree() },
            Terms::Polynomial { .. } => Backend::ExactPolynomial,
        }
    }

    /// Index of the last stored term.
    pub fn n_terms(&self) -> usize {
        match &self.terms {
            Terms::Grid { values, .. } => values[0].len() - 1,
            Terms::Polynomial { terms, .. } => terms[0].len() - 1,
        }
    }

    fn check(&self, n: usize, x: f64) -> Result<(), SolveError> {
        if n > self.n_terms() {
            return Err(SolveError::TermOutOfRange { requested: n, available: self.n_terms() });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(SolveError::OutsideDomain(x));
        }
        Ok(())
    }

    /// Values at `x` of terms `0..=n` of both components.
    pub fn term_values(&self, n: usize, x: f64) -> Result<[Vec<f64>; 2], SolveError> {
        self.check(n, x)?;
        Ok(match &self.terms {
            Terms::Grid { grid, values, .. } => {
                let row = grid.cardinal_row(x);
                let at = |v: &Vec<f64>| row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
                [values[0][..=n].iter().map(at).collect(), values[1][..=n].iter().map(at).collect()]
            }
            Terms::Polynomial { terms, .. } => {
                [terms[0][..=n].iter().map(|p| p.eval(x)).collect(), terms[1][..=n].iter().map(|p| p.eval(x)).collect()]
            }
        })
    }

    /// `(ψ_{1,n}(x), ψ_{2,n}(x))`.
    pub fn evaluate_partial_sum(&self, n: usize, x: f64) -> Result<(f64, f64), SolveError> {
        let [t1, t2] = self.term_values(n, x)?;
        Ok((t1.iter().sum(), t2.iter().sum()))
    }

    /// Nodal values of `ψ_{c,n}` (grid backend only).
    pub fn partial_sum_at_nodes(&self, c: usize, n: usize) -> Option<Vec<f64>> {
        match &self.terms {
            Terms::Grid { values, .. } if n <= self.n_terms() => Some(sum_rows(&values[c][..=n])),
            _ => None,
        }
    }

    /// `ψ_{c,n}` as a polynomial (polynomial backend only).
    pub fn partial_sum_polynomial(&self, c: usize, n: usize) -> Option<Polynomial> {
        match &self.terms {
            Terms::Polynomial { terms, .. } if n <= self.n_terms() => {
                Some(terms[c][..=n].iter().fold(Polynomial::zero(), |acc, p| acc.add(p)))
            }
            _ => None,
        }
    }

    /// `ψ_{c,n}` with its first two derivatives; spectral differentiation
    /// on the grid backend, exact on the polynomial backend.
    pub fn profile(&self, c: usize, n: usize) -> Result<Profile, SolveError> {
        self.check(n, 0.0)?;
        Ok(match &self.terms {
            Terms::Grid { grid, values, .. } => {
                let value = sum_rows(&values[c][..=n]);
                let d1 = grid.differentiate(&value);
                let d2 = grid.differentiate(&d1);
                Profile::Grid { grid: grid.clone(), value, d1, d2 }
            }
            Terms::Polynomial { .. } => {
                let value = self.partial_sum_polynomial(c, n).unwrap_or_default();
                let d1 = value.derivative();
                let d2 = d1.derivative();
                Profile::Polynomial { value, d1, d2 }
            }
        })
    }

    /// Largest nodal magnitude of term `j` over both components, i.e.
    /// `‖Ψ_j − Ψ_{j−1}‖∞` measured on the grid (or on `samples` points
    /// for the polynomial backend).
    pub fn increment_norm(&self, j: usize, samples: usize) -> Result<f64, SolveError> {
        self.check(j, 0.0)?;
        Ok(match &self.terms {
            Terms::Grid { values, .. } => values
                .iter()
                .flat_map(|v| v[j].iter())
                .fold(0.0, |m: f64, t| m.max(libm::fabs(*t))),
            Terms::Polynomial { terms, .. } => {
                let samples = samples.max(2);
                (0..samples)
                    .map(|k| k as f64 / (samples - 1) as f64)
                    .flat_map(|x| terms.iter().map(move |t| libm::fabs(t[j].eval(x))))
                    .fold(0.0, f64::max)
            }
        })
    }
}

fn sum_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; rows[0].len()];
    for r in rows {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v;
        }
    }
    out
}

/// The baselines `(y_{1,0}, y_{2,0})` as polynomials in `x` (affine
/// convention).
pub fn build_baseline(p: &ProblemSpec) -> (Polynomial, Polynomial) {
    (p.components[0].baseline(), p.components[1].baseline())
}

/// Splits a baseline into (term 0, ramp added to term 1) per the mode.
fn split_baseline(c: &ComponentSpec, mode: BaselineMode) -> (Polynomial, Polynomial) {
    let base = c.baseline();
    match (mode, c.left) {
        (BaselineMode::Split, LeftBc::Dirichlet(_)) => {
            let constant = Polynomial::constant(base.coeff(0));
            let ramp = base.sub(&constant);
            (constant, ramp)
        }
        _ => (base, Polynomial::zero()),
    }
}

/// Runs the recursion for `n_terms` steps.
pub fn gfadm_solve(p: &ProblemSpec, n_terms: usize, backend: Backend) -> Result<SolutionSeries, SolveError> {
    p.validate()?;
    let kernels = [p.components[0].kernel()?, p.components[1].kernel()?];
    let terms = match backend {
        Backend::Grid { grid_size } => solve_grid(p, n_terms, grid_size, kernels)?,
        Backend::ExactPolynomial => solve_polynomial(p, n_terms, kernels)?,
    };
    Ok(SolutionSeries { problem: p.clone(), terms })
}

fn solve_grid(p: &ProblemSpec, n_terms: usize, grid_size: usize, kernels: [KernelSpec; 2]) -> Result<Terms, SolveError> {
    if grid_size < 2 {
        return Err(SolveError::UnsupportedBackend("grid size must be at least 2"));
    }
    let grid = Arc::new(ChebyshevGrid::new(grid_size));
    let m0 = KernelMatrix::new(&kernels[0], &grid);
    let m1 = if kernels[1] == kernels[0] { m0.clone() } else { KernelMatrix::new(&kernels[1], &grid) };
    let matrices = [m0, m1];
    let nodes = grid.nodes();
    let mut values: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
    let mut ramps: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for c in 0..2 {
        let (base, ramp) = split_baseline(&p.components[c], p.baseline_mode);
        values[c].push(nodes.iter().map(|&x| base.eval(x)).collect());
        ramps[c] = nodes.iter().map(|&x| ramp.eval(x)).collect();
    }
    let mut adomian = AdomianTableau::new(nodes.to_vec());
    for j in 1..=n_terms {
        adomian
            .push_row(p.rhs(), [&values[0], &values[1]])
            .map_err(|e| SolveError::Nonlinearity { component: e.component, x: e.source.x, source: e.source.source })?;
        for c in 0..2 {
            let mut term = matrices[c].apply(adomian.row(c, j - 1));
            if j == 1 {
                for (t, r) in term.iter_mut().zip(&ramps[c]) {
                    *t += r;
                }
            }
            values[c].push(term);
        }
    }
    Ok(Terms::Grid { grid, values, adomian })
}

/// λ-series whose coefficients are polynomials in `x`.
struct PolySeriesAlgebra<'a> {
    order: usize,
    y1: &'a [Polynomial],
    y2: &'a [Polynomial],
}

impl Algebra for PolySeriesAlgebra<'_> {
    type Value = Vec<Polynomial>;
    type Error = SolveError;

    fn constant(&self, c: f64) -> Vec<Polynomial> {
        let mut v = vec![Polynomial::zero(); self.order + 1];
        v[0] = Polynomial::constant(c);
        v
    }
    fn x(&self) -> Vec<Polynomial> {
        let mut v = vec![Polynomial::zero(); self.order + 1];
        v[0] = Polynomial::monomial(1.0, 1);
        v
    }
    fn y1(&self) -> Vec<Polynomial> {
        self.y1.to_vec()
    }
    fn y2(&self) -> Vec<Polynomial> {
        self.y2.to_vec()
    }
    fn add(&self, a: &Vec<Polynomial>, b: &Vec<Polynomial>) -> Result<Vec<Polynomial>, SolveError> {
        Ok(a.iter().zip(b).map(|(p, q)| p.add(q)).collect())
    }
    fn sub(&self, a: &Vec<Polynomial>, b: &Vec<Polynomial>) -> Result<Vec<Polynomial>, SolveError> {
        Ok(a.iter().zip(b).map(|(p, q)| p.sub(q)).collect())
    }
    fn mul(&self, a: &Vec<Polynomial>, b: &Vec<Polynomial>) -> Result<Vec<Polynomial>, SolveError> {
        Ok((0..=self.order)
            .map(|k| (0..=k).fold(Polynomial::zero(), |acc, i| acc.add(&a[i].mul(&b[k - i]))))
            .collect())
    }
    fn div(&self, _: &Vec<Polynomial>, _: &Vec<Polynomial>) -> Result<Vec<Polynomial>, SolveError> {
        Err(SolveError::UnsupportedBackend("the exact backend needs polynomial right-hand sides"))
    }
    fn neg(&self, a: &Vec<Polynomial>) -> Vec<Polynomial> {
        a.iter().map(|p| p.scale(-1.0)).collect()
    }
    fn pow(&self, a: &Vec<Polynomial>, p: u32) -> Result<Vec<Polynomial>, SolveError> {
        let mut acc = self.constant(1.0);
        for _ in 0..p {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }
}

fn solve_polynomial(p: &ProblemSpec, n_terms: usize, kernels: [KernelSpec; 2]) -> Result<Terms, SolveError> {
    if !p.components.iter().all(|c| c.rhs.is_polynomial()) {
        return Err(SolveError::UnsupportedBackend("the exact backend needs polynomial right-hand sides"));
    }
    let mut terms: [Vec<Polynomial>; 2] = [Vec::new(), Vec::new()];
    let mut ramps = [Polynomial::zero(), Polynomial::zero()];
    for c in 0..2 {
        let (base, ramp) = split_baseline(&p.components[c], p.baseline_mode);
        terms[c].push(base);
        ramps[c] = ramp;
    }
    let mut adomian: [Vec<Polynomial>; 2] = [Vec::new(), Vec::new()];
    for j in 1..=n_terms {
        let alg = PolySeriesAlgebra { order: j - 1, y1: &terms[0], y2: &terms[1] };
        let rows = [p.components[0].rhs.evaluate(&alg)?, p.components[1].rhs.evaluate(&alg)?];
        for c in 0..2 {
            let a = rows[c][j - 1].clone();
            let mut term = kernel_polynomial_image(&kernels[c], &a);
            if j == 1 {
                term = term.add(&ramps[c]);
            }
            if term.degree() > MAX_POLY_DEGREE {
                return Err(SolveError::DegreeCap { component: c + 1, term: j, degree: term.degree() });
            }
            adomian[c].push(a);
            terms[c].push(term);
        }
    }
    Ok(Terms::Polynomial { terms, adomian })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{catalytic, co2_pge, component, problem, substrate};
    use crate::expr::parse_expression;

    const GRID: Backend = Backend::Grid { grid_size: DEFAULT_GRID_SIZE };
    const TABLE_X: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

    #[test]
    fn baselines() {
        let (b1, b2) = build_baseline(&catalytic([1.0, 0.4, 0.5, 1.0]));
        assert_eq!((b1.eval(0.3), b2.eval(0.3)), (1.0, 2.0));
        let (b1, b2) = build_baseline(&substrate(2.0));
        assert_eq!((b1.eval(0.3), b2.eval(0.3)), (1.0, 1.0));
        let (b1, _) = build_baseline(&co2_pge(BaselineMode::Affine));
        assert_eq!(b1.coeffs(), &[1.0, -0.5]);
        // Robin data: y(0) = 2, y(1) + y'(1) = 4 → 2 + x
        let c = ComponentSpec { right: RightBc { a: 1.0, b: 1.0, c: 4.0 }, ..component(None, LeftBc::Dirichlet(2.0), 0.0, "0") };
        assert_eq!(c.baseline().coeffs(), &[2.0, 1.0]);
    }

    #[test]
    fn first_iterate_of_literal_catalytic_rhs() {
        let p = problem(
            component(Some(2.0), LeftBc::Neumann0, 1.0, "-1*y1^2-0.4*y1*y2"),
            component(Some(2.0), LeftBc::Neumann0, 2.0, "-0.5*y1^2-1*y1*y2"),
            BaselineMode::Affine,
        );
        let sol = gfadm_solve(&p, 1, Backend::ExactPolynomial).unwrap();
        let Terms::Polynomial { terms, .. } = sol.terms() else { panic!() };
        let y11 = &terms[0][1];
        assert!((y11.coeff(0) - 0.3).abs() < 1e-15 && (y11.coeff(2) + 0.3).abs() < 1e-15 && y11.degree() == 2);
        let grid = gfadm_solve(&p, 1, GRID).unwrap();
        for x in TABLE_X {
            let [t, _] = grid.term_values(1, x).unwrap();
            assert!((t[1] - 0.3 * (1.0 - x * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn printed_five_term_series() {
        let sol = gfadm_solve(&catalytic([1.0, 0.4, 0.5, 1.0]), 5, Backend::ExactPolynomial).unwrap();
        let psi = sol.partial_sum_polynomial(0, 5).unwrap();
        let printed = [0.776218, 0.199501, 0.018823, 0.005706, -0.0003741, 0.000125];
        for (k, (&want, tol)) in printed.iter().zip([1e-5, 1e-5, 1e-5, 1e-5, 5e-4, 5e-4]).enumerate() {
            assert!((psi.coeff(2 * k) - want).abs() < tol, "x^{}: {} vs {want}", 2 * k, psi.coeff(2 * k));
        }
        assert!(psi.coeffs().iter().skip(1).step_by(2).all(|c| *c == 0.0));
    }

    #[test]
    fn table_values() {
        let sol = gfadm_solve(&substrate(2.0), 4, GRID).unwrap();
        let (a, b) = sol.evaluate_partial_sum(4, 0.5).unwrap();
        assert!((a - 1.4998959).abs() < 5e-7 && (b - 1.0187468).abs() < 5e-7, "{a} {b}");
        let sol = gfadm_solve(&catalytic([1.0, 0.4, 0.5, 1.0]), 10, GRID).unwrap();
        let (a, _) = sol.evaluate_partial_sum(10, 0.9).unwrap();
        assert!((a - 0.9536120).abs() < 5e-7, "{a}");
    }

    #[test]
    fn symmetric_catalytic_components_differ_by_one() {
        let sol = gfadm_solve(&catalytic([0.5; 4]), 10, GRID).unwrap();
        for n in 0..=10 {
            let a = sol.partial_sum_at_nodes(0, n).unwrap();
            let b = sol.partial_sum_at_nodes(1, n).unwrap();
            assert!(a.iter().zip(&b).all(|(u, v)| (v - u - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn backends_agree() {
        let p = catalytic([1.0, 0.4, 0.5, 1.0]);
        let exact = gfadm_solve(&p, 10, Backend::ExactPolynomial).unwrap();
        let grid = gfadm_solve(&p, 10, GRID).unwrap();
        for n in 0..=10 {
            for x in TABLE_X {
                let (a1, a2) = exact.evaluate_partial_sum(n, x).unwrap();
                let (b1, b2) = grid.evaluate_partial_sum(n, x).unwrap();
                assert!((a1 - b1).abs() < 1e-9 && (a2 - b2).abs() < 1e-9, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn boundary_conditions_hold() {
        for p in [catalytic([1.0, 0.4, 0.5, 1.0]), substrate(1.0), substrate(3.0), co2_pge(BaselineMode::Split), co2_pge(BaselineMode::Affine)] {
            let sol = gfadm_solve(&p, 6, GRID).unwrap();
            // under the split baseline term 0 alone carries only the left value
            let first = usize::from(p.baseline_mode == BaselineMode::Split);
            for n in first..=6 {
                let (a, b) = sol.evaluate_partial_sum(n, 1.0).unwrap();
                assert!((a - p.components[0].right.c).abs() < 1e-9 && (b - p.components[1].right.c).abs() < 1e-9, "{a} {b} n={n}");
                for c in 0..2 {
                    let (v0, d0, _) = sol.profile(c, n).unwrap().eval(0.0);
                    match p.components[c].left {
                        LeftBc::Neumann0 => assert!(d0.abs() < 1e-6, "{} n={n} c={c}: {d0}", p.name),
                        LeftBc::Dirichlet(u0) => assert!((v0 - u0).abs() < 1e-12),
                    }
                }
            }
        }
    }

    #[test]
    fn each_term_solves_its_linear_problem() {
        for p in [catalytic([1.0, 0.4, 0.5, 1.0]), substrate(2.0), co2_pge(BaselineMode::Affine)] {
            let sol = gfadm_solve(&p, 5, GRID).unwrap();
            let Terms::Grid { grid, values, adomian } = sol.terms() else { panic!() };
            for c in 0..2 {
                let alpha = p.components[c].alpha();
                for j in 1..=5 {
                    let d1 = grid.differentiate(&values[c][j]);
                    let d2 = grid.differentiate(&d1);
                    for (k, &x) in grid.nodes().iter().enumerate().skip(1) {
                        let lhs = d2[k] + alpha / x * d1[k];
                        let rhs = adomian.row(c, j - 1)[k];
                        assert!((lhs - rhs).abs() < 1e-6, "c={c} j={j} x={x}: {lhs} vs {rhs}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_rhs_keeps_baselines() {
        let p = problem(
            component(Some(2.0), LeftBc::Neumann0, 3.0, "0"),
            component(None, LeftBc::Dirichlet(1.0), 2.0, "0"),
            BaselineMode::Affine,
        );
        for backend in [GRID, Backend::ExactPolynomial] {
            let sol = gfadm_solve(&p, 4, backend).unwrap();
            for x in TABLE_X {
                let (a, b) = sol.evaluate_partial_sum(4, x).unwrap();
                assert!((a - 3.0).abs() < 1e-14 && (b - (1.0 + x)).abs() < 1e-14, "{a} {b} {x}");
            }
        }
    }

    #[test]
    fn errors() {
        let p = substrate(2.0);
        assert!(matches!(gfadm_solve(&p, 3, Backend::ExactPolynomial), Err(SolveError::UnsupportedBackend(_))));
        let sol = gfadm_solve(&p, 3, GRID).unwrap();
        assert!(matches!(sol.evaluate_partial_sum(4, 0.5), Err(SolveError::TermOutOfRange { requested: 4, available: 3 })));
        assert!(matches!(sol.evaluate_partial_sum(2, 1.5), Err(SolveError::OutsideDomain(_))));

        let pole = problem(
            component(Some(2.0), LeftBc::Neumann0, 1.0, "1/(y2 - 2)"),
            component(Some(2.0), LeftBc::Neumann0, 2.0, "0"),
            BaselineMode::Affine,
        );
        let err = gfadm_solve(&pole, 2, GRID).unwrap_err();
        assert!(matches!(err, SolveError::Nonlinearity { component: 1, x, .. } if x == 0.0), "{err:?}");

        let steep = problem(
            component(Some(2.0), LeftBc::Neumann0, 1.0, "x^59"),
            component(Some(2.0), LeftBc::Neumann0, 2.0, "0"),
            BaselineMode::Affine,
        );
        assert!(matches!(gfadm_solve(&steep, 1, Backend::ExactPolynomial), Err(SolveError::DegreeCap { component: 1, term: 1, degree: 61 })));

        let mut bad = catalytic([1.0; 4]);
        bad.components[1].right.a = 0.0;
        assert!(matches!(gfadm_solve(&bad, 1, GRID), Err(SolveError::InvalidProblem { component: 2, .. })));
        let mut bad = catalytic([1.0; 4]);
        bad.components[0].left = LeftBc::Dirichlet(1.0);
        assert!(matches!(gfadm_solve(&bad, 1, GRID), Err(SolveError::InvalidProblem { component: 1, .. })));
        let _ = parse_expression("0").unwrap();
    }

    #[test]
    fn split_and_affine_baselines_share_the_limit() {
        let a = gfadm_solve(&co2_pge(BaselineMode::Affine), 12, GRID).unwrap();
        let s = gfadm_solve(&co2_pge(BaselineMode::Split), 12, GRID).unwrap();
        for x in TABLE_X {
            let (a1, a2) = a.evaluate_partial_sum(12, x).unwrap();
            let (s1, s2) = s.evaluate_partial_sum(12, x).unwrap();
            assert!((a1 - s1).abs() < 1e-8 && (a2 - s2).abs() < 1e-8);
        }
    }

    #[test]
    fn robin_right_end_is_honoured() {
        // y'' + (1/x) y' = y1 with y'(0) = 0, 2y(1) + y'(1) = 3
        let mut c1 = component(Some(1.0), LeftBc::Neumann0, 0.0, "0.3*y1");
        c1.right = RightBc { a: 2.0, b: 1.0, c: 3.0 };
        let mut c2 = component(None, LeftBc::Dirichlet(0.5), 0.0, "0.2*y2*y1");
        c2.right = RightBc { a: 1.0, b: 0.5, c: 1.0 };
        let p = problem(c1, c2, BaselineMode::Affine);
        let sol = gfadm_solve(&p, 8, GRID).unwrap();
        for n in 0..=8 {
            for c in 0..2 {
                let (v, d, _) = sol.profile(c, n).unwrap().eval(1.0);
                let r = p.components[c].right;
                assert!((r.a * v + r.b * d - r.c).abs() < 1e-9, "c={c} n={n}");
            }
        }
    }
}
