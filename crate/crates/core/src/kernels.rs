//! Green's functions of the component operators and their weighted
//! integrals.
//!
//! Two families are provided:
//!
//! * Lane–Emden, for `y'' + (α/x)y' = g`, `y'(0) = 0`,
//!   `a·y(1) + b·y'(1) = 0`: `G(x,s) = v(max(x,s)) − β` with `β = b/a`,
//!   `v(t) = ln t` for `α = 1` and `v(t) = (t^{1−α} − 1)/(1−α)` otherwise.
//! * Dirichlet–Dirichlet, for `y'' = g`, `y(0) = 0`, `y(1) + β·y'(1) = 0`:
//!   `G(x,s) = min(x,s)·(max(x,s) − 1 − β)/(1 + β)`.
//!
//! Both solve their problem as `u(x) = ∫₀¹ G(x,s)·s^α·g(s) ds` (with
//! `α = 0` for the second family).

use alloc::vec;
use alloc::vec::Vec;

use crate::chebyshev::{ChebyshevGrid, GridFunction};
use crate::poly::Polynomial;
use crate::quadrature::{graded_toward_zero, GaussLegendre, QuadratureError, PANEL_NODES};
use crate::search::scan_then_golden;

/// Relative tolerance of the adaptive kernel integrals.
pub const KERNEL_TOLERANCE: f64 = 1e-13;
const MAX_BISECTIONS: u32 = 30;
/// Fixed sub-panels per graded piece when building a [`KernelMatrix`].
const MATRIX_PANELS_PER_PIECE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("invalid kernel parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("kernel evaluated outside its domain at x={x}, s={s}")]
    Domain { x: f64, s: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    LaneEmden { alpha: f64, robin_shift: f64 },
    DirichletDirichlet { robin_shift: f64 },
}

impl KernelSpec {
    pub fn lane_emden(alpha: f64, robin_shift: f64) -> Result<Self, KernelError> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(KernelError::InvalidParameter("alpha must be finite and non-negative"));
        }
        check_shift(robin_shift)?;
        Ok(Self::LaneEmden { alpha, robin_shift })
    }

    pub fn dirichlet_dirichlet(robin_shift: f64) -> Result<Self, KernelError> {
        check_shift(robin_shift)?;
        Ok(Self::DirichletDirichlet { robin_shift })
    }

    /// Exponent of the weight `s^α`.
    pub fn weight_exponent(&self) -> f64 {
        match *self {
            Self::LaneEmden { alpha, .. } => alpha,
            Self::DirichletDirichlet { .. } => 0.0,
        }
    }

    pub fn robin_shift(&self) -> f64 {
        match *self {
            Self::LaneEmden { robin_shift, .. } | Self::DirichletDirichlet { robin_shift } => robin_shift,
        }
    }

    /// Whether the weighted kernel has a non-smooth factor at `s = 0` that
    /// calls for geometric grading.
    fn singular_at_zero(&self) -> bool {
        match *self {
            Self::LaneEmden { alpha, .. } => alpha == 1.0 || libm::floor(alpha) != alpha,
            Self::DirichletDirichlet { .. } => false,
        }
    }

    /// `G(x,s)·s^α` for `x, s ∈ [0,1]`, arranged to stay finite as `s → 0`.
    pub fn weighted(&self, x: f64, s: f64) -> f64 {
        match *self {
            Self::LaneEmden { alpha, robin_shift } => {
                let w = pow_weight(s, alpha);
                if s < x {
                    (v_lane_emden(x, alpha) - robin_shift) * w
                } else if s == 0.0 {
                    // lim_{s→0} v(s)·s^α, the α = 0 case being v(0) = −1
                    if alpha == 0.0 {
                        -1.0 - robin_shift
                    } else {
                        0.0
                    }
                } else if alpha == 1.0 {
                    s * libm::log(s) - robin_shift * s
                } else {
                    (s - w) / (1.0 - alpha) - robin_shift * w
                }
            }
            Self::DirichletDirichlet { .. } => self.dd(x, s),
        }
    }

    fn dd(&self, x: f64, s: f64) -> f64 {
        let beta = self.robin_shift();
        let (lo, hi) = if x < s { (x, s) } else { (s, x) };
        lo * (hi - 1.0 - beta) / (1.0 + beta)
    }
}

fn check_shift(robin_shift: f64) -> Result<(), KernelError> {
    if robin_shift >= 0.0 && robin_shift.is_finite() {
        Ok(())
    } else {
        Err(KernelError::InvalidParameter("robin shift b/a must be finite and non-negative"))
    }
}

fn pow_weight(s: f64, alpha: f64) -> f64 {
    match alpha {
        0.0 => 1.0,
        1.0 => s,
        2.0 => s * s,
        3.0 => s * s * s,
        a => libm::pow(s, a),
    }
}

fn v_lane_emden(t: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        libm::log(t)
    } else if alpha == 0.0 {
        t - 1.0
    } else {
        (libm::pow(t, 1.0 - alpha) - 1.0) / (1.0 - alpha)
    }
}

/// `G(x, s)`.
pub fn kernel_eval(k: &KernelSpec, x: f64, s: f64) -> Result<f64, KernelError> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&s) {
        return Err(KernelError::Domain { x, s });
    }
    let g = match *k {
        KernelSpec::LaneEmden { alpha, robin_shift } => v_lane_emden(x.max(s), alpha) - robin_shift,
        KernelSpec::DirichletDirichlet { .. } => k.dd(x, s),
    };
    if g.is_finite() {
        Ok(g)
    } else {
        Err(KernelError::Domain { x, s })
    }
}

/// Integration pieces for `∫₀¹ G(x,s)·s^α·g(s) ds`: split at the kink and,
/// when the weight is not smooth at 0, graded geometrically toward 0.
fn pieces(k: &KernelSpec, x: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (a, b) in [(0.0, x), (x, 1.0)] {
        if b <= a {
            continue;
        }
        if k.singular_at_zero() {
            let pts = graded_toward_zero(a, b);
            out.extend(pts.windows(2).map(|w| (w[0], w[1])));
        } else {
            out.push((a, b));
        }
    }
    out
}

/// `∫₀¹ G(x,s)·s^α·g(s) ds` by adaptive Gauss–Legendre panels.
pub fn kernel_apply_fn(k: &KernelSpec, mut g: impl FnMut(f64) -> f64, x: f64) -> Result<f64, KernelError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(KernelError::Domain { x, s: x });
    }
    let gl = GaussLegendre::new(PANEL_NODES);
    let mut integrand = |s: f64| k.weighted(x, s) * g(s);
    let mut total = 0.0;
    for (a, b) in pieces(k, x) {
        total += gl.integrate_adaptive(a, b, KERNEL_TOLERANCE, MAX_BISECTIONS, &mut integrand)?;
    }
    Ok(total)
}

/// `∫₀¹ G(x,s)·s^α·g(s) ds` for a grid function `g`.
pub fn kernel_apply(k: &KernelSpec, g: &GridFunction, x: f64) -> Result<f64, KernelError> {
    kernel_apply_fn(k, |s| g.eval(s), x)
}

/// The closed-form image `J_m(x) = ∫₀¹ G(x,s)·s^{α+m} ds`.
pub fn kernel_monomial_image(k: &KernelSpec, m: usize) -> Polynomial {
    let mf = m as f64;
    match *k {
        KernelSpec::LaneEmden { alpha, robin_shift } => {
            // u = x^{m+2}/((m+2)(m+1+α)) + C, with C fixed by u(1) + β u'(1) = 0
            let d = mf + 1.0 + alpha;
            let lead = 1.0 / ((mf + 2.0) * d);
            let mut p = Polynomial::monomial(lead, m + 2);
            p = p.add(&Polynomial::constant(-lead - robin_shift / d));
            p
        }
        KernelSpec::DirichletDirichlet { robin_shift } => {
            // u = x^{m+2}/((m+1)(m+2)) + C x, with u(1) + β u'(1) = 0
            let lead = 1.0 / ((mf + 1.0) * (mf + 2.0));
            let c1 = -(lead + robin_shift * lead * (mf + 2.0)) / (1.0 + robin_shift);
            Polynomial::monomial(lead, m + 2).add(&Polynomial::monomial(c1, 1))
        }
    }
}

/// Image of a polynomial `g` under the integral operator.
pub fn kernel_polynomial_image(k: &KernelSpec, g: &Polynomial) -> Polynomial {
    g.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .fold(Polynomial::zero(), |acc, (m, &c)| acc.add(&kernel_monomial_image(k, m).scale(c)))
}

/// Grid points of the bound search in [`kernel_bound_m`].
pub const BOUND_SEARCH_POINTS: usize = 1001;

/// `max_x |∫₀¹ G(x,s)·s^α ds|`, by quadrature on a dense grid with
/// golden-section refinement.
pub fn kernel_bound_m(k: &KernelSpec) -> Result<f64, KernelError> {
    let (_, v) = scan_then_golden(0.0, 1.0, BOUND_SEARCH_POINTS, |x| {
        kernel_apply_fn(k, |_| 1.0, x).map(libm::fabs)
    })?;
    Ok(v)
}

/// The linear map from nodal values of `g` to nodal values of
/// `x ↦ ∫₀¹ G(x,s)·s^α·g(s) ds`, where `g` is the grid interpolant.
///
/// Row `i` holds the integrals of the cardinal functions against the kernel
/// at node `x_i`, computed once per grid with a fixed composite rule on the
/// same pieces as [`kernel_apply_fn`].
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    size: usize,
    data: Vec<f64>,
}

impl KernelMatrix {
    pub fn new(k: &KernelSpec, grid: &ChebyshevGrid) -> Self {
        let n = grid.len();
        let gl = GaussLegendre::new(PANEL_NODES);
        let mut data = vec![0.0; n * n];
        for (i, &x) in grid.nodes().iter().enumerate() {
            let row = &mut data[i * n..(i + 1) * n];
            for (a, b) in pieces(k, x) {
                let h = (b - a) / MATRIX_PANELS_PER_PIECE as f64;
                for p in 0..MATRIX_PANELS_PER_PIECE {
                    let pa = a + h * p as f64;
                    let pb = if p + 1 == MATRIX_PANELS_PER_PIECE { b } else { pa + h };
                    for (s, w) in gl.mapped(pa, pb) {
                        let wk = w * k.weighted(x, s);
                        for (r, l) in row.iter_mut().zip(grid.cardinal_row(s)) {
                            *r += wk * l;
                        }
                    }
                }
            }
        }
        Self { size: n, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.size);
        self.data.chunks_exact(self.size).map(|row| row.iter().zip(values).map(|(a, b)| a * b).sum()).collect()
    }
}
