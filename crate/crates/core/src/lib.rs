//! Green's-function Adomian decomposition for coupled Lane–Emden type
//! boundary value problems.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line and anything touching the operating system live in the `gfadm`
//! companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adomian;
pub mod analysis;
pub mod chebyshev;
pub mod expr;
#[cfg(test)]
mod fixtures;
pub mod kernels;
pub mod oracle;
pub mod poly;
pub mod quadrature;
pub mod search;
pub mod series;
pub mod solver;

pub use adomian::{adomian_coefficients, AdomianError, AdomianTableau};
pub use analysis::{
    convergence_estimate, error_bound, lipschitz_estimate, max_residual, residual, residual_report, AnalysisError, ConvergenceEstimate,
    LipschitzBox, MaxResidualForm, MaxResidualOptions, ResidualMethod, ResidualReport,
};
pub use chebyshev::{ChebyshevGrid, GridFunction};
pub use expr::{eval_scalar, eval_series, parse_expression, parse_expression_with, EvalError, Expression, ParseError};
pub use kernels::{kernel_apply, kernel_apply_fn, kernel_bound_m, kernel_eval, kernel_monomial_image, KernelError, KernelMatrix, KernelSpec};
pub use oracle::{fd_solve, OracleError, OracleSolution};
pub use poly::Polynomial;
pub use solver::{build_baseline, gfadm_solve, Backend, BaselineMode, ComponentSpec, LeftBc, Operator, ProblemSpec, RightBc, SolutionSeries, SolveError};
pub use series::{SeriesError, TruncatedSeries};
