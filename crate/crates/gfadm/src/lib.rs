//! Problem files, reports and the command line for `gfadm-core`.

pub mod bundled;
pub mod cli;
pub mod problem;
pub mod reference;
pub mod report;

/// Overrides the default output directory of the CLI.
pub const OUT_DIR_ENV: &str = "GFADM_OUT_DIR";

pub use problem::{load_problem, parse_problem, BackendChoice, Problem, ProblemFileError, RunConfig};
