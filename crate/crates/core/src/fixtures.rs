//! Problem definitions shared by the unit tests.

use alloc::string::String;

use crate::expr::parse_expression;
use crate::solver::{BaselineMode, ComponentSpec, LeftBc, Operator, ProblemSpec, RightBc};

pub fn component(alpha: Option<f64>, left: LeftBc, c: f64, rhs: &str) -> ComponentSpec {
    ComponentSpec {
        operator: alpha.map_or(Operator::Flat, |alpha| Operator::LaneEmden { alpha }),
        left,
        right: RightBc { a: 1.0, b: 0.0, c },
        rhs: parse_expression(rhs).unwrap(),
    }
}

pub fn problem(c1: ComponentSpec, c2: ComponentSpec, mode: BaselineMode) -> ProblemSpec {
    ProblemSpec { name: String::from("test"), components: [c1, c2], baseline_mode: mode }
}

/// Catalytic diffusion system with reaction constants `k`.
pub fn catalytic(k: [f64; 4]) -> ProblemSpec {
    let f1 = alloc::format!("{}*y1^2 + {}*y1*y2", k[0], k[1]);
    let f2 = alloc::format!("{}*y1^2 + {}*y1*y2", k[2], k[3]);
    problem(
        component(Some(2.0), LeftBc::Neumann0, 1.0, &f1),
        component(Some(2.0), LeftBc::Neumann0, 2.0, &f2),
        BaselineMode::Affine,
    )
}

/// Substrate/oxygen system with shape factor `alpha`; `a_eff` is the
/// coefficient of the saturation term in the first equation.
pub fn substrate(alpha: f64) -> ProblemSpec {
    let g = "y1*y2/((0.0001+y1)*(0.0001+y2))";
    let a_eff = if alpha == 1.0 { 5.1 } else { 5.0 };
    problem(
        component(Some(alpha), LeftBc::Neumann0, 1.0, &alloc::format!("1 - {a_eff}*{g}")),
        component(Some(alpha), LeftBc::Neumann0, 1.0, &alloc::format!("-0.15*{g}")),
        BaselineMode::Affine,
    )
}

/// The CO₂/PGE system with the split baseline.
pub fn co2_pge(mode: BaselineMode) -> ProblemSpec {
    problem(
        component(None, LeftBc::Dirichlet(1.0), 0.5, "y1*y2/(1+y1+3*y2)"),
        component(None, LeftBc::Neumann0, 1.0, "2*y1*y2/(1+y1+3*y2)"),
        mode,
    )
}
