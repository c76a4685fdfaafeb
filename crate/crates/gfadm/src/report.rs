//! CSV and JSON writers with fixed number formatting.

use std::io::{self, Write};

use gfadm_core::analysis::{MaxResidualRow, ResidualRow};
use gfadm_core::SolutionSeries;
use serde_json::json;

/// Solution values: 7 decimals, truncated toward zero. Digits beyond the
/// 11th decimal are rounded first so that 0.99999999999998 prints as 1.
pub fn fmt_value(v: f64) -> String {
    let scaled = ((v * 1e11).round() / 1e4).trunc();
    let t = scaled / 1e7 + 0.0;
    format!("{t:.7}")
}

/// Residuals: scientific notation with 6 significant digits.
pub fn fmt_residual(v: f64) -> String {
    format!("{v:.5e}")
}

pub fn write_solution(w: &mut dyn Write, rows: &[(f64, f64, f64)]) -> io::Result<()> {
    writeln!(w, "x,psi1,psi2")?;
    for &(x, a, b) in rows {
        writeln!(w, "{x},{},{}", fmt_value(a), fmt_value(b))?;
    }
    Ok(())
}

pub fn write_max_residuals(w: &mut dyn Write, rows: &[MaxResidualRow]) -> io::Result<()> {
    writeln!(w, "n,maxr1,maxr2")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.n, fmt_residual(r.maxr[0]), fmt_residual(r.maxr[1]))?;
    }
    Ok(())
}

pub fn write_residual_points(w: &mut dyn Write, rows: &[ResidualRow]) -> io::Result<()> {
    writeln!(w, "n,x,r1,r2")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.n, r.x, fmt_residual(r.r[0]), fmt_residual(r.r[1]))?;
    }
    Ok(())
}

/// Coefficients of `ψ_{1,n}` and `ψ_{2,n}` in increasing powers of `x`,
/// or `None` for a grid solution.
pub fn polynomial_json(sol: &SolutionSeries, n: usize) -> Option<serde_json::Value> {
    let p1 = sol.partial_sum_polynomial(0, n)?;
    let p2 = sol.partial_sum_polynomial(1, n)?;
    Some(json!({
        "problem": sol.problem().name,
        "n": n,
        "psi1": p1.coeffs(),
        "psi2": p2.coeffs(),
    }))
}
