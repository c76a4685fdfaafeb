//! Reference values for the bundled problems.
//!
//! Solution tables hold `ψ` and pointwise residuals at `x = 0.1 … 0.9`
//! for two truncation orders; max-residual tables hold one row per `n`.

use crate::bundled;

const SOLUTIONS: [(&str, &str); 6] = [
    ("example1_k1", include_str!("../reference/example1_k1_solution.csv")),
    ("example1_sym", include_str!("../reference/example1_sym_solution.csv")),
    ("example2_alpha1", include_str!("../reference/example2_alpha1_solution.csv")),
    ("example2_alpha2", include_str!("../reference/example2_alpha2_solution.csv")),
    ("example2_alpha3", include_str!("../reference/example2_alpha3_solution.csv")),
    ("example3", include_str!("../reference/example3_solution.csv")),
];

const MAX_RESIDUALS: [(&str, &str); 4] = [
    ("example1_k1", include_str!("../reference/example1_k1_max_residual.csv")),
    ("example1_sym", include_str!("../reference/example1_sym_max_residual.csv")),
    ("example2_alpha2", include_str!("../reference/example2_alpha2_max_residual.csv")),
    ("example3", include_str!("../reference/example3_max_residual.csv")),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRow {
    pub x: f64,
    /// `psi[k][c]` for truncation order `orders[k]` and component `c`.
    pub psi: [[f64; 2]; 2],
    pub r: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTable {
    pub orders: [usize; 2],
    pub rows: Vec<SolutionRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxResidualTable {
    pub rows: Vec<(usize, [f64; 2])>,
}

fn numbers(line: &str) -> Vec<f64> {
    line.split(',').map(|c| c.trim().parse().expect("reference tables are numeric")).collect()
}

fn order_of(column: &str) -> usize {
    column.rsplit_once("_n").and_then(|(_, n)| n.parse().ok()).expect("column names end in _n<order>")
}

fn lookup<'a>(table: &[(&str, &'a str)], name: &str) -> Option<&'a str> {
    table.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn solution_table(name: &str) -> Option<SolutionTable> {
    let text = lookup(&SOLUTIONS, name)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next()?.split(',').collect();
    let orders = [order_of(header[1]), order_of(header[5])];
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v = numbers(l);
            SolutionRow { x: v[0], psi: [[v[1], v[2]], [v[5], v[6]]], r: [[v[3], v[4]], [v[7], v[8]]] }
        })
        .collect();
    Some(SolutionTable { orders, rows })
}

pub fn max_residual_table(name: &str) -> Option<MaxResidualTable> {
    let text = lookup(&MAX_RESIDUALS, name)?;
    let rows = text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v = numbers(l);
            (v[0] as usize, [v[1], v[2]])
        })
        .collect();
    Some(MaxResidualTable { rows })
}

/// Bundled problems that have a solution table.
pub fn with_solution_tables() -> impl Iterator<Item = &'static str> {
    bundled::names().filter(|n| lookup(&SOLUTIONS, n).is_some())
}
