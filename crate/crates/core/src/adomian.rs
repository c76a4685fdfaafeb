//! Adomian polynomials as λ-Taylor coefficients of the nonlinearity.

use alloc::vec::Vec;

use crate::expr::{eval_series, Expression};
use crate::series::{SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("Adomian expansion failed at x={x}: {source}")]
pub struct AdomianError {
    pub x: f64,
    #[source]
    pub source: SeriesError,
}

/// `A_0 … A_n` of `f` at `x` where `y1_terms[j]`, `y2_terms[j]` are the
/// values of the `j`-th decomposition terms at `x`.
///
/// `A_k` only depends on terms `0..=k`, so a prefix of the term lists
/// yields a prefix of the result.
pub fn adomian_coefficients(f: &Expression, x: f64, y1_terms: &[f64], y2_terms: &[f64]) -> Result<Vec<f64>, AdomianError> {
    let wrap = |source| AdomianError { x, source };
    if y1_terms.len() != y2_terms.len() {
        return Err(wrap(SeriesError::OrderMismatch {
            left: y1_terms.len().saturating_sub(1),
            right: y2_terms.len().saturating_sub(1),
        }));
    }
    let y1 = TruncatedSeries::new(y1_terms.to_vec()).map_err(wrap)?;
    let y2 = TruncatedSeries::new(y2_terms.to_vec()).map_err(wrap)?;
    Ok(eval_series(f, x, &y1, &y2).map_err(wrap)?.into_coeffs())
}

/// A failed expansion inside an [`AdomianTableau`], with the 1-based
/// component whose nonlinearity failed.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("component {component}: {source}")]
pub struct TableauError {
    pub component: usize,
    #[source]
    pub source: AdomianError,
}

/// The last Adomian polynomial `A_n`, where `n + 1` is the number of terms.
pub fn adomian_last(f: &Expression, x: f64, y1_terms: &[f64], y2_terms: &[f64]) -> Result<f64, AdomianError> {
    let all = adomian_coefficients(f, x, y1_terms, y2_terms)?;
    Ok(all[all.len() - 1])
}

/// Adomian rows `A_{i,j}(s_k)` for both components on a fixed node set,
/// filled one row at a time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdomianTableau {
    nodes: Vec<f64>,
    rows: [Vec<Vec<f64>>; 2],
}

impl AdomianTableau {
    pub fn new(nodes: Vec<f64>) -> Self {
        Self { nodes, rows: [Vec::new(), Vec::new()] }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of complete rows (the same for both components).
    pub fn len(&self) -> usize {
        self.rows[0].len().min(self.rows[1].len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row `j` of component `c` (0 or 1).
    pub fn row(&self, c: usize, j: usize) -> &[f64] {
        &self.rows[c][j]
    }

    /// Computes row `j = terms[c].len() - 1` for both components from nodal
    /// term values `terms[c][j][k]`.
    pub fn push_row(&mut self, rhs: [&Expression; 2], terms: [&[Vec<f64>]; 2]) -> Result<(), TableauError> {
        let j = terms[0].len() - 1;
        debug_assert_eq!(j, self.len());
        let mut new_rows = [Vec::with_capacity(self.nodes.len()), Vec::with_capacity(self.nodes.len())];
        let mut y1 = Vec::with_capacity(j + 1);
        let mut y2 = Vec::with_capacity(j + 1);
        for (k, &x) in self.nodes.iter().enumerate() {
            y1.clear();
            y2.clear();
            y1.extend(terms[0].iter().map(|t| t[k]));
            y2.extend(terms[1].iter().map(|t| t[k]));
            for (c, row) in new_rows.iter_mut().enumerate() {
                let a = adomian_last(rhs[c], x, &y1, &y2).map_err(|source| TableauError { component: c + 1, source })?;
                row.push(a);
            }
        }
        let [r0, r1] = new_rows;
        self.rows[0].push(r0);
        self.rows[1].push(r1);
        Ok(())
    }
}
