//! Chebyshev–Lobatto grids on `[0, 1]`, barycentric interpolation and
//! spectral differentiation.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Chebyshev–Lobatto nodes mapped to `[0, 1]` in increasing order, with
/// their barycentric weights and the first-derivative matrix.
#[derive(Debug, Clone)]
pub struct ChebyshevGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    diff: Vec<f64>,
}

impl ChebyshevGrid {
    /// A grid with `n + 1` nodes (`n ≥ 2`).
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "grid needs at least 3 nodes");
        // x_j = (1 - cos(jπ/N))/2, written with a sine so the grid is exactly
        // symmetric about 1/2
        let nodes: Vec<f64> = (0..=n)
            .map(|j| 0.5 - 0.5 * libm::sin(PI * (n as f64 - 2.0 * j as f64) / (2.0 * n as f64)))
            .collect();
        let weights: Vec<f64> = (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * sign
                } else {
                    sign
                }
            })
            .collect();
        let m = n + 1;
        let mut diff = vec![0.0; m * m];
        for i in 0..m {
            let mut row_sum = 0.0;
            for j in 0..m {
                if i != j {
                    let d = (weights[j] / weights[i]) / (nodes[i] - nodes[j]);
                    diff[i * m + j] = d;
                    row_sum += d;
                }
            }
            // negative-sum trick for the diagonal
            diff[i * m + i] = -row_sum;
        }
        Self { nodes, weights, diff }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Degree `N` of the interpolant (`len() - 1`).
    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Barycentric interpolation of nodal `values` at `x`; exact at nodes.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xj, &wj), &fj) in self.nodes.iter().zip(&self.weights).zip(values) {
            let d = x - xj;
            if d == 0.0 {
                return fj;
            }
            let q = wj / d;
            num += q * fj;
            den += q;
        }
        num / den
    }

    /// The cardinal (Lagrange basis) values `ℓ_j(x)` for all `j`.
    pub fn cardinal_row(&self, x: f64) -> Vec<f64> {
        let mut row: Vec<f64> = Vec::with_capacity(self.len());
        if let Some(k) = self.nodes.iter().position(|&xj| xj == x) {
            row.resize(self.len(), 0.0);
            row[k] = 1.0;
            return row;
        }
        let mut den = 0.0;
        for (&xj, &wj) in self.nodes.iter().zip(&self.weights) {
            let q = wj / (x - xj);
            row.push(q);
            den += q;
        }
        for r in &mut row {
            *r /= den;
        }
        row
    }

    /// Nodal values of the derivative of the interpolant.
    pub fn differentiate(&self, values: &[f64]) -> Vec<f64> {
        let m = self.len();
        (0..m).map(|i| (0..m).map(|j| self.diff[i * m + j] * values[j]).sum()).collect()
    }
}

/// A function on `[0, 1]` represented by its values on a Chebyshev grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<ChebyshevGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<ChebyshevGrid>, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len(), "one value per node");
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<ChebyshevGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<ChebyshevGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    pub fn derivative(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.grid.differentiate(&self.values) }
    }

    pub fn add(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self { grid: self.grid.clone(), values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_increasing_with_endpoints() {
        let g = ChebyshevGrid::new(64);
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.nodes()[64], 1.0);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.nodes()[32], 0.5);
    }

    #[test]
    fn interpolation_reproduces_nodes_and_polynomials() {
        let g = Arc::new(ChebyshevGrid::new(16));
        let f = GridFunction::from_fn(g.clone(), |x| 3.0 * x * x * x - x + 0.25);
        for (&x, &v) in g.nodes().iter().zip(f.values()) {
            assert_eq!(f.eval(x), v);
        }
        for k in 0..50 {
            let x = k as f64 / 49.0 * 0.999 + 0.0003;
            let exact = 3.0 * x * x * x - x + 0.25;
            assert!((f.eval(x) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn spectral_derivative_of_smooth_function() {
        let g = Arc::new(ChebyshevGrid::new(40));
        let f = GridFunction::from_fn(g.clone(), libm::exp);
        let d = f.derivative().derivative();
        for (&x, &v) in g.nodes().iter().zip(d.values()) {
            assert!((v - libm::exp(x)).abs() < 1e-9, "{x}: {v}");
        }
    }

    #[test]
    fn cardinal_row_matches_interpolation() {
        let g = ChebyshevGrid::new(12);
        let vals: Vec<f64> = g.nodes().iter().map(|x| libm::sin(3.0 * x)).collect();
        let row = g.cardinal_row(0.37);
        let via_row: f64 = row.iter().zip(&vals).map(|(a, b)| a * b).sum();
        assert!((via_row - g.interpolate(&vals, 0.37)).abs() < 1e-15);
    }
}
