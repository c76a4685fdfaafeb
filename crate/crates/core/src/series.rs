//! Truncated power series in a formal parameter λ.
//!
//! A [`TruncatedSeries`] of order `N` stores `c₀ … c_N`, the coefficients of
//! `λ⁰ … λ^N`. Arithmetic is exact up to the truncation order; coefficients
//! above `N` are discarded. Operands must share the same order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Smallest admissible magnitude of a divisor's constant term.
pub const DIVISOR_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("singular division: divisor constant term {constant:e} is zero")]
    SingularDivision { constant: f64 },
    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    /// Builds a series from its coefficients; the order is `coeffs.len() - 1`.
    ///
    /// An empty slice yields the order-0 zero series.
    pub fn new(coeffs: Vec<f64>) -> Result<Self, SeriesError> {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![0.0; order + 1] }
    }

    /// The constant series `c + 0·λ + …`.
    pub fn constant(value: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(1.0, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    /// Keeps only the coefficients up to order `m` (`m ≤ order`).
    pub fn truncate(&self, m: usize) -> Self {
        Self { coeffs: self.coeffs[..=m.min(self.order())].to_vec() }
    }

    fn same_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(SeriesError::OrderMismatch { left: self.order(), right: other.order() })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        let coeffs: Vec<f64> = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        let coeffs: Vec<f64> = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, factor: f64) -> Result<Self, SeriesError> {
        let coeffs: Vec<f64> = self.coeffs.iter().map(|c| c * factor).collect();
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    /// Truncated Cauchy product `c_k = Σ_{j≤k} a_j b_{k−j}`.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for (k, out) in coeffs.iter_mut().enumerate() {
            *out = (0..=k).map(|j| self.coeffs[j] * other.coeffs[k - j]).sum();
        }
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    /// Long division by forward substitution: finds `q` with `q·b = a`
    /// through order `N`.
    pub fn div(&self, divisor: &Self) -> Result<Self, SeriesError> {
        self.same_order(divisor)?;
        let b0 = divisor.coeffs[0];
        if !(libm::fabs(b0) > DIVISOR_TOLERANCE) {
            return Err(SeriesError::SingularDivision { constant: b0 });
        }
        let n = self.coeffs.len();
        let mut q = vec![0.0; n];
        for k in 0..n {
            let acc: f64 = (0..k).map(|j| q[j] * divisor.coeffs[k - j]).sum();
            q[k] = (self.coeffs[k] - acc) / b0;
        }
        check_finite(&q)?;
        Ok(Self { coeffs: q })
    }

    /// Repeated multiplication by squaring; `p = 0` gives the unit series.
    pub fn pow_int(&self, p: u32) -> Result<Self, SeriesError> {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Evaluates the truncated polynomial in λ.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * lambda + c)
    }
}

fn check_finite(coeffs: &[f64]) -> Result<(), SeriesError> {
    match coeffs.iter().position(|c| !c.is_finite()) {
        Some(index) => Err(SeriesError::NonFinite { index }),
        None => Ok(()),
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·λ")?,
                _ => write!(f, "{c}·λ^{k}")?,
            }
        }
        write!(f, " + O(λ^{})", self.order() + 1)
    }
}
