//! Truncated power series with exact rational coefficients.
//!
//! Everything here is exact: coefficients are arbitrary-precision
//! rationals and all products are truncated at an explicit order, so two
//! different derivations of the same series can be compared coefficient by
//! coefficient with `==`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Coefficients `c[k]` of `sum_k c[k] x^k`, stored through a fixed
/// truncation order `c.len() - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    c: Vec<BigRational>,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series {
            c: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn from_coeffs(c: Vec<BigRational>) -> Self {
        assert!(!c.is_empty());
        Series { c }
    }

    /// The monomial `x`.
    pub fn x(order: usize) -> Self {
        let mut s = Series::zero(order);
        if order >= 1 {
            s.c[1] = BigRational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    /// Coefficient of `x^k`; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> BigRational {
        self.c.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    /// Re-truncate (drop or zero-pad) to the given order.
    pub fn truncated(&self, order: usize) -> Self {
        let mut c = self.c.clone();
        c.resize(order + 1, BigRational::zero());
        c.truncate(order + 1);
        Series { c }
    }

    pub fn add(&self, other: &Series) -> Series {
        let order = self.order().max(other.order());
        let mut c = vec![BigRational::zero(); order + 1];
        for (k, v) in c.iter_mut().enumerate() {
            *v = self.coeff(k) + other.coeff(k);
        }
        Series { c }
    }

    pub fn sub(&self, other: &Series) -> Series {
        let order = self.order().max(other.order());
        let mut c = vec![BigRational::zero(); order + 1];
        for (k, v) in c.iter_mut().enumerate() {
            *v = self.coeff(k) - other.coeff(k);
        }
        Series { c }
    }

    pub fn scale(&self, r: &BigRational) -> Series {
        Series {
            c: self.c.iter().map(|v| v * r).collect(),
        }
    }

    /// Product truncated at `order`.
    pub fn mul_trunc(&self, other: &Series, order: usize) -> Series {
        let mut c = vec![BigRational::zero(); order + 1];
        for (a, ca) in self.c.iter().enumerate() {
            if a > order || ca.is_zero() {
                continue;
            }
            for (b, cb) in other.c.iter().enumerate() {
                if a + b > order {
                    break;
                }
                if !cb.is_zero() {
                    c[a + b] += ca * cb;
                }
            }
        }
        Series { c }
    }

    /// Multiply by `x`, truncating at `order`.
    pub fn mul_x(&self, order: usize) -> Series {
        let mut c = vec![BigRational::zero(); order + 1];
        for k in 1..=order {
            if k - 1 < self.c.len() {
                c[k] = self.c[k - 1].clone();
            }
        }
        Series { c }
    }

    /// Composition `self(inner)` truncated at `order`. `inner` must have a
    /// zero constant term (otherwise the composition would need all of
    /// `self`, not a truncation).
    pub fn compose_trunc(&self, inner: &Series, order: usize) -> Series {
        assert!(
            inner.coeff(0).is_zero(),
            "composition requires a zero constant term"
        );
        // Horner: (((c_n x + c_{n-1}) x + ...) x + c_0) with x = inner.
        let mut acc = Series::zero(order);
        for k in (0..self.c.len()).rev() {
            acc = acc.mul_trunc(inner, order);
            acc.c[0] += &self.c[k];
        }
        acc
    }

    pub fn derivative(&self) -> Series {
        if self.c.len() == 1 {
            return Series::zero(0);
        }
        let mut c = Vec::with_capacity(self.c.len() - 1);
        for k in 1..self.c.len() {
            c.push(&self.c[k] * BigRational::from(BigInt::from(k as u64)));
        }
        Series { c }
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for k in (0..self.c.len()).rev() {
            acc = acc * x + &self.c[k];
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0f64;
        for k in (0..self.c.len()).rev() {
            acc = acc * x + self.c[k].to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| v.is_zero())
    }
}
