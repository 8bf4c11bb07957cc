//! Analytic component structure of random networks whose degrees are
//! uniform on `{1, ..., k_max}`.
//!
//! With degree law `p(k) = 1/k_max`:
//! - `G0(x) = Σ p(k) x^k` generates the degree of a random agent,
//! - `G1(x) = G0'(x) / z1` generates the excess degree reached along a
//!   random link, where `z1 = G0'(1)` is the mean degree,
//! - `H1` solves `H1 = x G1(H1)` and generates the size of the branch
//!   hanging off a link,
//! - `H0 = x G0(H1)` generates the size of the finite component containing
//!   a random agent; `P_s` is its `x^s` coefficient,
//! - a giant component exists iff the mean excess `z2 = G0''(1)` exceeds
//!   `z1`; `u`, the smallest non-negative fixed point of `G1`, gives the
//!   giant fraction `S = 1 - G0(u)` and the mean finite-component size
//!   `1 + z1 u^2 / ((1 - S)(1 - G1'(u)))`.
//!
//! Series coefficients are exact rationals. Only `u` and the quantities
//! following from it are floating point — the fixed point is irrational for
//! most `k_max`.

pub mod series;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub use series::Series;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("k_max must be at least 1, got {0}")]
    BadDegreeBound(u32),
    #[error("series truncation order must be at least 2, got {0}")]
    BadTruncation(usize),
}

/// Convert a possibly huge rational to `f64` without overflowing the
/// intermediate integer conversions.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let numer_bits = r.numer().bits();
    let denom_bits = r.denom().bits();
    let max_bits = numer_bits.max(denom_bits);
    if max_bits <= 900 {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        return n / d;
    }
    let shift = max_bits - 900;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact generating-function model for one `k_max`, with the component-size
/// law truncated at `s_max`.
#[derive(Debug, Clone)]
pub struct GfModel {
    k_max: u32,
    s_max: usize,
    g0: Series,
    g1: Series,
    h1: Series,
    h0: Series,
    chi_total: BigRational,
}

impl GfModel {
    pub fn new(k_max: u32, s_max: usize) -> Result<GfModel, GfError> {
        if k_max < 1 {
            return Err(GfError::BadDegreeBound(k_max));
        }
        if s_max < 2 {
            return Err(GfError::BadTruncation(s_max));
        }
        let g0 = degree_gf(k_max, s_max.max(k_max as usize + 1));
        let z1 = g0.derivative().eval_rational(&BigRational::one());
        let g1 = g0.derivative().scale(&z1.recip());
        let h1 = solve_branch_gf(&g1, s_max);
        let h0 = g0.compose_trunc(&h1, s_max).mul_x(s_max);
        let mut chi_total = BigRational::zero();
        for s in 2..=s_max {
            chi_total += h0.coeff(s) / BigRational::from(BigInt::from(s as u64));
        }
        Ok(GfModel {
            k_max,
            s_max,
            g0,
            g1,
            h1,
            h0,
            chi_total,
        })
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    pub fn degree_gf(&self) -> &Series {
        &self.g0
    }

    pub fn excess_gf(&self) -> &Series {
        &self.g1
    }

    pub fn branch_gf(&self) -> &Series {
        &self.h1
    }

    pub fn component_gf(&self) -> &Series {
        &self.h0
    }

    /// Mean degree `z1 = G0'(1) = (k_max + 1)/2`, exact.
    pub fn z1(&self) -> BigRational {
        self.g0.derivative().eval_rational(&BigRational::one())
    }

    /// Mean excess `z2 = G0''(1)`, exact.
    pub fn z2(&self) -> BigRational {
        self.g0
            .derivative()
            .derivative()
            .eval_rational(&BigRational::one())
    }

    /// A giant component exists iff `z2 > z1` (true exactly when
    /// `k_max >= 3`).
    pub fn has_giant(&self) -> bool {
        self.z2() > self.z1()
    }

    /// Smallest non-negative fixed point of `G1` on `[0, 1]`.
    ///
    /// Without a giant component the only root is 1 (returned exactly).
    /// Otherwise a 10^4-point grid scan brackets the first sign change of
    /// `G1(u) - u` and bisection refines it to 1e-12.
    pub fn u(&self) -> f64 {
        if !self.has_giant() {
            return 1.0;
        }
        let f = |u: f64| self.g1.eval_f64(u) - u;
        const GRID: usize = 10_000;
        let mut prev_u = 0.0;
        let mut prev_f = f(0.0);
        if prev_f == 0.0 {
            return 0.0;
        }
        for g in 1..=GRID {
            let u = g as f64 / GRID as f64;
            let fu = f(u);
            if fu == 0.0 {
                return u;
            }
            if prev_f.signum() != fu.signum() {
                let (mut lo, mut hi) = (prev_u, u);
                let mut flo = prev_f;
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    let fm = f(mid);
                    if fm == 0.0 {
                        return mid;
                    }
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
            prev_u = u;
            prev_f = fu;
        }
        1.0
    }

    /// Fraction of agents in the giant component: `1 - G0(u)`; exactly 0
    /// when there is no giant component.
    pub fn giant_fraction(&self) -> f64 {
        if !self.has_giant() {
            return 0.0;
        }
        1.0 - self.g0.eval_f64(self.u())
    }

    /// Mean size of the finite component containing a random agent:
    /// `1 + z1 u^2 / ((1 - S)(1 - G1'(u)))`. Infinite at a degenerate
    /// denominator (the giant-component transition).
    pub fn mean_finite_component_size(&self) -> f64 {
        let u = self.u();
        let s = self.giant_fraction();
        let z1 = rational_to_f64(&self.z1());
        let g1p = self.g1.derivative().eval_f64(u);
        let denom = (1.0 - s) * (1.0 - g1p);
        if denom.abs() < 1e-14 {
            return f64::INFINITY;
        }
        1.0 + z1 * u * u / denom
    }

    /// `P_s`: probability that a random agent belongs to a finite component
    /// of exactly `s` agents. Exact rational; zero for `s < 2` and beyond
    /// the truncation order.
    pub fn p_s(&self, s: usize) -> BigRational {
        if s > self.s_max {
            return BigRational::zero();
        }
        self.h0.coeff(s)
    }

    /// `P_s / s`: the un-normalized component-size frequency (components of
    /// size `s` per agent). Exact rational.
    pub fn chi_unnormalized(&self, s: usize) -> BigRational {
        assert!(s >= 2, "component sizes start at 2");
        self.p_s(s) / BigRational::from(BigInt::from(s as u64))
    }

    /// Normalizer `Σ_{s=2}^{s_max} P_s / s`, exact at this truncation.
    pub fn chi_total(&self) -> BigRational {
        self.chi_total.clone()
    }

    /// Normalized component-size distribution `χ(s)`: the probability that
    /// a random non-isolated finite component has exactly `s` agents.
    pub fn chi(&self, s: usize) -> BigRational {
        self.chi_unnormalized(s) / &self.chi_total
    }

    pub fn chi_f64(&self, s: usize) -> f64 {
        rational_to_f64(&self.chi(s))
    }
}

/// `G0` for the uniform degree law, as an explicit polynomial:
/// coefficient `1/k_max` on `x^1 ... x^k_max`.
fn degree_gf(k_max: u32, order: usize) -> Series {
    let mut coeffs = vec![BigRational::zero(); order + 1];
    let p = BigRational::new(BigInt::one(), BigInt::from(k_max));
    for item in coeffs.iter_mut().take((k_max as usize).min(order) + 1).skip(1) {
        *item = p.clone();
    }
    Series::from_coeffs(coeffs)
}

/// Solve `H = x G1(H)` by fixed-point iteration from `H = 0`. After the
/// m-th pass the coefficients through `x^m` are final, so pass `m` only
/// carries arithmetic through order `m` — the result is identical to
/// iterating at full order, just cheaper.
fn solve_branch_gf(g1: &Series, s_max: usize) -> Series {
    let mut h = Series::zero(0);
    for m in 1..=s_max {
        h = g1.compose_trunc(&h, m - 1).mul_x(m);
    }
    h
}
