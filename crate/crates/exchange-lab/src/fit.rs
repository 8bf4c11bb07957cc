//! Least-squares fits of the functional forms the simulations produce:
//! exponential wealth laws `P(w) = C exp(-w / (b <w>))`, power-law tails
//! `P(w) = C / w^(1+alpha)`, condensation-time scaling `t_c = C N^gamma`,
//! plus wealth-class peak detection and the small statistics helpers the
//! experiment layer needs.
//!
//! All fits are unweighted least squares in log space over occupied bins;
//! zero counts are skipped rather than regularized. Scaling the histogram
//! by a constant shifts only the prefactor — shapes and residuals are
//! unchanged.

use crate::metrics::WealthHistogram;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} occupied points in range, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("log fit requires strictly positive abscissa values")]
    NonPositiveDomain,
    #[error("need at least {needed} distinct abscissa values, got {got}")]
    TooFewDistinct { needed: usize, got: usize },
    #[error("fit parameters are not finite (degenerate input)")]
    DegenerateFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitForm {
    Exponential,
    PowerLaw,
    Scaling,
}

impl FitForm {
    pub fn label(self) -> &'static str {
        match self {
            FitForm::Exponential => "exponential",
            FitForm::PowerLaw => "power-law",
            FitForm::Scaling => "scaling",
        }
    }
}

/// One completed fit.
///
/// `p1` is the shape parameter — the decay constant `b` in units of the
/// mean wealth (exponential), the tail exponent `alpha` (power law), or the
/// scaling exponent. `p2` is the prefactor `C`. `residual` is the sum of
/// squared residuals in log space, invariant under count rescaling.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub form: FitForm,
    pub range: (f64, f64),
    pub p1: f64,
    pub p2: f64,
    pub residual: f64,
    pub points: usize,
}

/// Plain least-squares line through `(x, y)` points.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub ss_res: f64,
    pub n: usize,
}

pub fn line_fit(points: &[(f64, f64)]) -> Result<LineFit, FitError> {
    let n = points.len();
    if n < 2 {
        return Err(FitError::InsufficientPoints { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(FitError::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        ss_res,
        n,
    })
}

fn finite_or_err(result: FitResult) -> Result<FitResult, FitError> {
    if result.p1.is_finite() && result.p2.is_finite() {
        Ok(result)
    } else {
        Err(FitError::DegenerateFit)
    }
}

/// Fit `count(w) = C exp(-w / (b <w>))` on occupied bins with
/// `lo <= w <= hi`: least squares on `(w, ln count)`, so
/// `b = -1 / (slope * mean_w)`.
pub fn fit_exponential(
    h: &WealthHistogram,
    lo: u64,
    hi: u64,
    mean_w: u64,
) -> Result<FitResult, FitError> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .filter(|&(w, c)| w >= lo && w <= hi && c > 0)
        .map(|(w, c)| (w as f64, (c as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(FitError::InsufficientPoints {
            needed: 3,
            got: pts.len(),
        });
    }
    let line = line_fit(&pts)?;
    finite_or_err(FitResult {
        form: FitForm::Exponential,
        range: (lo as f64, hi as f64),
        p1: -1.0 / (line.slope * mean_w as f64),
        p2: line.intercept.exp(),
        residual: line.ss_res,
        points: line.n,
    })
}

/// Fit `count(w) = C / w^(1+alpha)` on occupied bins with `lo <= w <= hi`:
/// least squares on `(ln w, ln count)`, exponent reported as `alpha` with
/// `slope = -(1 + alpha)`. The range must exclude `w = 0`.
pub fn fit_power_law(h: &WealthHistogram, lo: u64, hi: u64) -> Result<FitResult, FitError> {
    if lo == 0 {
        return Err(FitError::NonPositiveDomain);
    }
    let pts: Vec<(f64, f64)> = h
        .iter()
        .filter(|&(w, c)| w >= lo && w <= hi && c > 0)
        .map(|(w, c)| ((w as f64).ln(), (c as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(FitError::InsufficientPoints {
            needed: 2,
            got: pts.len(),
        });
    }
    let line = line_fit(&pts)?;
    finite_or_err(FitResult {
        form: FitForm::PowerLaw,
        range: (lo as f64, hi as f64),
        p1: -line.slope - 1.0,
        p2: line.intercept.exp(),
        residual: line.ss_res,
        points: line.n,
    })
}

/// Fit `t_c = C N^gamma` by least squares on `(ln N, ln t_c)`. Requires
/// three distinct abscissa values and strictly positive coordinates.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<FitResult, FitError> {
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(FitError::NonPositiveDomain);
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    if xs.len() < 3 {
        return Err(FitError::TooFewDistinct {
            needed: 3,
            got: xs.len(),
        });
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let line = line_fit(&pts)?;
    let lo = xs.first().copied().unwrap();
    let hi = xs.last().copied().unwrap();
    finite_or_err(FitResult {
        form: FitForm::Scaling,
        range: (lo, hi),
        p1: line.slope,
        p2: line.intercept.exp(),
        residual: line.ss_res,
        points: line.n,
    })
}

/// Minimum number of exchanges a mean-wealth agent survives before
/// bankruptcy at transfer size `dw`: floor of `mean_w / dw`.
pub fn min_exchanges(mean_w: u64, dw: u64) -> u64 {
    assert!(dw >= 1, "transfer size must be at least 1");
    mean_w / dw
}

/// A detected wealth class: the midpoint of the plateau of maximal
/// windowed mass, and the fraction of all agents inside that window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassPeak {
    pub location: f64,
    pub mass: f64,
}

/// Wealth-class structure of a histogram: smoothed non-poverty peaks plus
/// the mass parked below the poverty threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPeaks {
    pub peaks: Vec<ClassPeak>,
    pub zero_class_mass: f64,
}

/// Locate wealth classes as local maxima of boxcar-smoothed mass.
///
/// Counts below `poverty_line` form the zero class and are reported only
/// through `zero_class_mass`; they are blanked before smoothing so the
/// poverty spike cannot shadow nearby genuine classes. The smoothing
/// window spans `±0.1 mean_w` (at least ±1). A local maximum qualifies as
/// a peak when its windowed mass reaches `min_mass`; adjacent peaks whose
/// connecting valley stays above 0.8 of the smaller peak are treated as
/// one broad feature and merged into the taller one.
pub fn detect_classes(
    h: &WealthHistogram,
    mean_w: u64,
    min_mass: f64,
    poverty_line: u64,
) -> ClassPeaks {
    let n = h.n_agents();
    let Some(w_max) = h.max_wealth() else {
        return ClassPeaks {
            peaks: Vec::new(),
            zero_class_mass: 0.0,
        };
    };
    let size = w_max as usize + 1;
    let mut dense = vec![0u64; size];
    let mut zero_count = 0u64;
    for (w, c) in h.iter() {
        if w < poverty_line {
            zero_count += c;
        } else {
            dense[w as usize] = c;
        }
    }
    let nf = n as f64;
    let zero_class_mass = zero_count as f64 / nf;

    let win = ((0.1 * mean_w as f64).round() as usize).max(1);
    // Windowed counts via a prefix sum; integer values make plateau
    // comparison exact. The scan runs `win` positions past the support so
    // a spike at the top edge still centers its plateau correctly.
    let mut prefix = vec![0u64; size + 1];
    for (i, &c) in dense.iter().enumerate() {
        prefix[i + 1] = prefix[i] + c;
    }
    let scan = size + win;
    let windowed = |w: usize| -> u64 {
        let lo = w.saturating_sub(win).min(size - 1);
        let hi = (w + win).min(size - 1);
        prefix[hi + 1] - prefix[lo]
    };

    let mut peaks: Vec<ClassPeak> = Vec::new();
    let mut i = 0usize;
    while i < scan {
        let v = windowed(i);
        let mut j = i;
        while j + 1 < scan && windowed(j + 1) == v {
            j += 1;
        }
        let left_lower = i == 0 || windowed(i - 1) < v;
        let right_lower = j + 1 >= scan || windowed(j + 1) < v;
        if v > 0 && left_lower && right_lower && v as f64 / nf >= min_mass {
            peaks.push(ClassPeak {
                location: ((i + j) as f64 / 2.0).min(w_max as f64),
                mass: v as f64 / nf,
            });
        }
        i = j + 1;
    }

    // Merge shallow-valley neighbors, dropping the smaller of each pair.
    loop {
        let mut merged = false;
        for idx in 0..peaks.len().saturating_sub(1) {
            let a = peaks[idx];
            let b = peaks[idx + 1];
            let lo = a.location.ceil() as usize;
            let hi = b.location.floor() as usize;
            let valley = (lo..=hi).map(windowed).min().unwrap_or(0) as f64 / nf;
            if valley > 0.8 * a.mass.min(b.mass) {
                let drop = if a.mass >= b.mass { idx + 1 } else { idx };
                peaks.remove(drop);
                merged = true;
                break;
            }
        }
        if !merged {
            break;
        }
    }

    ClassPeaks {
        peaks,
        zero_class_mass,
    }
}

/// Welch's unequal-variance two-sample t-test.
#[derive(Debug, Clone, Copy)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

pub fn welch_t_test(a: &[f64], b: &[f64]) -> WelchTest {
    assert!(a.len() >= 2 && b.len() >= 2, "need two points per sample");
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let var = |s: &[f64], m: f64| {
        s.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (s.len() as f64 - 1.0)
    };
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (var(a, ma), var(b, mb));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        // Both samples are constant: equal means are indistinguishable,
        // different means are trivially distinct.
        let p = if ma == mb { 1.0 } else { 0.0 };
        return WelchTest {
            t: if ma == mb { 0.0 } else { f64::INFINITY },
            df: na + nb - 2.0,
            p,
        };
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid degrees of freedom");
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    WelchTest { t, df, p }
}
