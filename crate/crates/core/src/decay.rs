//! Log-log slope fits of decay series and comparison with predicted rates.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{check_param, Error, Result};
use crate::math;

/// Fewest in-window samples accepted by [`fit_slope`].
pub const MIN_SAMPLES: usize = 8;
/// Largest allowed gap between the full and tail slopes of a stable fit.
pub const TAIL_TOLERANCE: f64 = 0.03;

/// `(t, value)` samples with increasing `t > 0` and `value > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub label: String,
    samples: Vec<(f64, f64)>,
    dropped: usize,
}

impl DecaySeries {
    /// Non-positive or non-finite values are dropped and counted.
    pub fn new(label: impl Into<String>, samples: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut kept = Vec::new();
        let mut dropped = 0;
        let mut last = 0.0;
        for (t, v) in samples {
            check_param("t", t, t > last, "sample times must be positive and strictly increasing")?;
            last = t;
            if v > 0.0 && v.is_finite() {
                kept.push((t, v));
            } else {
                dropped += 1;
            }
        }
        Ok(Self { label: label.into(), samples: kept, dropped })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            label: self.label.clone(),
            samples: self.samples.iter().map(|&(t, v)| (t, c * v)).collect(),
            dropped: self.dropped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FitWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        check_param("window", lo, lo > 0.0 && hi > lo, "window needs 0 < lo < hi")?;
        Ok(Self { lo, hi })
    }

    /// `[T/10, T]`.
    pub fn last_decade(t_final: f64) -> Result<Self> {
        Self::new(t_final / 10.0, t_final)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo * (1.0 - 1e-12) && t <= self.hi * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: FitWindow,
    /// Root-mean-square residual in `log value`.
    pub rms: f64,
    pub samples: usize,
    /// Slope over `t >= sqrt(lo · hi)`.
    pub tail_slope: f64,
    pub tail_stable: bool,
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least squares of `log value` on `log t` over the window.
pub fn fit_slope(series: &DecaySeries, window: FitWindow) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = series
        .samples()
        .iter()
        .filter(|(t, _)| window.contains(*t))
        .map(|&(t, v)| (math::ln(t), math::ln(v)))
        .collect();
    let span = match (points.first(), points.last()) {
        (Some(a), Some(b)) => math::exp(b.0 - a.0),
        _ => 0.0,
    };
    if points.len() < MIN_SAMPLES || span < 10.0 * (1.0 - 1e-9) {
        return Err(Error::InsufficientSpan { samples: points.len(), span });
    }
    let (slope, intercept) = least_squares(&points);
    let rms = math::sqrt(
        points.iter().map(|p| (p.1 - slope * p.0 - intercept) * (p.1 - slope * p.0 - intercept)).sum::<f64>()
            / points.len() as f64,
    );
    let split = 0.5 * (math::ln(window.lo) + math::ln(window.hi));
    let tail: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0 >= split - 1e-12).collect();
    let (tail_slope, tail_stable) = if tail.len() >= 2 {
        let s = least_squares(&tail).0;
        (s, math::abs(s - slope) <= TAIL_TOLERANCE)
    } else {
        (f64::NAN, false)
    };
    Ok(SlopeFit { slope, intercept, window, rms, samples: points.len(), tail_slope, tail_stable })
}

/// Predicted decay exponents, as positive numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedExponents {
    pub dim: usize,
    pub alpha: f64,
    /// `‖√a e^{tL} f‖_{L²}`: `(N-α)/(2(2-α))`.
    pub heat_l2: f64,
    /// `∫ Φ a |∂_t^k u|²`: `(N-α)/(2-α) + 2k`.
    pub energy: [f64; 3],
    /// `∫ Φ |∇∂_t^k u|²`: `(N-α)/(2-α) + 2k + 1`.
    pub grad: [f64; 3],
    /// `‖√a (u - v)‖_{L²}`: `(N-α)/(2(2-α)) + (2-2α)/(2-α)`.
    pub thm1_diff: f64,
}

pub fn expected_exponents(dim: usize, alpha: f64) -> Result<ExpectedExponents> {
    check_param("N", dim as f64, dim >= 2, "dimension must be at least 2")?;
    check_param("alpha", alpha, (0.0..1.0).contains(&alpha), "alpha must lie in [0, 1)")?;
    let base = (dim as f64 - alpha) / (2.0 - alpha);
    Ok(ExpectedExponents {
        dim,
        alpha,
        heat_l2: 0.5 * base,
        energy: [base, base + 2.0, base + 4.0],
        grad: [base + 1.0, base + 3.0, base + 5.0],
        thm1_diff: 0.5 * base + (2.0 - 2.0 * alpha) / (2.0 - alpha),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictMode {
    /// `|slope + expected| <= tol`.
    TwoSided,
    /// `slope <= -expected + tol`.
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateVerdict {
    pub slope: f64,
    pub expected: f64,
    pub mode: VerdictMode,
    pub tol: f64,
    pub tail_stable: bool,
    pub passed: bool,
}

pub fn verdict(fit: &SlopeFit, expected: f64, mode: VerdictMode, tol: f64) -> RateVerdict {
    let passed = match mode {
        VerdictMode::TwoSided => math::abs(fit.slope + expected) <= tol,
        VerdictMode::UpperBound => fit.slope <= -expected + tol,
    };
    RateVerdict { slope: fit.slope, expected, mode, tol, tail_stable: fit.tail_stable, passed }
}

/// `sup s(t) / s(t_first)` over the window, where
/// `s(t) = (shift + t)^{exponent} · value(t)`. Bounded scaled series keep
/// this ratio of order one.
pub fn scaled_growth(series: &DecaySeries, window: FitWindow, exponent: f64, shift: f64) -> Result<f64> {
    let scaled: Vec<f64> = series
        .samples()
        .iter()
        .filter(|(t, _)| window.contains(*t))
        .map(|&(t, v)| math::powf(shift + t, exponent) * v)
        .collect();
    let first = *scaled.first().ok_or(Error::InsufficientSpan { samples: 0, span: 0.0 })?;
    Ok(scaled.iter().copied().fold(0.0, f64::max) / first)
}

/// `n` points from `lo` to `hi` spaced evenly in `log t`.
pub fn geometric_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let ratio = math::ln(hi / lo) / (n - 1) as f64;
    (0..n)
        .map(|k| if k + 1 == n { hi } else { lo * math::exp(ratio * k as f64) })
        .collect()
}
