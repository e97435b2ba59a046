//! Weak-ℓ¹ quasi-norm on the unitary dual,
//! lim_{N→∞} (1/log N) Σ_{⟨ξ⟩≤N} d_ξ Tr|σ(ξ)|,
//! estimated as the slope of the partial sums against log N. The slope
//! cancels the O(1) constant that makes the raw ratio converge only like
//! 1/log N.
//!
//! The error bar is a fit-stability heuristic, not a rigorous bound.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{check_cutoff, DualElement};
use crate::summation::{binned_dual_sums, cumulative};
use crate::symbols::MatrixSymbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    /// Σ d_ξ Tr|σ(ξ)|
    AbsTrace,
    /// Σ d_ξ Re Tr σ(ξ)
    SignedRe,
    /// Σ d_ξ Im Tr σ(ξ)
    SignedIm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialSumSeries {
    pub mode: TraceMode,
    /// (N, S(N)) with N strictly increasing.
    pub points: Vec<(f64, f64)>,
}

impl PartialSumSeries {
    pub fn cutoffs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn sums(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub value: f64,
    pub error_bar: f64,
    /// First and last series index of the fit window.
    pub window: (usize, usize),
    /// Max absolute residual of the linear fit over the window.
    pub fit_residual: f64,
    pub non_classical: bool,
}

impl SlopeEstimate {
    pub const ZERO: SlopeEstimate = SlopeEstimate {
        value: 0.0,
        error_bar: 0.0,
        window: (0, 0),
        fit_residual: 0.0,
        non_classical: false,
    };
}

/// Geometric schedule start·factor^k, k = 0..count.
pub fn geometric_schedule(start: f64, factor: f64, count: usize) -> Result<Vec<f64>> {
    check_cutoff(start)?;
    if !(factor > 1.0) || !factor.is_finite() {
        return Err(Error::invalid(format!("schedule factor must exceed 1, got {factor}")));
    }
    if count == 0 {
        return Err(Error::invalid("schedule needs at least one cutoff"));
    }
    Ok((0..count).map(|k| start * factor.powi(k as i32)).collect())
}

pub(crate) fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::invalid("empty cutoff schedule"));
    }
    for &n in schedule {
        check_cutoff(n)?;
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("cutoff schedule must be strictly increasing"));
    }
    Ok(())
}

/// Collects the first error raised inside a parallel reduction.
#[derive(Default)]
pub(crate) struct ErrorSlot(Mutex<Option<Error>>);

impl ErrorSlot {
    pub(crate) fn record(&self, e: Error) {
        let mut slot = self.0.lock().unwrap();
        if slot.is_none() {
            *slot = Some(e);
        }
    }

    pub(crate) fn into_result(self) -> Result<()> {
        match self.0.into_inner().unwrap() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn mode_term(sym: &MatrixSymbol, mode: TraceMode, xi: &DualElement, errors: &ErrorSlot) -> f64 {
    match mode {
        TraceMode::AbsTrace => sym.abs_trace(xi).unwrap_or_else(|e| {
            errors.record(e);
            0.0
        }),
        TraceMode::SignedRe => sym.trace(xi).re,
        TraceMode::SignedIm => sym.trace(xi).im,
    }
}

/// S(cutoff) in the requested mode.
pub fn partial_sum(sym: &MatrixSymbol, cutoff: f64, mode: TraceMode) -> Result<f64> {
    check_cutoff(cutoff)?;
    Ok(sum_series(sym, &[cutoff], mode)?.points[0].1)
}

/// Cumulative sums at every cutoff of the schedule. Each class is evaluated
/// once, in the bin of the first cutoff containing it.
pub fn sum_series(sym: &MatrixSymbol, schedule: &[f64], mode: TraceMode) -> Result<PartialSumSeries> {
    check_schedule(schedule)?;
    let errors = ErrorSlot::default();
    let bins = if sym.is_zero() {
        vec![[crate::summation::CompensatedSum::ZERO; 1]; schedule.len()]
    } else {
        binned_dual_sums::<1, _>(&sym.group(), None, schedule, |xi| [mode_term(sym, mode, xi, &errors)])
    };
    errors.into_result()?;
    let points = schedule
        .iter()
        .zip(cumulative(&bins))
        .map(|(&n, s)| (n, s[0]))
        .collect();
    Ok(PartialSumSeries { mode, points })
}

/// Least-squares line y = a + b·x, returned as (a, b).
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

fn fit_window(log_n: &[f64], s: &[f64]) -> (f64, f64) {
    let (a, b) = linear_fit(log_n, s);
    let resid = log_n
        .iter()
        .zip(s)
        .map(|(x, y)| (y - (a + b * x)).abs())
        .fold(0.0, f64::max);
    (b, resid)
}

pub const MIN_SLOPE_ENTRIES: usize = 4;
/// Threshold, relative to |slope|, on the drift between the early and late
/// halves of the fit window (and on residual/log-span) for the
/// non-classical flag.
pub const NON_CLASSICAL_RATIO: f64 = 0.1;

/// Slope of S against log N over the trailing half of the series (at least
/// four entries). The error bar is the larger of the shift to the window one
/// entry earlier and 2·residual/log-span.
pub fn estimate_slope(series: &PartialSumSeries) -> Result<SlopeEstimate> {
    let len = series.points.len();
    if len < MIN_SLOPE_ENTRIES {
        return Err(Error::invalid(format!(
            "slope estimation needs at least {MIN_SLOPE_ENTRIES} cutoffs, got {len}"
        )));
    }
    let first = series.points[0].0;
    let last = series.points[len - 1].0;
    if last < 4.0 * first {
        return Err(Error::invalid("slope estimation needs cutoffs spanning two octaves"));
    }
    let log_n: Vec<f64> = series.points.iter().map(|p| p.0.ln()).collect();
    let s: Vec<f64> = series.sums();

    let w = (len / 2).max(MIN_SLOPE_ENTRIES);
    let lo = len - w;
    let (slope, resid) = fit_window(&log_n[lo..], &s[lo..]);
    let span = log_n[len - 1] - log_n[lo];
    let shift = if lo >= 1 {
        let (prev, _) = fit_window(&log_n[lo - 1..len - 1], &s[lo - 1..len - 1]);
        (slope - prev).abs()
    } else {
        0.0
    };
    let error_bar = shift.max(2.0 * resid / span);
    let mid = lo + w / 2;
    let (early, _) = fit_window(&log_n[lo..=mid], &s[lo..=mid]);
    let (late, _) = fit_window(&log_n[mid..], &s[mid..]);
    let bent = (late - early).abs() > NON_CLASSICAL_RATIO * slope.abs();
    Ok(SlopeEstimate {
        value: slope,
        error_bar,
        window: (lo, len - 1),
        fit_residual: resid,
        non_classical: bent || resid > NON_CLASSICAL_RATIO * slope.abs() * span,
    })
}

/// Slope over the trailing ≤ 4 entries ending at each row; `None` on the
/// first row.
pub fn running_slopes(series: &PartialSumSeries) -> Vec<Option<f64>> {
    let log_n: Vec<f64> = series.points.iter().map(|p| p.0.ln()).collect();
    let s = series.sums();
    (0..s.len())
        .map(|j| {
            if j == 0 {
                return None;
            }
            let lo = j.saturating_sub(MIN_SLOPE_ENTRIES - 1);
            Some(linear_fit(&log_n[lo..=j], &s[lo..=j]).1)
        })
        .collect()
}
