//! Zeta-trace route to the residue: f(−s) = Σ_ξ d_ξ Tr[σ(ξ)] ⟨ξ⟩^{−s} for
//! s > 0, and the residue lim_{s→0⁺} s·f(−s) by real-axis extrapolation.
//!
//! Truncated sums are completed with a tail model. For a symbol of order −n
//! the trace mass per shell behaves like ρ·dt/t, so the tail beyond N is
//! ρ·N^{−s}/s. The log-density ρ is read off the last octave of the
//! truncated sum; the tail bound is built from its octave-to-octave drift.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flags::{self, Flag};
use crate::groups::GroupModel;
use crate::summation::{binned_dual_sums, CompensatedSum};
use crate::symbols::MatrixSymbol;

/// Safety factor applied to the tail-model uncertainty.
pub const TAIL_SAFETY: f64 = 2.0;
/// Relative gap between quadratic and linear extrapolants that flags a
/// non-affine s·f(−s).
pub const POLE_SHAPE_RATIO: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaSample {
    /// Evaluation point z = −s.
    pub s: f64,
    /// Truncated sum plus tail model.
    pub value: Complex64,
    pub partial: Complex64,
    pub tail_model: Complex64,
    /// Estimated log-density ρ of d_ξ Tr σ(ξ) at the cutoff.
    pub density: Complex64,
    pub truncation_cutoff: f64,
    pub tail_bound: f64,
}

/// Largest dual cutoff the zeta route will reach before giving up.
pub fn default_cutoff_budget(group: &GroupModel) -> f64 {
    match *group {
        GroupModel::Torus { n: 1 } => 2f64.powi(24),
        GroupModel::Torus { n: 2 } => 2f64.powi(12),
        GroupModel::Torus { .. } => 2f64.powi(8),
        GroupModel::Su2 => 2f64.powi(24),
    }
}

fn check_order(sym: &MatrixSymbol) -> Result<()> {
    let n = sym.group().manifold_dim() as f64;
    if sym.envelope().order > -n + 1e-9 {
        return Err(Error::invalid(format!(
            "zeta trace needs a symbol of order -{n}, declared order is {}",
            sym.envelope().order
        )));
    }
    Ok(())
}

/// f(−s) with the default cutoff budget.
pub fn zeta_trace(sym: &MatrixSymbol, s: f64, tol: f64) -> Result<ZetaSample> {
    zeta_trace_with_budget(sym, s, tol, default_cutoff_budget(&sym.group()))
}

/// f(−s) with doubling cutoffs N = 2, 4, 8, … ≤ `max_cutoff`, stopping at the
/// first N whose tail bound is ≤ tol·max(1, |partial|).
pub fn zeta_trace_with_budget(sym: &MatrixSymbol, s: f64, tol: f64, max_cutoff: f64) -> Result<ZetaSample> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::invalid(format!("zeta evaluation needs s > 0, got {s}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("zeta tolerance must be positive, got {tol}")));
    }
    if !(max_cutoff >= 2.0) {
        return Err(Error::invalid("zeta cutoff budget must be at least 2"));
    }
    check_order(sym)?;
    let zero = Complex64::new(0.0, 0.0);
    if sym.is_zero() {
        return Ok(ZetaSample {
            s,
            value: zero,
            partial: zero,
            tail_model: zero,
            density: zero,
            truncation_cutoff: 1.0,
            tail_bound: 0.0,
        });
    }

    let group = sym.group();
    let mut weighted = [CompensatedSum::ZERO; 2];
    let mut densities: Vec<Complex64> = Vec::new();
    let mut lower: Option<f64> = None;
    let mut cutoff = 2.0f64.min(max_cutoff);
    let mut best: Option<ZetaSample> = None;
    loop {
        let bins = binned_dual_sums::<4, _>(&group, lower, &[cutoff], |xi| {
            let t = sym.trace(xi);
            let w = xi.weight.powf(-s);
            [t.re * w, t.im * w, t.re, t.im]
        });
        weighted[0].merge(&bins[0][0]);
        weighted[1].merge(&bins[0][1]);
        if let Some(lo) = lower {
            let log_width = (cutoff / lo).ln();
            densities.push(Complex64::new(bins[0][2].value(), bins[0][3].value()) / log_width);
        }
        let partial = Complex64::new(weighted[0].value(), weighted[1].value());

        if densities.len() >= 3 {
            let k = densities.len();
            let rho = densities[k - 1];
            let drift = (densities[k - 1] - densities[k - 2])
                .norm()
                .max((densities[k - 2] - densities[k - 3]).norm() / 2.0);
            let decay = cutoff.powf(-s);
            let tail_model = rho * (decay / s);
            let tail_bound = TAIL_SAFETY * drift * decay * (1.0 / s + 2.0);
            let sample = ZetaSample {
                s,
                value: partial + tail_model,
                partial,
                tail_model,
                density: rho,
                truncation_cutoff: cutoff,
                tail_bound,
            };
            if tail_bound <= tol * partial.norm().max(1.0) {
                return Ok(sample);
            }
            best = Some(sample);
        }

        if cutoff >= max_cutoff {
            let sample = best.unwrap_or(ZetaSample {
                s,
                value: partial,
                partial,
                tail_model: zero,
                density: zero,
                truncation_cutoff: cutoff,
                tail_bound: f64::INFINITY,
            });
            return Err(Error::BudgetExceeded(Box::new(sample)));
        }
        lower = Some(cutoff);
        cutoff = (2.0 * cutoff).min(max_cutoff);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaResidue {
    /// Linear extrapolation of s·f(−s) to s = 0 over the last three samples.
    pub value: Complex64,
    pub error_bar: f64,
    pub two_point: Complex64,
    pub quadratic: Complex64,
    pub samples: Vec<ZetaSample>,
    pub flags: Vec<Flag>,
}

fn check_s_schedule(s_schedule: &[f64]) -> Result<()> {
    if s_schedule.len() < 3 {
        return Err(Error::invalid("zeta residue needs at least three values of s"));
    }
    if s_schedule.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::invalid("every s must be positive and finite"));
    }
    if s_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("s schedule must be strictly decreasing"));
    }
    Ok(())
}

/// Residue at z = 0 with the default cutoff budget.
pub fn zeta_residue(sym: &MatrixSymbol, s_schedule: &[f64], tol: f64) -> Result<ZetaResidue> {
    zeta_residue_with_budget(sym, s_schedule, tol, default_cutoff_budget(&sym.group()))
}

/// Residue lim_{s→0⁺} s·f(−s). Since f(−s) = C/s + c₀ + O(s), g(s) = s·f(−s)
/// is affine near 0; the last three samples are fitted by a line.
pub fn zeta_residue_with_budget(
    sym: &MatrixSymbol,
    s_schedule: &[f64],
    tol: f64,
    max_cutoff: f64,
) -> Result<ZetaResidue> {
    check_s_schedule(s_schedule)?;
    let samples = s_schedule
        .iter()
        .map(|&s| zeta_trace_with_budget(sym, s, tol, max_cutoff))
        .collect::<Result<Vec<_>>>()?;

    let tail = &samples[samples.len() - 3..];
    let x: Vec<f64> = tail.iter().map(|t| t.s).collect();
    let g: Vec<Complex64> = tail.iter().map(|t| t.value * t.s).collect();

    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    // intercept = Σ c_i g_i
    let coeffs: Vec<f64> = x.iter().map(|xi| 1.0 / n - mx * (xi - mx) / sxx).collect();
    let linear: Complex64 = coeffs.iter().zip(&g).map(|(c, gi)| gi * *c).sum();

    let (xa, xb) = (x[1], x[2]);
    let two_point = (g[2] * xa - g[1] * xb) / (xa - xb);

    let quadratic: Complex64 = (0..3)
        .map(|i| {
            let l: f64 = (0..3).filter(|&j| j != i).map(|j| -x[j] / (x[i] - x[j])).product();
            g[i] * l
        })
        .sum();

    let propagated: f64 = coeffs
        .iter()
        .zip(tail)
        .map(|(c, t)| c.abs() * t.s * t.tail_bound)
        .sum();
    let error_bar = (linear - two_point).norm() + propagated;

    let mut flags = Vec::new();
    if (quadratic - linear).norm() > POLE_SHAPE_RATIO * linear.norm() + f64::MIN_POSITIVE {
        flags::insert(&mut flags, Flag::HigherOrderPole);
    }
    Ok(ZetaResidue {
        value: linear,
        error_bar,
        two_point,
        quadratic,
        samples,
        flags,
    })
}
