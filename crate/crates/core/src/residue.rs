//! The Wodzicki residue from the degree −n symbol component:
//!
//! res(A) = ∫_G (‖Re(σ_{−n})⁺‖ − ‖Re(σ_{−n})⁻‖) dx
//!        + i ∫_G (‖Im(σ_{−n})⁺‖ − ‖Im(σ_{−n})⁻‖) dx,
//!
//! with ‖·‖ the weak-ℓ¹ quasi-norm on the unitary dual and dx the
//! probability Haar measure, integrated by quadrature over frozen symbols.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flags::{self, Flag};
use crate::groups::GroupPoint;
use crate::summation::{binned_dual_sums, cumulative, CompensatedSum};
use crate::symbols::{extract_residue_component, Expansion, MatrixSymbol, SymbolField};
use crate::weakl1::{check_schedule, estimate_slope, ErrorSlot, PartialSumSeries, SlopeEstimate, TraceMode};
use crate::zeta::{zeta_residue_with_budget, ZetaResidue};

/// Weak-ℓ¹ norms of the four sign parts of one frozen symbol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourNorms {
    pub re_pos: SlopeEstimate,
    pub re_neg: SlopeEstimate,
    pub im_pos: SlopeEstimate,
    pub im_neg: SlopeEstimate,
}

impl FourNorms {
    fn all(&self) -> [&SlopeEstimate; 4] {
        [&self.re_pos, &self.re_neg, &self.im_pos, &self.im_neg]
    }

    pub fn error_bar(&self) -> f64 {
        self.all().iter().map(|e| e.error_bar).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenResidue {
    pub value: Complex64,
    /// Sum of the four norm error bars.
    pub error_bar: f64,
    pub norms: FourNorms,
    /// Slopes of Σ d_ξ Re Tr σ and Σ d_ξ Im Tr σ, the internal cross-check.
    pub signed_re: SlopeEstimate,
    pub signed_im: SlopeEstimate,
    pub flags: Vec<Flag>,
}

impl FrozenResidue {
    fn zero() -> Self {
        let z = SlopeEstimate::ZERO;
        FrozenResidue {
            value: Complex64::new(0.0, 0.0),
            error_bar: 0.0,
            norms: FourNorms { re_pos: z, re_neg: z, im_pos: z, im_neg: z },
            signed_re: z,
            signed_im: z,
            flags: Vec::new(),
        }
    }
}

/// Slack on the four-part identity beyond the combined error bars.
const FOUR_PART_SLACK: f64 = 1e-9;

/// Residue of the invariant operator with symbol `sym` (order −n).
pub fn frozen_residue(sym: &MatrixSymbol, schedule: &[f64]) -> Result<FrozenResidue> {
    check_schedule(schedule)?;
    let n = sym.group().manifold_dim() as f64;
    if sym.envelope().order > -n + 1e-9 {
        return Err(Error::invalid(format!(
            "residue needs the degree -{n} component, symbol order is {}",
            sym.envelope().order
        )));
    }
    if sym.is_zero() {
        return Ok(FrozenResidue::zero());
    }

    let errors = ErrorSlot::default();
    let bins = binned_dual_sums::<6, _>(&sym.group(), None, schedule, |xi| match sym.part_traces(xi) {
        Ok(t) => t.as_array(),
        Err(e) => {
            errors.record(e);
            [0.0; 6]
        }
    });
    errors.into_result()?;
    let rows = cumulative(&bins);
    let series = |k: usize, mode: TraceMode| PartialSumSeries {
        mode,
        points: schedule.iter().zip(&rows).map(|(&n, r)| (n, r[k])).collect(),
    };
    let norms = FourNorms {
        re_pos: estimate_slope(&series(0, TraceMode::AbsTrace))?,
        re_neg: estimate_slope(&series(1, TraceMode::AbsTrace))?,
        im_pos: estimate_slope(&series(2, TraceMode::AbsTrace))?,
        im_neg: estimate_slope(&series(3, TraceMode::AbsTrace))?,
    };
    let signed_re = estimate_slope(&series(4, TraceMode::SignedRe))?;
    let signed_im = estimate_slope(&series(5, TraceMode::SignedIm))?;

    let value = Complex64::new(
        norms.re_pos.value - norms.re_neg.value,
        norms.im_pos.value - norms.im_neg.value,
    );
    let mut flags = Vec::new();
    if norms.all().iter().any(|e| e.non_classical) {
        flags::insert(&mut flags, Flag::NonClassical);
    }
    let re_gap = (value.re - signed_re.value).abs();
    let im_gap = (value.im - signed_im.value).abs();
    let re_allow = norms.re_pos.error_bar + norms.re_neg.error_bar + signed_re.error_bar;
    let im_allow = norms.im_pos.error_bar + norms.im_neg.error_bar + signed_im.error_bar;
    if re_gap > re_allow + FOUR_PART_SLACK * (1.0 + value.re.abs())
        || im_gap > im_allow + FOUR_PART_SLACK * (1.0 + value.im.abs())
    {
        flags::insert(&mut flags, Flag::FourPartMismatch);
    }
    Ok(FrozenResidue {
        value,
        error_bar: norms.error_bar(),
        norms,
        signed_re,
        signed_im,
        flags,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeResidue {
    pub node: GroupPoint,
    pub weight: f64,
    pub residue: FrozenResidue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub zeta: ZetaResidue,
    pub agreement: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub residue: Complex64,
    pub per_node: Vec<NodeResidue>,
    pub quadrature_resolution: usize,
    pub schedule: Vec<f64>,
    /// Σ_nodes weight · (sum of the four per-node error bars).
    pub total_error_bar: f64,
    pub cross_check: Option<CrossCheck>,
    pub flags: Vec<Flag>,
}

impl ResidueReport {
    pub fn is_reliable(&self) -> bool {
        self.flags.is_empty()
    }
}

fn empty_report(field: &SymbolField, schedule: &[f64], flags: Vec<Flag>) -> ResidueReport {
    let q = field.quadrature();
    ResidueReport {
        residue: Complex64::new(0.0, 0.0),
        per_node: q
            .nodes
            .iter()
            .zip(&q.weights)
            .map(|(node, &weight)| NodeResidue { node: node.clone(), weight, residue: FrozenResidue::zero() })
            .collect(),
        quadrature_resolution: q.resolution,
        schedule: schedule.to_vec(),
        total_error_bar: 0.0,
        cross_check: None,
        flags,
    }
}

/// Σ_nodes weight · res(A_x) over the field's quadrature rule. Nodes that
/// share a symbol are computed once.
pub fn wodzicki_residue(field: &SymbolField, schedule: &[f64]) -> Result<ResidueReport> {
    check_schedule(schedule)?;
    let n = field.group().manifold_dim() as f64;
    if (field.degree() + n).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "field degree {} is not -{n}",
            field.degree()
        )));
    }

    // Distinct symbols in first-seen node order.
    let mut distinct: Vec<&MatrixSymbol> = Vec::new();
    let mut slot_of = Vec::with_capacity(field.nodes().len());
    for sym in field.nodes() {
        match distinct.iter().position(|d| d.same_evaluator(sym)) {
            Some(i) => slot_of.push(i),
            None => {
                slot_of.push(distinct.len());
                distinct.push(sym);
            }
        }
    }
    let frozen: Vec<FrozenResidue> = distinct
        .par_iter()
        .map(|sym| frozen_residue(sym, schedule))
        .collect::<Result<Vec<_>>>()?;

    let q = field.quadrature();
    let mut re = CompensatedSum::ZERO;
    let mut im = CompensatedSum::ZERO;
    let mut err = CompensatedSum::ZERO;
    let mut flags = Vec::new();
    let mut per_node = Vec::with_capacity(q.len());
    for ((node, &weight), &slot) in q.nodes.iter().zip(&q.weights).zip(&slot_of) {
        let r = &frozen[slot];
        re.add(weight * r.value.re);
        im.add(weight * r.value.im);
        err.add(weight * r.error_bar);
        for &f in &r.flags {
            flags::insert(&mut flags, f);
        }
        per_node.push(NodeResidue { node: node.clone(), weight, residue: r.clone() });
    }
    if !flags.is_empty() {
        flags::insert(&mut flags, Flag::Unreliable);
    }
    Ok(ResidueReport {
        residue: Complex64::new(re.value(), im.value()),
        per_node,
        quadrature_resolution: q.resolution,
        schedule: schedule.to_vec(),
        total_error_bar: err.value(),
        cross_check: None,
        flags,
    })
}

/// Selects σ_{−n} from the expansion, then integrates. Orders below −n give
/// an exact zero; a missing −n slot gives zero with a flag.
pub fn residue_from_expansion(exp: &Expansion, schedule: &[f64]) -> Result<ResidueReport> {
    check_schedule(schedule)?;
    let n = exp.quadrature().group.manifold_dim();
    let picked = extract_residue_component(exp, n);
    if picked.index.is_none() {
        let mut flags = picked.flags.clone();
        if !flags.is_empty() {
            flags::insert(&mut flags, Flag::Unreliable);
        }
        return Ok(empty_report(&picked.field, schedule, flags));
    }
    wodzicki_residue(&picked.field, schedule)
}

/// Relative slack allowed between the zeta and weak-ℓ¹ residues on top of
/// their error bars.
pub const CROSS_CHECK_SLACK: f64 = 0.02;

/// Whether two estimates agree within their error bars plus 2 % of `a`.
pub fn residues_agree(a: Complex64, a_err: f64, b: Complex64, b_err: f64) -> bool {
    (a - b).norm() <= a_err + b_err + CROSS_CHECK_SLACK * a.norm()
}

/// Attaches a zeta-route comparison. Only invariant fields are supported.
pub fn attach_zeta_cross_check(
    report: &mut ResidueReport,
    field: &SymbolField,
    s_schedule: &[f64],
    tol: f64,
    max_cutoff: f64,
) -> Result<()> {
    if !field.is_invariant() {
        return Err(Error::invalid("zeta cross-check needs an x-independent field"));
    }
    let zeta = zeta_residue_with_budget(&field.nodes()[0], s_schedule, tol, max_cutoff)?;
    let agreement = residues_agree(report.residue, report.total_error_bar, zeta.value, zeta.error_bar);
    if !agreement {
        flags::insert(&mut report.flags, Flag::CrossCheckDisagreement);
    }
    for &f in &zeta.flags {
        flags::insert(&mut report.flags, f);
    }
    report.cross_check = Some(CrossCheck { zeta, agreement });
    Ok(())
}
