use std::fmt;

use serde::{Deserialize, Serialize};

/// Diagnostic attached to an estimate or report. Flags never abort a
/// computation; they mark its result as needing inspection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// Partial sums are not affine in log N over the fit window.
    NonClassical,
    /// The expansion has no component of degree −n.
    ComponentMissing,
    /// ‖Re⁺‖ − ‖Re⁻‖ (or the Im analogue) disagrees with the signed-trace slope.
    FourPartMismatch,
    /// s·f(−s) is visibly non-affine near s = 0.
    HigherOrderPole,
    /// Zeta tolerance not reached within the cutoff budget.
    BudgetExceeded,
    /// Zeta residue and weak-ℓ¹ residue disagree beyond their error bars.
    CrossCheckDisagreement,
    /// At least one quadrature node carries a flag.
    Unreliable,
}

impl Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::NonClassical => "non_classical",
            Flag::ComponentMissing => "component_missing",
            Flag::FourPartMismatch => "four_part_mismatch",
            Flag::HigherOrderPole => "higher_order_pole",
            Flag::BudgetExceeded => "budget_exceeded",
            Flag::CrossCheckDisagreement => "cross_check_disagreement",
            Flag::Unreliable => "unreliable",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub(crate) fn insert(flags: &mut Vec<Flag>, flag: Flag) {
    if let Err(pos) = flags.binary_search(&flag) {
        flags.insert(pos, flag);
    }
}
