//! Wodzicki residues of classical pseudo-differential operators on compact
//! Lie groups (tori T¹–T³ and SU(2)) via weak-ℓ¹ norms of the degree −n
//! symbol, with a zeta-function cross-check.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod flags;
pub mod groups;
pub mod matcalc;
pub mod residue;
pub mod summation;
pub mod symbols;
pub mod weakl1;
pub mod zeta;

pub use error::{Error, Result};
pub use flags::Flag;
pub use groups::{DualElement, DualLabel, GroupModel, GroupPoint, QuadratureRule};
pub use matcalc::CMatrix;
pub use residue::{frozen_residue, residue_from_expansion, wodzicki_residue, FrozenResidue, ResidueReport};
pub use symbols::{Envelope, Expansion, MatrixSymbol, SymbolField};
pub use weakl1::{estimate_slope, geometric_schedule, sum_series, PartialSumSeries, SlopeEstimate, TraceMode};
pub use zeta::{zeta_residue, zeta_trace, ZetaResidue, ZetaSample};
