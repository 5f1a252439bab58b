//! The rigidity index of formal data.

use crate::formal::{hom_h0, hom_irregularity, FormalType, Problem};

/// Local contribution `Irr(End) + r² − h⁰(End)` of one point.
pub fn local_defect(t: &FormalType) -> i64 {
    let r = t.rank() as i64;
    hom_irregularity(t, t) as i64 + r * r - hom_h0(t, t) as i64
}

/// `2r² − Σ_x [Irr_x(End) + r² − h⁰_x(End)]`.
pub fn rig_index(p: &Problem) -> i64 {
    let r = p.rank() as i64;
    2 * r * r - p.points.values().map(local_defect).sum::<i64>()
}
