//! Twist monodromy at the lattice, symbolic and family level.

mod expr;
mod family;
mod lattice;

pub use expr::{
    graded_twist_rewrite, normalize, phase_audit, phase_audit_weighted, AuditNode, GradedExpression,
    PhaseAudit, RewriteStrategy,
};
pub use family::{family_track, FamilyKind, FamilyModel, FamilyTrack, Wall};
pub use lattice::{dehn_twist_homology, PairingLattice};
