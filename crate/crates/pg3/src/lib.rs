//! Line geometry of real projective 3-space.
//!
//! The crate provides canonical numeric models of the points, lines and
//! hyperplanes of PG(3,R); Clifford parallelism in both chiralities through
//! the quaternion model of R^4; classification of collineations by numerical
//! Jordan type with compactness and automorphism verdicts; power-iteration
//! dynamics on the line Grassmannian; and constructive realizations of the
//! disjoint-parallel, common-transversal and fixed-point-pencil lemmas, used
//! by the falsification harness to certify that a collineation cannot
//! preserve a topological parallelism.

pub mod clifford;
pub mod collineation;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod falsify;
pub mod geometry;
mod jordan;
pub mod json;
pub mod lemmas;
pub mod quaternion;
pub mod sampling;

pub use clifford::{class_invariant, clifford_parallel, is_parallel, orbit_oracle, Chirality};
pub use collineation::{
    apply_line, apply_point, automorphism_verdict, bounded_powers_oracle, classify, classify_case,
    compact_closure, CaseLabel, CaseParams, Collineation, JordanCaseData, Verdicts,
};
pub use geometry::{
    contains, hausdorff_distance, join, limit_detect, line_distance, meet, Hyperplane, ProjLine,
    ProjPoint,
};
pub use quaternion::Quaternion;
