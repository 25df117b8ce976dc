//! Error types, one enum per subsystem.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("zero or non-finite vector")]
    ZeroVector,
    #[error("spanning vectors are projectively dependent")]
    DegenerateSpan,
    #[error("cannot join coincident points")]
    DegenerateJoin,
    #[error("cannot intersect a line with itself")]
    IdenticalLines,
    #[error("6-vector does not satisfy the Klein quadric relation")]
    InvalidPlucker,
    #[error("line lies inside the hyperplane")]
    LineInHyperplane,
    #[error("empty line set")]
    EmptySet,
    #[error("trace shorter than the detection window")]
    InsufficientData,
}

#[derive(Debug, Error, PartialEq)]
pub enum CliffordError {
    #[error("quaternion norm {0} is not 1 within tolerance")]
    NonUnitQuaternion(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum CollineationError {
    #[error("matrix is singular (|det| = {0:.3e})")]
    Singular(f64),
    #[error("eigenvalue clustering is ambiguous; candidate labels {0:?} and {1:?}")]
    IllConditioned(
        crate::collineation::CaseLabel,
        crate::collineation::CaseLabel,
    ),
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("eigenvalue modulus {0} is not 1 within tolerance")]
    NonUnitModulus(f64),
    #[error("found only {found} of {requested} indices up to n = {nmax}; best defect {best_defect:.3e} at n = {best_n}")]
    ScheduleNotFound {
        requested: usize,
        found: usize,
        nmax: u64,
        best_defect: f64,
        best_n: u64,
    },
}

#[derive(Debug, Error)]
pub enum LemmaError {
    #[error("no admissible parallel found after {0} samples")]
    SearchExhausted(usize),
    #[error("the two lines intersect; transversal search requires disjoint lines")]
    NotDisjoint,
    #[error("no invariant collision found at grid {grid}; best distance {best:.3e}")]
    CollisionNotFound { grid: usize, best: f64 },
    #[error("point is not fixed by the collineation (moved by {0:.3e})")]
    NotFixed(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum FalsifyError {
    #[error("verdict is Possible; nothing to falsify (measured invariance defect {defect:.3e})")]
    VerdictPossible { defect: f64 },
    #[error("witness search failed for case {case}: {reason}")]
    WitnessSearchFailed { case: String, reason: String },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Lemma(#[from] LemmaError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
