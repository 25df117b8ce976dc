//! Clifford parallelism on PG(3,R) in both chiralities.
//!
//! Identifying R^4 with the quaternions, the left parallel class of a line
//! `L` is its orbit `{uL : |u| = 1}` under left multiplication; right classes
//! use right multiplication. Each class is a spread, and the class space is a
//! real projective plane coordinatized here by a unit 3-vector built from the
//! Pluecker split.
//!
//! Chirality convention (calibrated against `orbit_oracle`, see the tests):
//! left multiplication by unit quaternions preserves the difference split
//! `(p01 - p23, p02 - p31, p03 - p12)`, right multiplication preserves the
//! sum split `(p01 + p23, p02 + p31, p03 + p12)`. So the *left* invariant is
//! the difference vector and the *right* invariant is the sum vector.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::CliffordError;
use crate::geometry::{line_distance, ProjLine, ProjPoint};
use crate::quaternion::Quaternion;
use crate::sampling::s3_grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    Left,
    Right,
}

impl Chirality {
    pub const BOTH: [Chirality; 2] = [Chirality::Left, Chirality::Right];
}

impl std::fmt::Display for Chirality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Chirality::Left => write!(f, "left"),
            Chirality::Right => write!(f, "right"),
        }
    }
}

/// A parallel class label: a point of the real projective plane stored as a
/// unit, sign-canonical 3-vector.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ClassInvariant {
    axis: Vector3<f64>,
}

impl ClassInvariant {
    pub fn axis(&self) -> &Vector3<f64> {
        &self.axis
    }

    /// Distance in the projective plane: `min(|a - b|, |a + b|)`.
    pub fn distance(&self, other: &ClassInvariant) -> f64 {
        (self.axis - other.axis)
            .norm()
            .min((self.axis + other.axis).norm())
    }
}

/// Tolerance on invariant distance used by `is_parallel`.
pub const TOL_INVARIANT: f64 = 1e-9;
/// Line-distance threshold used by the brute-force orbit oracle.
pub const ORACLE_THRESHOLD: f64 = 0.05;

/// The image of `L` under multiplication by the unit quaternion `u` on the
/// given side.
pub fn translate_line(
    u: Quaternion,
    l: &ProjLine,
    side: Chirality,
) -> Result<ProjLine, CliffordError> {
    let n = u.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(CliffordError::NonUnitQuaternion(n));
    }
    let x = Quaternion::from_vec4(&l.basis().column(0).into_owned());
    let y = Quaternion::from_vec4(&l.basis().column(1).into_owned());
    let (a, b) = match side {
        Chirality::Left => (u * x, u * y),
        Chirality::Right => (x * u, y * u),
    };
    Ok(ProjLine::from_span(a.to_vec4(), b.to_vec4())?)
}

/// The unique line through `p` in the parallel class of `L`.
///
/// With basis quaternions `x, y` of `L` and `v` the quaternion of `p`, the
/// left parallel is `span(v, v x^-1 y)` (the class member `(v x^-1) L`) and
/// the right parallel is `span(v, y x^-1 v)`.
pub fn clifford_parallel(p: &ProjPoint, l: &ProjLine, side: Chirality) -> ProjLine {
    let v = Quaternion::from_vec4(p.coords());
    let x = Quaternion::from_vec4(&l.basis().column(0).into_owned());
    let y = Quaternion::from_vec4(&l.basis().column(1).into_owned());
    let second = match side {
        Chirality::Left => v * x.inverse() * y,
        Chirality::Right => y * x.inverse() * v,
    };
    ProjLine::from_span(v.to_vec4(), second.to_vec4())
        .expect("v and v*x^-1*y are independent for any basis x,y")
}

/// The class label of `L` for the given chirality.
pub fn class_invariant(l: &ProjLine, side: Chirality) -> ClassInvariant {
    let p = l.plucker();
    let mut axis = match side {
        Chirality::Left => Vector3::new(p[0] - p[3], p[1] - p[4], p[2] - p[5]),
        Chirality::Right => Vector3::new(p[0] + p[3], p[1] + p[4], p[2] + p[5]),
    };
    axis /= axis.norm();
    for i in 0..3 {
        if axis[i].abs() > 1e-12 {
            if axis[i] < 0.0 {
                axis = -axis;
            }
            break;
        }
    }
    ClassInvariant { axis }
}

pub fn is_parallel(l: &ProjLine, m: &ProjLine, side: Chirality) -> bool {
    is_parallel_with_tol(l, m, side, TOL_INVARIANT)
}

pub fn is_parallel_with_tol(l: &ProjLine, m: &ProjLine, side: Chirality, tol: f64) -> bool {
    class_invariant(l, side).distance(&class_invariant(m, side)) < tol
}

/// Brute-force definition of parallelism: scan a quasi-uniform grid of unit
/// quaternions for a translate of `L` close to `M`. Test oracle only.
pub fn orbit_oracle(l: &ProjLine, m: &ProjLine, side: Chirality, grid: usize) -> bool {
    assert!(grid >= 1000, "oracle needs a grid of at least 1000 points");
    let x = Quaternion::from_vec4(&l.basis().column(0).into_owned());
    let y = Quaternion::from_vec4(&l.basis().column(1).into_owned());
    s3_grid(grid, 0).any(|u| {
        let (a, b) = match side {
            Chirality::Left => (u * x, u * y),
            Chirality::Right => (x * u, y * u),
        };
        match ProjLine::from_span(a.to_vec4(), b.to_vec4()) {
            Ok(t) => line_distance(&t, m) < ORACLE_THRESHOLD,
            Err(_) => false,
        }
    })
}

/// `n` members of the class of `L`, the parallels through a quasi-uniform
/// sample of projective points.
pub fn class_sample(l: &ProjLine, side: Chirality, n: usize, seed: u64) -> Vec<ProjLine> {
    assert!(n >= 1, "sample size must be positive");
    s3_grid(n, seed)
        .map(|q| {
            let p = ProjPoint::new(q.to_vec4()).expect("unit quaternion");
            clifford_parallel(&p, l, side)
        })
        .collect()
}
