//! Power iteration of collineations on the line Grassmannian: renormalized
//! matrix powers, recurrence schedules along which the unit-modulus
//! eigenvalue part returns to the identity, orbit traces with limit
//! detection, and the quantitative parallelism-invariance defect.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::clifford::{class_invariant, clifford_parallel, Chirality};
use crate::collineation::{apply_line, Collineation};
use crate::error::ScheduleError;
use crate::geometry::{limit_detect, line_distance, Mat4, ProjLine};
use crate::sampling::{random_line, random_point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `g^n` (any integer `n`), renormalized by the largest-magnitude entry
/// after every multiplication so large-exponent powers of projective
/// representatives never overflow. Uses binary exponentiation.
pub fn matrix_power(g: &Collineation, n: i64) -> Collineation {
    let renorm = |m: Mat4| {
        let max = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        m / max
    };
    let base = if n < 0 {
        *g.inverse().normalized()
    } else {
        *g.normalized()
    };
    let mut exp = n.unsigned_abs();
    let mut square = renorm(base);
    let mut acc = Mat4::identity();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = renorm(acc * square);
        }
        square = renorm(square * square);
        exp >>= 1;
    }
    Collineation::from_power_representative(acc)
}

/// Condition-number bound per chunk of `apply_power_to_line`; keeps the
/// wedge of the image basis well above the degeneracy threshold.
const CHUNK_CONDITION_LIMIT: f64 = 1e4;

/// The image of a line under `g^n`, computed by subspace iteration: the
/// exponent is split into chunks whose power representatives stay
/// well-conditioned, re-orthonormalizing the basis between chunks. A single
/// large power would drive both basis images into the dominant eigendirection
/// and lose the subspace.
pub fn apply_power_to_line(g: &Collineation, n: i64, line: &ProjLine) -> ProjLine {
    let renorm = |m: Mat4| {
        let max = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        m / max
    };
    let cond = |m: &Mat4| {
        let sv = m.svd(false, false).singular_values;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for s in sv.iter() {
            lo = lo.min(*s);
            hi = hi.max(*s);
        }
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    };
    let base = if n < 0 {
        *g.inverse().normalized()
    } else {
        *g.normalized()
    };
    let base = renorm(base);
    let mut remaining = n.unsigned_abs();
    let mut current = *line;
    while remaining > 0 {
        // largest doubling chunk that stays well-conditioned
        let mut rep = base;
        let mut exp = 1u64;
        loop {
            if 2 * exp > remaining {
                break;
            }
            let next = renorm(rep * rep);
            if cond(&next) > CHUNK_CONDITION_LIMIT {
                break;
            }
            rep = next;
            exp *= 2;
        }
        current = apply_line(&Collineation::from_power_representative(rep), &current);
        remaining -= exp;
    }
    current
}

/// Indices `n(k)` with `max_j |a_j^n - 1| < eps` for a list of unit-modulus
/// eigenvalues; along such a schedule the semisimple unit part of a
/// collineation returns to the identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecurrenceSchedule {
    pub indices: Vec<u64>,
    /// The eps the scan was run with.
    pub target_defect: f64,
    /// Largest defect over the returned indices.
    pub achieved_defect: f64,
}

impl RecurrenceSchedule {
    /// Every index qualifies (no unit-rotation part to control).
    pub fn unconstrained(count: usize) -> Self {
        Self {
            indices: (1..=count as u64).collect(),
            target_defect: 0.0,
            achieved_defect: 0.0,
        }
    }

    /// Geometric thinning: keep indices that at least double each step.
    /// Pushes orbit dynamics to large exponents in few steps.
    pub fn thin_geometric(&self) -> Self {
        let mut indices = Vec::new();
        let mut next = 0u64;
        for &n in &self.indices {
            if n >= next {
                indices.push(n);
                next = 2 * n;
            }
        }
        Self {
            indices,
            target_defect: self.target_defect,
            achieved_defect: self.achieved_defect,
        }
    }
}

/// Scan `n = 1..nmax` for `count` indices where every eigenvalue power is
/// within `eps` of 1.
pub fn recurrence_schedule(
    unit_eigenvalues: &[Complex<f64>],
    count: usize,
    eps: f64,
    nmax: u64,
) -> Result<RecurrenceSchedule, ScheduleError> {
    for a in unit_eigenvalues {
        if (a.norm() - 1.0).abs() > 1e-9 {
            return Err(ScheduleError::NonUnitModulus(a.norm()));
        }
    }
    if unit_eigenvalues.is_empty() {
        return Ok(RecurrenceSchedule::unconstrained(count));
    }
    let mut powers: Vec<Complex<f64>> = unit_eigenvalues.iter().map(|a| a / a.norm()).collect();
    let units: Vec<Complex<f64>> = powers.clone();
    let mut indices = Vec::with_capacity(count);
    let mut achieved: f64 = 0.0;
    let mut best_defect = f64::INFINITY;
    let mut best_n = 0u64;
    for n in 1..=nmax {
        if n > 1 {
            for (p, u) in powers.iter_mut().zip(&units) {
                *p *= u;
                *p /= p.norm(); // keep the incremental powers on the circle
            }
        }
        let defect = powers
            .iter()
            .map(|p| (p - Complex::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max);
        if defect < best_defect {
            best_defect = defect;
            best_n = n;
        }
        if defect < eps {
            indices.push(n);
            achieved = achieved.max(defect);
            if indices.len() == count {
                return Ok(RecurrenceSchedule {
                    indices,
                    target_defect: eps,
                    achieved_defect: achieved,
                });
            }
        }
    }
    Err(ScheduleError::ScheduleNotFound {
        requested: count,
        found: indices.len(),
        nmax,
        best_defect,
        best_n,
    })
}

/// One record of a line orbit: exponent, image line, distance to the
/// limit candidate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRecord {
    pub n: u64,
    pub line: ProjLine,
    pub distance_to_limit: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
    pub limit: Option<ProjLine>,
}

/// Apply `g^{n(k)}` to `L` along the schedule and run limit detection on
/// the image sequence. Distances are against the detected limit, or the
/// final image when no limit is detected.
pub fn line_orbit_trace(
    g: &Collineation,
    line: &ProjLine,
    schedule: &RecurrenceSchedule,
    window: usize,
    tol: f64,
) -> ConvergenceTrace {
    let images: Vec<(u64, ProjLine)> = schedule
        .indices
        .iter()
        .map(|&n| (n, apply_power_to_line(g, n as i64, line)))
        .collect();
    let lines: Vec<ProjLine> = images.iter().map(|(_, l)| *l).collect();
    let limit = limit_detect(&lines, window.min(lines.len().max(1)), tol).unwrap_or(None);
    let reference = limit.or_else(|| lines.last().copied());
    let records = images
        .into_iter()
        .map(|(n, line)| TraceRecord {
            n,
            distance_to_limit: reference.map_or(f64::NAN, |r| line_distance(&line, &r)),
            line,
        })
        .collect();
    ConvergenceTrace { records, limit }
}

/// Quantitative invariance test: the largest class-invariant mismatch of
/// `g`-images over random Clifford-parallel pairs. Vanishes exactly when
/// `g` preserves the parallelism of the given chirality.
pub fn invariance_defect(g: &Collineation, side: Chirality, samples: usize, seed: u64) -> f64 {
    assert!(samples >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut defect = 0.0f64;
    for _ in 0..samples {
        let l = random_line(&mut rng);
        let p = random_point(&mut rng);
        let m = clifford_parallel(&p, &l, side);
        let gl = apply_line(g, &l);
        let gm = apply_line(g, &m);
        let d = class_invariant(&gl, side).distance(&class_invariant(&gm, side));
        defect = defect.max(d);
    }
    defect
}
