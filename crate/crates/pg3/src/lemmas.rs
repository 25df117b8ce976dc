//! Constructive realizations of three facts about topological parallelisms:
//! a parallel avoiding finitely many obstacle lines exists (rejection
//! sampling over the class sphere), two disjoint lines admit two distinct
//! parallel common transversals (torus grid search with local refinement),
//! and a parallelism-preserving collineation with two fixed points induces
//! equivalent pencil actions (a quantitative defect otherwise).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{class_invariant, clifford_parallel, is_parallel, Chirality, ClassInvariant};
use crate::collineation::{apply_line, apply_point, Collineation};
use crate::error::LemmaError;
use crate::geometry::{join, line_distance, meet, ProjLine, ProjPoint};
use crate::sampling::random_point;

/// Two distinct parallel lines both meeting the disjoint pair `(K, L)`,
/// with the anchor points on `K` and `L` that produced them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransversalPair {
    pub m: ProjLine,
    pub n: ProjLine,
    /// `(p, q)` on `(K, L)` with `m = p v q`.
    pub anchors_m: (ProjPoint, ProjPoint),
    /// `(p', q')` on `(K, L)` with `n = p' v q'`.
    pub anchors_n: (ProjPoint, ProjPoint),
    /// Class-invariant distance between `m` and `n`.
    pub invariant_defect: f64,
}

/// A line parallel to `m` that meets none of the obstacles.
///
/// Each obstacle not parallel to `m` excludes only a circle on the class
/// sphere, so rejection sampling of the point `p` with `N = parallel(p, m)`
/// succeeds almost surely per draw; obstacles parallel to `m` merely require
/// a distinct class member, which is disjoint by the spread property.
pub fn avoiding_parallel(
    m: &ProjLine,
    obstacles: &[ProjLine],
    side: Chirality,
    seed: u64,
    max_tries: usize,
) -> Result<ProjLine, LemmaError> {
    assert!(obstacles.len() <= 16, "obstacle list capped at 16");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        let p = random_point(&mut rng);
        let candidate = clifford_parallel(&p, m, side);
        let admissible = obstacles.iter().all(|obstacle| {
            if is_parallel(obstacle, m, side) {
                line_distance(&candidate, obstacle) > 1e-6
            } else {
                matches!(meet(&candidate, obstacle), Ok(None))
            }
        });
        if admissible {
            return Ok(candidate);
        }
    }
    Err(LemmaError::SearchExhausted(max_tries))
}

/// Invariant of the joining line over the parameter torus of `[K] x [L]`.
fn torus_invariant(
    k: &ProjLine,
    l: &ProjLine,
    side: Chirality,
    theta: f64,
    phi: f64,
) -> Option<(ClassInvariant, ProjPoint, ProjPoint)> {
    let p = k.point_at(theta);
    let q = l.point_at(phi);
    let joined = join(&p, &q).ok()?;
    Some((class_invariant(&joined, side), p, q))
}

/// Two distinct parallel transversals of the disjoint pair `(K, L)`:
/// evaluate the class invariant of `p v q` over a `grid x grid` torus, find
/// the closest collision between well-separated cells, and refine by local
/// descent until the invariant distance drops below `1e-6`.
pub fn common_transversal_parallels(
    k: &ProjLine,
    l: &ProjLine,
    side: Chirality,
    grid: usize,
    parallel_eval: bool,
) -> Result<TransversalPair, LemmaError> {
    match meet(k, l) {
        Ok(None) => {}
        Ok(Some(_)) | Err(_) => return Err(LemmaError::NotDisjoint),
    }
    let step = std::f64::consts::PI / grid as f64;
    let eval_cell = |idx: usize| {
        let (i, j) = (idx / grid, idx % grid);
        let (theta, phi) = (i as f64 * step, j as f64 * step);
        torus_invariant(k, l, side, theta, phi).map(|(inv, ..)| (i, j, inv))
    };
    let cells: Vec<(usize, usize, ClassInvariant)> = if parallel_eval {
        (0..grid * grid)
            .into_par_iter()
            .filter_map(eval_cell)
            .collect()
    } else {
        (0..grid * grid).filter_map(eval_cell).collect()
    };

    // nearest collision between torus-separated cells, via invariant buckets
    let bucket_size = 0.15f64;
    let mut buckets: std::collections::HashMap<(i32, i32, i32), Vec<usize>> = Default::default();
    let key_of = |inv: &ClassInvariant, dx: f64, dy: f64, dz: f64| {
        let a = inv.axis();
        (
            ((a[0] + dx) / bucket_size).floor() as i32,
            ((a[1] + dy) / bucket_size).floor() as i32,
            ((a[2] + dz) / bucket_size).floor() as i32,
        )
    };
    for (idx, cell) in cells.iter().enumerate() {
        buckets
            .entry(key_of(&cell.2, 0.0, 0.0, 0.0))
            .or_default()
            .push(idx);
    }
    let torus_gap = |a: usize, b: usize| {
        let d = (a as isize - b as isize).unsigned_abs();
        d.min(grid - d)
    };
    let min_gap = (grid / 16).max(2);
    let mut best: Option<(usize, usize, f64)> = None;
    for (idx, cell) in cells.iter().enumerate() {
        for dx in [-0.5 * bucket_size, 0.5 * bucket_size] {
            for dy in [-0.5 * bucket_size, 0.5 * bucket_size] {
                for dz in [-0.5 * bucket_size, 0.5 * bucket_size] {
                    let Some(others) = buckets.get(&key_of(&cell.2, dx, dy, dz)) else {
                        continue;
                    };
                    for &j in others {
                        if j <= idx {
                            continue;
                        }
                        let other = &cells[j];
                        if torus_gap(cell.0, other.0) < min_gap
                            && torus_gap(cell.1, other.1) < min_gap
                        {
                            continue;
                        }
                        let d = cell.2.distance(&other.2);
                        if best.is_none_or(|(.., bd)| d < bd) {
                            best = Some((idx, j, d));
                        }
                    }
                }
            }
        }
    }
    let Some((ci, cj, coarse)) = best else {
        return Err(LemmaError::CollisionNotFound {
            grid,
            best: f64::INFINITY,
        });
    };

    // local refinement: coordinate descent on (theta1, phi1, theta2, phi2)
    let mut params = [
        cells[ci].0 as f64 * step,
        cells[ci].1 as f64 * step,
        cells[cj].0 as f64 * step,
        cells[cj].1 as f64 * step,
    ];
    let objective = |p: &[f64; 4]| -> f64 {
        match (
            torus_invariant(k, l, side, p[0], p[1]),
            torus_invariant(k, l, side, p[2], p[3]),
        ) {
            (Some((a, ..)), Some((b, ..))) => a.distance(&b),
            _ => f64::INFINITY,
        }
    };
    let mut value = objective(&params);
    let mut h = step;
    while value >= 1e-7 && h > 1e-14 {
        let mut improved = false;
        for dim in 0..4 {
            for dir in [-1.0, 1.0] {
                let mut trial = params;
                trial[dim] += dir * h;
                let v = objective(&trial);
                if v < value {
                    value = v;
                    params = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    if value >= 1e-6 {
        return Err(LemmaError::CollisionNotFound {
            grid,
            best: value.min(coarse),
        });
    }

    let (inv_m, p, q) = torus_invariant(k, l, side, params[0], params[1])
        .ok_or(LemmaError::CollisionNotFound { grid, best: value })?;
    let (inv_n, p2, q2) = torus_invariant(k, l, side, params[2], params[3])
        .ok_or(LemmaError::CollisionNotFound { grid, best: value })?;
    let m = join(&p, &q)?;
    let n = join(&p2, &q2)?;
    if line_distance(&m, &n) < 1e-6 {
        return Err(LemmaError::CollisionNotFound { grid, best: value });
    }
    Ok(TransversalPair {
        m,
        n,
        anchors_m: (p, q),
        anchors_n: (p2, q2),
        invariant_defect: inv_m.distance(&inv_n),
    })
}

/// Defect of the pencil equivariance at two fixed points of `g`:
/// `max over lines L through p of d(parallel(q, L)^g, parallel(q, L^g))`.
/// Zero when `g` preserves the parallelism; a positive value certifies the
/// fixed-point obstruction.
pub fn pencil_equivariance_check(
    g: &Collineation,
    p: &ProjPoint,
    q: &ProjPoint,
    side: Chirality,
    samples: usize,
    seed: u64,
) -> Result<f64, LemmaError> {
    for fixed in [p, q] {
        let moved = apply_point(g, fixed).distance(fixed);
        if moved > 1e-9 {
            return Err(LemmaError::NotFixed(moved));
        }
    }
    if p.distance(q) < 1e-9 {
        return Err(LemmaError::NotFixed(0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut defect = 0.0f64;
    let mut done = 0usize;
    while done < samples {
        let x = random_point(&mut rng);
        let Ok(line_through_p) = join(p, &x) else {
            continue;
        };
        done += 1;
        let parallel_at_q = clifford_parallel(q, &line_through_p, side);
        let pushed = apply_line(g, &parallel_at_q);
        let of_image = clifford_parallel(q, &apply_line(g, &line_through_p), side);
        defect = defect.max(line_distance(&pushed, &of_image));
    }
    Ok(defect)
}
