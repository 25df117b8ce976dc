//! Deterministic sampling: a low-discrepancy grid on the unit 3-sphere and
//! seeded random generators for points, lines and matrices.

use nalgebra::Matrix4;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{Basis42, Mat4, ProjLine, ProjPoint, Vec4};
use crate::quaternion::Quaternion;

/// Radical-inverse (van der Corput) sequence in the given base.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 0.0;
    let mut denom = 1.0;
    while i > 0 {
        denom *= base as f64;
        inv += (i % base) as f64 / denom;
        i /= base;
    }
    inv
}

/// Quasi-uniform grid on S^3 via Halton points mapped through Hopf-style
/// torus coordinates: `(sqrt(1-u) e^{i a}, sqrt(u) e^{i b})` is uniform on
/// the sphere when `(u, a, b)` is uniform on `[0,1) x [0,2pi)^2`.
pub fn s3_grid(n: usize, seed: u64) -> impl Iterator<Item = Quaternion> {
    let offset = seed % 1_000_003 + 1;
    (0..n as u64).map(move |k| {
        let i = k + offset;
        let u = radical_inverse(i, 2);
        let a = std::f64::consts::TAU * radical_inverse(i, 3);
        let b = std::f64::consts::TAU * radical_inverse(i, 5);
        let r1 = (1.0 - u).sqrt();
        let r2 = u.sqrt();
        Quaternion::new(r1 * a.cos(), r1 * a.sin(), r2 * b.cos(), r2 * b.sin())
    })
}

pub fn gaussian_vec4(rng: &mut ChaCha8Rng) -> Vec4 {
    Vec4::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

pub fn random_point(rng: &mut ChaCha8Rng) -> ProjPoint {
    loop {
        let v = gaussian_vec4(rng);
        if let Ok(p) = ProjPoint::new(v) {
            return p;
        }
    }
}

pub fn random_unit_quaternion(rng: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let v = gaussian_vec4(rng);
        if v.norm() > 1e-3 {
            return Quaternion::from_vec4(&v).normalized();
        }
    }
}

/// Random line with a well-separated spanning pair.
pub fn random_line(rng: &mut ChaCha8Rng) -> ProjLine {
    loop {
        let x = gaussian_vec4(rng);
        let y = gaussian_vec4(rng);
        if let Ok(l) = ProjLine::from_basis(Basis42::from_columns(&[x, y])) {
            return l;
        }
    }
}

pub fn random_gaussian_matrix(rng: &mut ChaCha8Rng) -> Mat4 {
    Mat4::from_fn(|_, _| rng.sample(StandardNormal))
}

/// Random orthogonal matrix via QR of a Gaussian matrix, with the diagonal
/// of R made positive so the distribution is Haar.
pub fn random_orthogonal(rng: &mut ChaCha8Rng) -> Mat4 {
    let qr = random_gaussian_matrix(rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..4 {
        if r[(i, i)] < 0.0 {
            let col = -q.column(i).into_owned();
            q.set_column(i, &col);
        }
    }
    q
}

/// Random invertible matrix with singular values log-uniform in
/// `[1/spread, spread]`, hence condition number at most `spread^2`.
pub fn random_conjugator(rng: &mut ChaCha8Rng, spread: f64) -> Mat4 {
    let q1 = random_orthogonal(rng);
    let q2 = random_orthogonal(rng);
    let mut d = Matrix4::zeros();
    for i in 0..4 {
        let t: f64 = rng.random();
        d[(i, i)] = spread.powf(2.0 * t - 1.0);
    }
    q1 * d * q2
}
