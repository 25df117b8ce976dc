//! Points, lines and hyperplanes of PG(3,R) with canonical numeric
//! representations, incidence operations and the projector (gap) metric on
//! the line Grassmannian.
//!
//! A point is a 1-dimensional, a line a 2-dimensional subspace of R^4.
//! Lines carry an orthonormal basis pair plus a sign-canonical unit Pluecker
//! vector in the coordinate order `(p01, p02, p03, p23, p31, p12)`, which
//! satisfies the Klein quadric relation `p01*p23 + p02*p31 + p03*p12 = 0`.

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

pub type Vec4 = Vector4<f64>;
pub type Mat4 = Matrix4<f64>;
pub type Basis42 = SMatrix<f64, 4, 2>;
pub type Vec6 = SVector<f64, 6>;

/// Tolerance for algebraic identities (canonical forms, Klein residual).
pub const TOL_ALGEBRAIC: f64 = 1e-10;
/// Tolerance for incidence decisions (containment, degeneracy of joins).
pub const TOL_INCIDENCE: f64 = 1e-9;
/// Angular tolerance used by `meet` to detect a 1-dimensional intersection.
pub const TOL_ANGULAR: f64 = 1e-8;

/// Flip the sign of `v` so that its first entry of magnitude above `cutoff`
/// is positive. Idempotent; leaves the zero vector untouched.
fn sign_canonicalize<const N: usize>(v: &mut SVector<f64, N>, cutoff: f64) {
    for i in 0..N {
        if v[i].abs() > cutoff {
            if v[i] < 0.0 {
                *v = -*v;
            }
            return;
        }
    }
}

/// A point of PG(3,R): unit, sign-canonical homogeneous coordinates.
/// Serializes as a bare array of 4 reals.
#[derive(Clone, Copy, Debug)]
pub struct ProjPoint {
    coords: Vec4,
}

impl Serialize for ProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [
            self.coords[0],
            self.coords[1],
            self.coords[2],
            self.coords[3],
        ]
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let a = <[f64; 4]>::deserialize(d)?;
        ProjPoint::from_array(a).map_err(serde::de::Error::custom)
    }
}

impl ProjPoint {
    pub fn new(v: Vec4) -> Result<Self, GeometryError> {
        let n = v.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(GeometryError::ZeroVector);
        }
        // skip the division when already unit, so canonicalization is
        // idempotent at the bit level
        let mut coords = if (n - 1.0).abs() > 1e-15 { v / n } else { v };
        sign_canonicalize(&mut coords, 1e-12);
        Ok(Self { coords })
    }

    pub fn from_array(a: [f64; 4]) -> Result<Self, GeometryError> {
        Self::new(Vec4::from_column_slice(&a))
    }

    /// Standard basis point `<e_i>`.
    pub fn standard(i: usize) -> Self {
        let mut v = Vec4::zeros();
        v[i] = 1.0;
        Self { coords: v }
    }

    pub fn coords(&self) -> &Vec4 {
        &self.coords
    }

    /// Projective distance: Frobenius norm of the projector difference,
    /// `sqrt(2) * sin(angle)`. Computed from the chordal gap so nearly
    /// equal points keep full precision.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        let m = (self.coords - other.coords)
            .norm()
            .min((self.coords + other.coords).norm());
        // m = 2 sin(angle/2), so sin(angle) = m sqrt(1 - m^2/4)
        std::f64::consts::SQRT_2 * m * (1.0 - (m * m / 4.0).min(1.0)).max(0.0).sqrt()
    }
}

/// A line of PG(3,R): orthonormal basis pair plus canonical Pluecker vector.
/// Serializes as `{"basis": [[.,.]; 4 rows], "plucker": [6 reals]}`.
#[derive(Clone, Copy, Debug)]
pub struct ProjLine {
    basis: Basis42,
    plucker: Vec6,
}

impl Serialize for ProjLine {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let b = &self.basis;
        let rows: [[f64; 2]; 4] = std::array::from_fn(|i| [b[(i, 0)], b[(i, 1)]]);
        let p: [f64; 6] = std::array::from_fn(|i| self.plucker[i]);
        let mut st = s.serialize_struct("ProjLine", 2)?;
        st.serialize_field("basis", &rows)?;
        st.serialize_field("plucker", &p)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ProjLine {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            basis: [[f64; 2]; 4],
        }
        let raw = Raw::deserialize(d)?;
        let m = Basis42::from_fn(|i, j| raw.basis[i][j]);
        ProjLine::from_basis(m).map_err(serde::de::Error::custom)
    }
}

impl ProjLine {
    /// Build from two spanning vectors. Fails if they are projectively equal.
    pub fn from_span(x: Vec4, y: Vec4) -> Result<Self, GeometryError> {
        let m = Basis42::from_columns(&[x, y]);
        Self::from_basis(m)
    }

    /// Build from any rank-2 `4x2` matrix; columns are orthonormalized.
    pub fn from_basis(m: Basis42) -> Result<Self, GeometryError> {
        let basis = orthonormalize(&m)?;
        let plucker = plucker_of_basis(&basis);
        Ok(Self { basis, plucker })
    }

    pub fn from_points(p: &ProjPoint, q: &ProjPoint) -> Result<Self, GeometryError> {
        join(p, q)
    }

    /// Reconstruct a line from a Pluecker 6-vector. The vector must satisfy
    /// the Klein quadric relation (relative residual below `1e-6`).
    pub fn from_plucker(p: Vec6) -> Result<Self, GeometryError> {
        let n = p.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(GeometryError::InvalidPlucker);
        }
        let p = p / n;
        if klein_form(&p).abs() > 1e-6 {
            return Err(GeometryError::InvalidPlucker);
        }
        // Antisymmetric matrix A = x y^T - y x^T has column space = span{x,y}.
        let a = Mat4::new(
            0.0, p[0], p[1], p[2], //
            -p[0], 0.0, p[5], -p[4], //
            -p[1], -p[5], 0.0, p[3], //
            -p[2], p[4], -p[3], 0.0,
        );
        let svd = a.svd(true, false);
        let u = svd.u.expect("svd requested u");
        let mut idx: Vec<usize> = (0..4).collect();
        idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let b =
            Basis42::from_columns(&[u.column(idx[0]).into_owned(), u.column(idx[1]).into_owned()]);
        Self::from_basis(b)
    }

    /// Coordinate plane `span(e_i, e_j)`, `i != j`.
    pub fn coordinate(i: usize, j: usize) -> Self {
        let mut m = Basis42::zeros();
        m[(i, 0)] = 1.0;
        m[(j, 1)] = 1.0;
        Self::from_basis(m).expect("coordinate plane is rank 2")
    }

    pub fn basis(&self) -> &Basis42 {
        &self.basis
    }

    pub fn plucker(&self) -> &Vec6 {
        &self.plucker
    }

    /// Orthogonal projector onto the 2-subspace.
    pub fn projector(&self) -> Mat4 {
        self.basis * self.basis.transpose()
    }

    /// A point of the line at circle parameter `theta` in `[0, pi)`:
    /// `cos(theta) x + sin(theta) y` over the orthonormal basis.
    pub fn point_at(&self, theta: f64) -> ProjPoint {
        let v = self.basis.column(0) * theta.cos() + self.basis.column(1) * theta.sin();
        ProjPoint::new(v.into_owned()).expect("unit combination of orthonormal basis")
    }
}

/// Gram-Schmidt with re-orthogonalization; errors when rank < 2.
fn orthonormalize(m: &Basis42) -> Result<Basis42, GeometryError> {
    let x = m.column(0).into_owned();
    let nx = x.norm();
    if !nx.is_finite() || nx < 1e-12 {
        return Err(GeometryError::DegenerateSpan);
    }
    let x = x / nx;
    let mut y = m.column(1).into_owned();
    y -= x * x.dot(&y);
    y -= x * x.dot(&y); // second pass for numerical orthogonality
    let ny = y.norm();
    if !ny.is_finite() || ny < 1e-9 * nx.max(1.0) {
        return Err(GeometryError::DegenerateSpan);
    }
    Ok(Basis42::from_columns(&[x, y / ny]))
}

/// Pluecker coordinates `(p01, p02, p03, p23, p31, p12)` of an orthonormal
/// basis pair, unit norm, sign-canonical.
fn plucker_of_basis(b: &Basis42) -> Vec6 {
    let x = b.column(0);
    let y = b.column(1);
    let pij = |i: usize, j: usize| x[i] * y[j] - x[j] * y[i];
    let mut p = Vec6::from_column_slice(&[
        pij(0, 1),
        pij(0, 2),
        pij(0, 3),
        pij(2, 3),
        pij(3, 1),
        pij(1, 2),
    ]);
    let n = p.norm();
    p /= n;
    sign_canonicalize(&mut p, 1e-12);
    p
}

/// Klein quadric form `p01*p23 + p02*p31 + p03*p12`; zero exactly when the
/// 6-vector is decomposable (comes from an actual line).
pub fn klein_form(p: &Vec6) -> f64 {
    p[0] * p[3] + p[1] * p[4] + p[2] * p[5]
}

/// A hyperplane of PG(3,R), stored by its unit, sign-canonical normal.
/// Serializes as the bare 4-array of the normal.
#[derive(Clone, Copy, Debug)]
pub struct Hyperplane {
    normal: Vec4,
}

impl Serialize for Hyperplane {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [
            self.normal[0],
            self.normal[1],
            self.normal[2],
            self.normal[3],
        ]
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hyperplane {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let a = <[f64; 4]>::deserialize(d)?;
        Hyperplane::new(Vec4::from_column_slice(&a)).map_err(serde::de::Error::custom)
    }
}

impl Hyperplane {
    pub fn new(n: Vec4) -> Result<Self, GeometryError> {
        let nn = n.norm();
        if !nn.is_finite() || nn < 1e-12 {
            return Err(GeometryError::ZeroVector);
        }
        let mut normal = n / nn;
        sign_canonicalize(&mut normal, 1e-12);
        Ok(Self { normal })
    }

    /// `e_i^perp`.
    pub fn coordinate(i: usize) -> Self {
        let mut v = Vec4::zeros();
        v[i] = 1.0;
        Self { normal: v }
    }

    pub fn normal(&self) -> &Vec4 {
        &self.normal
    }

    pub fn contains_point(&self, p: &ProjPoint) -> bool {
        self.normal.dot(p.coords()).abs() < TOL_INCIDENCE
    }

    pub fn contains_line(&self, l: &ProjLine) -> bool {
        let b = l.basis();
        self.normal.dot(&b.column(0).into_owned()).abs() < TOL_INCIDENCE
            && self.normal.dot(&b.column(1).into_owned()).abs() < TOL_INCIDENCE
    }

    /// Residual of line containment: norm of the normal component of the basis.
    pub fn line_residual(&self, l: &ProjLine) -> f64 {
        let b = l.basis();
        self.normal
            .dot(&b.column(0).into_owned())
            .hypot(self.normal.dot(&b.column(1).into_owned()))
    }
}

/// The line joining two distinct points.
pub fn join(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine, GeometryError> {
    if p.distance(q) <= TOL_INCIDENCE {
        return Err(GeometryError::DegenerateJoin);
    }
    ProjLine::from_span(*p.coords(), *q.coords())
}

/// Frobenius norm of the projector difference; ranges over `[0, 2]`.
pub fn line_distance(l: &ProjLine, m: &ProjLine) -> f64 {
    (l.projector() - m.projector()).norm()
}

/// The common point of two distinct lines, if their subspaces intersect in
/// dimension 1. Detection is via the smallest singular value of the stacked
/// basis `[B_L | B_M]`, which equals `sqrt(1 - cos(theta_min))` and so scales
/// linearly with the smallest principal angle.
pub fn meet(l: &ProjLine, m: &ProjLine) -> Result<Option<ProjPoint>, GeometryError> {
    meet_with_tol(l, m, TOL_ANGULAR)
}

pub fn meet_with_tol(
    l: &ProjLine,
    m: &ProjLine,
    angular_tol: f64,
) -> Result<Option<ProjPoint>, GeometryError> {
    if line_distance(l, m) < TOL_INCIDENCE {
        return Err(GeometryError::IdenticalLines);
    }
    let mut stacked = Mat4::zeros();
    stacked.view_mut((0, 0), (4, 2)).copy_from(l.basis());
    stacked.view_mut((0, 2), (4, 2)).copy_from(m.basis());
    let svd = stacked.svd(false, true);
    let vt = svd.v_t.expect("svd requested v_t");
    let mut idx: Vec<usize> = (0..4).collect();
    idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let smallest = idx[0];
    if svd.singular_values[smallest] >= angular_tol {
        return Ok(None);
    }
    // Null vector (xi, eta): B_L xi = -B_M eta is the common direction.
    let null = vt.row(smallest).transpose();
    let xi = nalgebra::Vector2::new(null[0], null[1]);
    let dir = l.basis() * xi;
    if dir.norm() < 0.5 {
        // xi nearly zero: take the other half.
        let eta = nalgebra::Vector2::new(null[2], null[3]);
        let dir = m.basis() * eta;
        return Ok(Some(ProjPoint::new(dir)?));
    }
    Ok(Some(ProjPoint::new(dir)?))
}

/// Incidence test: `p` lies on `l` when the residual of the complementary
/// projector is below the incidence tolerance.
pub fn contains(l: &ProjLine, p: &ProjPoint) -> bool {
    containment_residual(l, p) < TOL_INCIDENCE
}

/// `|| (I - P_L) p ||` for unit `p`.
pub fn containment_residual(l: &ProjLine, p: &ProjPoint) -> f64 {
    let v = p.coords();
    (v - l.projector() * v).norm()
}

/// The point where `l` pierces hyperplane `h`, unless `l` lies inside `h`.
pub fn meet_hyperplane(l: &ProjLine, h: &Hyperplane) -> Result<ProjPoint, GeometryError> {
    let b = l.basis();
    let c0 = h.normal().dot(&b.column(0).into_owned());
    let c1 = h.normal().dot(&b.column(1).into_owned());
    let n = c0.hypot(c1);
    if n < TOL_INCIDENCE {
        return Err(GeometryError::LineInHyperplane);
    }
    // Direction in the line with zero normal component.
    let dir = b.column(0) * (-c1 / n) + b.column(1) * (c0 / n);
    ProjPoint::new(dir.into_owned())
}

/// Two-sided Hausdorff distance between finite line sets under `line_distance`.
pub fn hausdorff_distance(a: &[ProjLine], b: &[ProjLine]) -> Result<f64, GeometryError> {
    if a.is_empty() || b.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let one_sided = |xs: &[ProjLine], ys: &[ProjLine]| {
        xs.iter()
            .map(|x| {
                ys.iter()
                    .map(|y| line_distance(x, y))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)))
}

/// Detects a settled tail: returns the final element when all pairwise
/// distances within the last `window` elements are below `tol`.
pub fn limit_detect(
    trace: &[ProjLine],
    window: usize,
    tol: f64,
) -> Result<Option<ProjLine>, GeometryError> {
    if window == 0 || trace.len() < window {
        return Err(GeometryError::InsufficientData);
    }
    let tail = &trace[trace.len() - window..];
    for i in 0..tail.len() {
        for j in (i + 1)..tail.len() {
            if line_distance(&tail[i], &tail[j]) >= tol {
                return Ok(None);
            }
        }
    }
    Ok(Some(*trace.last().expect("nonempty trace")))
}

/// Principal angles `(theta_1, theta_2)` between two lines, ascending.
/// Cosines from the SVD of `B_L^T B_M`, sines from the complementary
/// projector, combined with atan2 for uniform accuracy.
pub fn principal_angles(l: &ProjLine, m: &ProjLine) -> (f64, f64) {
    let prod: Matrix2<f64> = l.basis().transpose() * m.basis();
    let mut cos: Vec<f64> = prod
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    cos.sort_by(|a, b| b.total_cmp(a));
    let comp = (Mat4::identity() - l.projector()) * m.basis();
    let mut sin: Vec<f64> = comp
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sin.sort_by(|a, b| a.total_cmp(b));
    let angle = |c: f64, s: f64| s.clamp(0.0, 1.0).atan2(c.clamp(0.0, 1.0));
    (angle(cos[0], sin[0]), angle(cos[1], sin[1]))
}
