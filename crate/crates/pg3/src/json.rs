//! External JSON encodings: points as 4-arrays, lines as any of
//! `{"basis": 4x2}`, `{"span_points": [p, q]}` or `{"plucker": [6]}`,
//! matrices as row-major 4x4 nested arrays, quaternions as `[w, x, y, z]`.
//! Everything is canonicalized on ingest.

use serde::{Deserialize, Serialize};

use crate::collineation::{Collineation, JordanCaseData, Verdicts};
use crate::error::{CollineationError, GeometryError};
use crate::geometry::{Basis42, Mat4, ProjLine, ProjPoint, Vec4, Vec6};

/// Row-major nested-array encoding for 4x4 matrix fields, for use with
/// `#[serde(with = "pg3::json::mat4_rows")]`.
pub mod mat4_rows {
    use super::Mat4;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Mat4, s: S) -> Result<S::Ok, S::Error> {
        let rows: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat4, D::Error> {
        let rows = <[[f64; 4]; 4]>::deserialize(d)?;
        Ok(Mat4::from_fn(|i, j| rows[i][j]))
    }
}

pub fn point_to_json(p: &ProjPoint) -> serde_json::Value {
    serde_json::json!([p.coords()[0], p.coords()[1], p.coords()[2], p.coords()[3]])
}

pub fn point_from_json(v: &serde_json::Value) -> Result<ProjPoint, GeometryError> {
    let arr: [f64; 4] = serde_json::from_value(v.clone()).map_err(|_| GeometryError::ZeroVector)?;
    ProjPoint::from_array(arr)
}

/// Accepted line encodings.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LineSpec {
    Basis { basis: [[f64; 2]; 4] },
    SpanPoints { span_points: [[f64; 4]; 2] },
    Plucker { plucker: [f64; 6] },
}

impl LineSpec {
    pub fn into_line(self) -> Result<ProjLine, GeometryError> {
        match self {
            LineSpec::Basis { basis } => {
                let m = Basis42::from_fn(|i, j| basis[i][j]);
                ProjLine::from_basis(m)
            }
            LineSpec::SpanPoints { span_points } => ProjLine::from_span(
                Vec4::from_column_slice(&span_points[0]),
                Vec4::from_column_slice(&span_points[1]),
            ),
            LineSpec::Plucker { plucker } => {
                ProjLine::from_plucker(Vec6::from_column_slice(&plucker))
            }
        }
    }
}

pub fn line_from_json(v: &serde_json::Value) -> Result<ProjLine, GeometryError> {
    let spec: LineSpec =
        serde_json::from_value(v.clone()).map_err(|_| GeometryError::InvalidPlucker)?;
    spec.into_line()
}

/// Canonical line output carries both the orthonormal basis and the
/// Pluecker vector.
pub fn line_to_json(l: &ProjLine) -> serde_json::Value {
    let b = l.basis();
    let p = l.plucker();
    serde_json::json!({
        "basis": [
            [b[(0, 0)], b[(0, 1)]],
            [b[(1, 0)], b[(1, 1)]],
            [b[(2, 0)], b[(2, 1)]],
            [b[(3, 0)], b[(3, 1)]],
        ],
        "plucker": [p[0], p[1], p[2], p[3], p[4], p[5]],
    })
}

pub fn matrix_to_json(m: &Mat4) -> serde_json::Value {
    let rows: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| m[(i, j)]).collect())
        .collect();
    serde_json::json!(rows)
}

pub fn matrix_from_json(v: &serde_json::Value) -> Result<Mat4, serde_json::Error> {
    let rows: [[f64; 4]; 4] = serde_json::from_value(v.clone())?;
    Ok(Mat4::from_fn(|i, j| rows[i][j]))
}

pub fn collineation_from_json(v: &serde_json::Value) -> Result<Collineation, String> {
    let m = matrix_from_json(v).map_err(|e| format!("matrix parse error: {e}"))?;
    Collineation::new(m).map_err(|e| match e {
        CollineationError::Singular(d) => format!("singular matrix (|det| = {d:.3e})"),
        other => other.to_string(),
    })
}

/// The report printed by the classify command.
#[derive(Debug, Serialize, Deserialize)]
pub struct VerdictReport {
    pub label: String,
    pub params: serde_json::Value,
    pub compactness: String,
    pub automorphism: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proposition: Option<String>,
}

pub fn verdict_report(case: &JordanCaseData, verdicts: &Verdicts) -> VerdictReport {
    use crate::collineation::AutomorphismVerdict;
    let (automorphism, proposition) = match verdicts.automorphism {
        AutomorphismVerdict::Possible => ("Possible".to_string(), None),
        AutomorphismVerdict::Excluded { proposition, .. } => {
            ("Excluded".to_string(), Some(proposition.to_string()))
        }
    };
    VerdictReport {
        label: case.label.to_string(),
        params: serde_json::to_value(case.params).expect("params serialize"),
        compactness: format!("{:?}", verdicts.compactness),
        automorphism,
        proposition,
    }
}
