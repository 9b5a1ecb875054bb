//! JSON interchange for cones, direction sets, problems and certificates.
//!
//! Unknown fields are rejected everywhere. Floats are written in the shortest
//! form that parses back to the same `f64`.

use serde::{Deserialize, Serialize};

use crate::cone::{DirectionSet, PolyhedralCone};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::evp::{Metric, VectorProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordsFile {
    pub coords: Vec<Vec<f64>>,
    pub metric: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistFile {
    Matrix(Vec<Vec<f64>>),
    Coords(CoordsFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub points: Vec<String>,
    pub dist: DistFile,
    pub f: Vec<Vec<f64>>,
    pub cone: ConeFile,
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    pub gamma: f64,
    pub epsilon: f64,
    pub x0: usize,
}

/// Input of the `scalarize` command: exactly one of `H` or `k0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarizeFile {
    pub cone: ConeFile,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<Vec<f64>>,
    pub y: Vec<f64>,
}

impl ConeFile {
    pub fn to_cone(&self, tol_feas: f64) -> Result<PolyhedralCone> {
        PolyhedralCone::with_tolerance(self.a.clone(), tol_feas)
    }

    pub fn from_cone(cone: &PolyhedralCone) -> Self {
        ConeFile {
            a: cone.rows().to_vec(),
        }
    }
}

impl ProblemFile {
    pub fn to_problem(&self, tol_feas: f64) -> Result<VectorProblem> {
        let metric = match &self.dist {
            DistFile::Matrix(m) => Metric::Matrix(m.clone()),
            DistFile::Coords(c) => match c.metric.as_str() {
                "euclidean" => Metric::Euclidean(c.coords.clone()),
                other => {
                    return Err(Error::InvalidProblem(format!("unknown metric \"{other}\"")))
                }
            },
        };
        VectorProblem::new(
            self.points.clone(),
            metric,
            self.f.clone(),
            self.cone.to_cone(tol_feas)?,
            DirectionSet::new(self.h.clone())?,
            self.gamma,
            self.epsilon,
            self.x0,
        )
    }

    pub fn from_problem(p: &VectorProblem) -> Self {
        let dist = match &p.metric {
            Metric::Matrix(m) => DistFile::Matrix(m.clone()),
            Metric::Euclidean(c) => DistFile::Coords(CoordsFile {
                coords: c.clone(),
                metric: "euclidean".into(),
            }),
        };
        ProblemFile {
            points: p.labels.clone(),
            dist,
            f: p.fvals.clone(),
            cone: ConeFile::from_cone(&p.cone),
            h: p.directions.vertices().to_vec(),
            gamma: p.gamma,
            epsilon: p.epsilon,
            x0: p.x0,
        }
    }
}

/// Debug input for `solve --poset`: an explicit relation matrix
/// (`relation[i][j]` means `i ⪯ j`) and a monotone functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetFile {
    pub relation: Vec<Vec<bool>>,
    pub eta: Vec<ExtReal>,
    pub x0: usize,
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidProblem(format!("JSON: {e}")))
}

pub fn parse_problem(text: &str, tol_feas: f64) -> Result<VectorProblem> {
    parse_json::<ProblemFile>(text)?.to_problem(tol_feas)
}

pub fn emit_problem(p: &VectorProblem) -> String {
    to_json(&ProblemFile::from_problem(p))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::DEFAULT_TOL_FEAS;

    const TWO_POINT: &str = r#"{
        "points": ["x0", "x1"],
        "dist": [[0, 1], [1, 0]],
        "f": [[1, 1], [0, 0]],
        "cone": {"A": [[1, 0], [0, 1]]},
        "H": [[1, 1]],
        "gamma": 1,
        "epsilon": 2,
        "x0": 0
    }"#;

    #[test]
    fn parses_matrix_form() {
        let p = parse_problem(TWO_POINT, DEFAULT_TOL_FEAS).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.distance(0, 1), 1.0);
    }

    #[test]
    fn parses_coordinate_form() {
        let text = TWO_POINT.replace(
            r#""dist": [[0, 1], [1, 0]]"#,
            r#""dist": {"coords": [[0.0], [1.0]], "metric": "euclidean"}"#,
        );
        let p = parse_problem(&text, DEFAULT_TOL_FEAS).unwrap();
        assert_eq!(p.distance(0, 1), 1.0);
        let bad = text.replace("euclidean", "manhattan");
        assert!(parse_problem(&bad, DEFAULT_TOL_FEAS).is_err());
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = TWO_POINT.replace(r#""x0": 0"#, r#""x0": 0, "gama": 3"#);
        assert!(matches!(
            parse_problem(&text, DEFAULT_TOL_FEAS),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn round_trip() {
        let p = parse_problem(TWO_POINT, DEFAULT_TOL_FEAS).unwrap();
        let back = parse_problem(&emit_problem(&p), DEFAULT_TOL_FEAS).unwrap();
        assert_eq!(p, back);
    }
}
