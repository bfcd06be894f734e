//! JSON forms of matrices, subspaces, GK profiles and Schur forms.
//!
//! A matrix is `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major
//! order; non-finite entries are rejected.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::gaps::Subspace;
use crate::hessenberg::HessenbergChain;
use crate::jordan::GkProfile;
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;
use crate::schur::SchurForm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl<T: Real> From<&ComplexMatrix<T>> for MatrixJson {
    fn from(m: &ComplexMatrix<T>) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
        }
    }
}

impl<T: Real> TryFrom<MatrixJson> for ComplexMatrix<T> {
    type Error = LabError;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.data.len() != j.rows * j.cols {
            return Err(LabError::dims(
                format!("{} entries for {}x{}", j.rows * j.cols, j.rows, j.cols),
                format!("{} entries", j.data.len()),
            ));
        }
        if let Some(i) = j.data.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(LabError::invalid(format!("entry {i} is not finite")));
        }
        let data = j.data.iter().map(|[re, im]| Complex::new(T::lit(*re), T::lit(*im))).collect();
        ComplexMatrix::from_vec(j.rows, j.cols, data)
    }
}

impl<T: Real> Serialize for ComplexMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for ComplexMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ComplexMatrix::try_from(MatrixJson::deserialize(d)?).map_err(D::Error::custom)
    }
}

fn parse_error(e: serde_json::Error) -> LabError {
    LabError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses matrix JSON; syntax, shape and finiteness problems become
/// [`LabError::Parse`] with the position where reading stopped.
pub fn matrix_from_json<T: Real>(text: &str) -> Result<ComplexMatrix<T>> {
    let j: MatrixJson = serde_json::from_str(text).map_err(parse_error)?;
    ComplexMatrix::try_from(j).map_err(|e| {
        let (line, column) = end_position(text);
        LabError::Parse { line, column, message: e.to_string() }
    })
}

fn end_position(text: &str) -> (usize, usize) {
    let trimmed = text.trim_end();
    let line = trimmed.lines().count().max(1);
    let column = trimmed.lines().last().map_or(0, |l| l.chars().count());
    (line, column)
}

pub fn matrix_to_json<T: Real>(m: &ComplexMatrix<T>) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("matrix serialises")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceJson {
    ambient: usize,
    basis: MatrixJson,
}

impl<T: Real> Serialize for Subspace<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceJson { ambient: self.ambient(), basis: MatrixJson::from(self.basis()) }.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Subspace<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SubspaceJson::deserialize(d)?;
        let basis = ComplexMatrix::try_from(j.basis).map_err(D::Error::custom)?;
        Subspace::new(j.ambient, basis).map_err(D::Error::custom)
    }
}

#[derive(Serialize)]
struct GkJson<'a> {
    eigenvalues: Vec<[f64; 2]>,
    blocks: &'a [Vec<usize>],
    m: &'a [usize],
    k: &'a [usize],
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    uncertain: bool,
}

impl<T: Real> Serialize for GkProfile<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GkJson {
            eigenvalues: self.eigenvalues.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
            blocks: &self.blocks,
            m: &self.aggregate_m,
            k: &self.dual_k,
            uncertain: self.uncertain,
        }
        .serialize(s)
    }
}

impl<T: Real> Serialize for HessenbergChain<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.factors().iter().map(MatrixJson::from))
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
struct SchurJson<'a, T: Real> {
    u: &'a ComplexMatrix<T>,
    t: &'a ComplexMatrix<T>,
    chain: &'a HessenbergChain<T>,
    residual: f64,
}

impl<T: Real> Serialize for SchurForm<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SchurJson { u: &self.u, t: &self.t, chain: &self.chain, residual: self.residual.as_f64() }.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = ComplexMatrix<f64>;

    #[test]
    fn parses_examples() {
        let m: M = matrix_from_json(r#"{"rows":2,"cols":2,"data":[[0,0],[1,0],[0,0],[0,0]]}"#).unwrap();
        assert_eq!(m, M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]));
        let m: M = matrix_from_json(r#"{"rows":1,"cols":1,"data":[[5,0]]}"#).unwrap();
        assert_eq!(m[(0, 0)], cplx(5.0, 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        let short = matrix_from_json::<f64>(r#"{"rows":2,"cols":2,"data":[[0,0]]}"#);
        assert!(matches!(short, Err(LabError::Parse { .. })));
        let broken = matrix_from_json::<f64>("{\"rows\":1,\n\"cols\":1,\n\"data\":[[1,]]}");
        match broken {
            Err(LabError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matrix_from_json::<f64>(r#"{"rows":1,"cols":1,"data":[["NaN",0]]}"#).is_err());
        assert!(ComplexMatrix::<f64>::try_from(MatrixJson { rows: 1, cols: 1, data: vec![[f64::NAN, 0.0]] }).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let m = M::from_fn(2, 3, |i, j| cplx(i as f64 + 0.1, j as f64 / 3.0));
        let back: M = matrix_from_json(&matrix_to_json(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn subspace_round_trip() {
        let s = Subspace::<f64>::span(3, &[vec![cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(0.0, 0.0)]]).unwrap();
        let txt = serde_json::to_string(&s).unwrap();
        assert!(txt.starts_with(r#"{"ambient":3,"basis":{"rows":3"#));
        let back: Subspace<f64> = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn gk_json_keys() {
        let g = GkProfile::<f64> {
            eigenvalues: vec![cplx(2.0, 0.0)],
            blocks: vec![vec![2, 1]],
            aggregate_m: vec![2, 1, 0],
            dual_k: vec![2, 1, 0],
            uncertain: false,
        };
        let v: serde_json::Value = serde_json::to_value(&g).unwrap();
        assert_eq!(v["m"], serde_json::json!([2, 1, 0]));
        assert!(v.get("uncertain").is_none());
    }
}
