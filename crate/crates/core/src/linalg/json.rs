//! Wire format used by the whole repository:
//! `{"rows": n, "cols": m, "data": [[re, im], ...]}` with row-major data.
//! Readers reject NaN and infinities.

use serde::{Deserialize, Serialize};

use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

pub fn c64_to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn pair_to_c64(p: [f64; 2]) -> Result<C64> {
    if !p[0].is_finite() || !p[1].is_finite() {
        return Err(Error::Json(format!("non-finite entry [{}, {}]", p[0], p[1])));
    }
    Ok(C64::new(p[0], p[1]))
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(c64_to_pair(m[(i, j)]));
            }
        }
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn from_vector(v: &CVector) -> Self {
        MatrixJson {
            rows: v.len(),
            cols: 1,
            data: v.iter().map(|&z| c64_to_pair(z)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Json("rows and cols must be positive".into()));
        }
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Json(format!(
                "data length {} does not match rows*cols = {}",
                self.data.len(),
                self.rows * self.cols
            )));
        }
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = pair_to_c64(self.data[i * self.cols + j])?;
            }
        }
        Ok(m)
    }

    pub fn to_vector(&self) -> Result<CVector> {
        if self.cols != 1 {
            return Err(Error::Json(format!(
                "expected a column vector (cols = 1), got cols = {}",
                self.cols
            )));
        }
        let m = self.to_matrix()?;
        Ok(CVector::from_column_slice(m.as_slice()))
    }
}

pub fn parse_matrix(s: &str) -> Result<CMatrix> {
    let mj: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    mj.to_matrix()
}

pub fn parse_vector(s: &str) -> Result<CVector> {
    let mj: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    mj.to_vector()
}

pub fn matrix_to_string(m: &CMatrix) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(m)).expect("matrix serialization is infallible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample;

    #[test]
    fn round_trip_preserves_entries() {
        let m = sample::dense(3, 5);
        let s = matrix_to_string(&m);
        let back = parse_matrix(&s).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn rejects_nan_and_bad_lengths() {
        let bad = r#"{"rows": 1, "cols": 1, "data": [[NaN, 0.0]]}"#;
        assert!(parse_matrix(bad).is_err());
        let mismatch = r#"{"rows": 2, "cols": 2, "data": [[1.0, 0.0]]}"#;
        assert!(matches!(parse_matrix(mismatch), Err(Error::Json(_))));
        let inf = r#"{"rows": 1, "cols": 1, "data": [[1e999, 0.0]]}"#;
        assert!(parse_matrix(inf).is_err());
    }

    #[test]
    fn row_major_layout() {
        // [[1, 2], [3, 4]] row-major
        let mj = MatrixJson {
            rows: 2,
            cols: 2,
            data: vec![[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [4.0, 0.0]],
        };
        let m = mj.to_matrix().unwrap();
        assert_eq!(m[(0, 1)], C64::new(2.0, 0.0));
        assert_eq!(m[(1, 0)], C64::new(3.0, 0.0));
    }
}
