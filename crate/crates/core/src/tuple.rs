//! d-tuples of square matrices: points at which NC functions are evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    pub d: usize,
    pub n: usize,
    pub x: Vec<CMat>,
}

impl MatrixTuple {
    pub fn new(x: Vec<CMat>) -> Result<Self> {
        let d = x.len();
        let n = x.first().map_or(0, |m| m.nrows());
        if x.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::DimensionMismatch(
                "tuple components must be square of equal size".into(),
            ));
        }
        Ok(MatrixTuple { d, n, x })
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        MatrixTuple { d, n, x: vec![CMat::zeros(n, n); d] }
    }

    /// Scalar point (level 1).
    pub fn scalar(z: &[C64]) -> Self {
        MatrixTuple {
            d: z.len(),
            n: 1,
            x: z.iter().map(|&v| CMat::from_element(1, 1, v)).collect(),
        }
    }

    /// The block row `[X_1 ... X_d]`.
    pub fn row_block(&self) -> CMat {
        linalg::hstack(&self.x)
    }

    /// Largest singular value of the block row.
    pub fn row_norm(&self) -> f64 {
        if self.n == 0 || self.d == 0 {
            return 0.0;
        }
        linalg::spectral_norm(&self.row_block())
    }

    pub fn is_strict_row_contraction(&self) -> bool {
        self.row_norm() < 1.0
    }

    pub fn scale(&self, s: C64) -> Self {
        MatrixTuple { d: self.d, n: self.n, x: self.x.iter().map(|m| m * s).collect() }
    }

    pub fn conj(&self) -> Self {
        MatrixTuple { d: self.d, n: self.n, x: self.x.iter().map(linalg::conj).collect() }
    }

    pub fn direct_sum(&self, other: &MatrixTuple) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch("direct sum of tuples with different d".into()));
        }
        let x = self
            .x
            .iter()
            .zip(&other.x)
            .map(|(a, b)| linalg::block_diag(a, b))
            .collect();
        Ok(MatrixTuple { d: self.d, n: self.n + other.n, x })
    }

    /// Componentwise `S⁻¹ X_j S`.
    pub fn similarity(&self, s: &CMat) -> Result<Self> {
        let s_inv = s
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("similarity matrix is singular".into()))?;
        Ok(MatrixTuple {
            d: self.d,
            n: self.n,
            x: self.x.iter().map(|m| &s_inv * m * s).collect(),
        })
    }

    pub fn to_json(&self) -> TupleJson {
        TupleJson {
            d: self.d,
            n: self.n,
            x: self.x.iter().map(matrix_to_json).collect(),
        }
    }

    pub fn from_json(j: &TupleJson) -> Result<Self> {
        if j.x.len() != j.d {
            return Err(Error::DimensionMismatch(format!(
                "expected {} matrices, found {}",
                j.d,
                j.x.len()
            )));
        }
        let x = j
            .x
            .iter()
            .map(|m| matrix_from_json(m, j.n))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixTuple { d: j.d, n: j.n, x })
    }
}

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TupleJson {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "X")]
    pub x: Vec<JsonMatrix>,
}

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(m: &JsonMatrix, n: usize) -> Result<CMat> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!("expected a {n}x{n} matrix")));
    }
    Ok(CMat::from_fn(n, n, |i, j| c64(m[i][j][0], m[i][j][1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_norm_of_isometric_row() {
        let s = 1.0 / 2f64.sqrt();
        let t = MatrixTuple::scalar(&[c64(s, 0.0), c64(0.0, s)]);
        assert!((t.row_norm() - 1.0).abs() < 1e-14);
        assert!(!t.is_strict_row_contraction());
    }

    #[test]
    fn json_round_trip() {
        let t = MatrixTuple::new(vec![
            CMat::from_fn(2, 2, |i, j| c64(i as f64, j as f64)),
            CMat::identity(2, 2),
        ])
        .unwrap();
        let back = MatrixTuple::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_ragged_tuple() {
        assert!(MatrixTuple::new(vec![CMat::zeros(2, 2), CMat::zeros(3, 3)]).is_err());
    }
}
