//! Square matrices with arbitrary-precision integer entries.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("bad matrix entry {0:?}")]
    BadEntry(String),
    #[error("malformed matrix JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        IntMatrix { dim, entries }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, MatrixError> {
        let dim = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(MatrixError::NotSquare {
                    rows: dim,
                    row: i,
                    len: r.len(),
                });
            }
        }
        Ok(IntMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, MatrixError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim.max(1)).map(<[BigInt]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    /// Matrix product; panics on a dimension mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        IntMatrix { dim: n, entries }
    }

    pub fn determinant(&self) -> BigInt {
        linalg::determinant(&self.rows())
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.dim + other.dim;
        let mut out = IntMatrix {
            dim: n,
            entries: vec![BigInt::zero(); n * n],
        };
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.entries[i * n + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                out.entries[(i + self.dim) * n + j + self.dim] = other.get(i, j).clone();
            }
        }
        out
    }

    /// JSON array of rows, entries as decimal strings.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows()
                .into_iter()
                .map(|r| Value::Array(r.into_iter().map(|x| Value::String(x.to_string())).collect()))
                .collect(),
        )
    }

    /// Accepts entries as decimal strings or JSON integers.
    pub fn from_json(v: &Value) -> Result<Self, MatrixError> {
        let rows = v
            .as_array()
            .ok_or_else(|| MatrixError::Json("expected an array of rows".into()))?;
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| MatrixError::Json("expected a row array".into()))?;
            let mut parsed = Vec::with_capacity(row.len());
            for e in row {
                let x = match e {
                    Value::String(s) => BigInt::from_str(s).map_err(|_| MatrixError::BadEntry(s.clone()))?,
                    Value::Number(n) if n.is_i64() => BigInt::from(n.as_i64().expect("checked")),
                    Value::Number(n) if n.is_u64() => BigInt::from(n.as_u64().expect("checked")),
                    other => return Err(MatrixError::BadEntry(other.to_string())),
                };
                parsed.push(x);
            }
            out.push(parsed);
        }
        Self::from_rows(out)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}
