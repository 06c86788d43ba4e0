//! Scalar and sequence error metrics.

use num_traits::{Float, Num};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `s - s'`, signed.
pub fn absolute_difference<T: Num>(reference: T, synthetic: T) -> T {
    reference - synthetic
}

/// `(s - s') / s`, or `None` when `s` is zero.
pub fn relative_difference<T: Num + Clone>(reference: T, synthetic: T) -> Option<T> {
    if reference.is_zero() {
        return None;
    }
    Some((reference.clone() - synthetic) / reference)
}

/// Root mean squared difference of two equal-length sequences. Two empty
/// sequences have error 0.
pub fn rmse<T: Float>(reference: &[T], synthetic: &[T]) -> Result<T> {
    if reference.len() != synthetic.len() {
        return Err(Error::LengthMismatch {
            left: reference.len(),
            right: synthetic.len(),
        });
    }
    if reference.is_empty() {
        return Ok(T::zero());
    }
    let sum = reference
        .iter()
        .zip(synthetic)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
    let n = T::from(reference.len()).expect("length fits the scalar type");
    Ok((sum / n).sqrt())
}

/// How two integer sequences are paired up before [`rmse`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    /// Position `i` in both sequences refers to the same node or cluster.
    #[default]
    ByEntity,
    /// Both sequences sorted descending; the shorter is padded with zeros.
    SortedRank,
}

/// RMSE between two count sequences under `alignment`.
pub fn sequence_rmse<T: Scalar>(
    reference: &[usize],
    synthetic: &[usize],
    alignment: Alignment,
) -> Result<T> {
    let (mut a, mut b) = (reference.to_vec(), synthetic.to_vec());
    if alignment == Alignment::SortedRank {
        a.sort_unstable_by(|x, y| y.cmp(x));
        b.sort_unstable_by(|x, y| y.cmp(x));
        let len = a.len().max(b.len());
        a.resize(len, 0);
        b.resize(len, 0);
    }
    let to_t = |v: Vec<usize>| v.into_iter().map(T::from_count).collect::<Vec<T>>();
    rmse(&to_t(a), &to_t(b))
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Float> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch {
                left: (rows.len(), cols),
                right: (rows.len(), bad.len()),
            });
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.cols + col]
    }
}

/// Frobenius norm of `a - b`.
pub fn frobenius_diff<T: Float>(a: &Matrix<T>, b: &Matrix<T>) -> Result<T> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    let sum = a
        .data
        .iter()
        .zip(&b.data)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y));
    Ok(sum.sqrt())
}
