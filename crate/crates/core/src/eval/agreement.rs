//! Partition agreement: normalized mutual information and adjusted Rand index.
//!
//! Both are computed from the contingency table and summed in a canonical
//! order, so relabelling either partition gives bit-identical results.

use std::collections::HashMap;

use crate::clustering::{ClusterId, Clustering};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

struct Contingency {
    n: u64,
    /// `(cell, row total, column total)` for every nonzero cell.
    cells: Vec<(u64, u64, u64)>,
    rows: Vec<u64>,
    cols: Vec<u64>,
}

fn contingency(a: &Clustering, b: &Clustering) -> Result<Contingency> {
    if a.len() != b.len() {
        return Err(Error::UniverseMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut table: HashMap<(ClusterId, ClusterId), u64> = HashMap::new();
    for v in 0..a.len() {
        *table.entry((a.cluster_of(v), b.cluster_of(v))).or_default() += 1;
    }
    let row_total = |c| a.cluster_size(c) as u64;
    let col_total = |c| b.cluster_size(c) as u64;
    let mut cells: Vec<(u64, u64, u64)> = table
        .iter()
        .map(|(&(r, c), &k)| (k, row_total(r), col_total(c)))
        .collect();
    // Terms depend only on the cell and the product of its margins, so this
    // order is the same for (a, b) and (b, a).
    cells.sort_unstable_by_key(|&(k, r, c)| (k, r * c));
    let mut rows: Vec<u64> = a.clusters().values().map(|m| m.len() as u64).collect();
    let mut cols: Vec<u64> = b.clusters().values().map(|m| m.len() as u64).collect();
    rows.sort_unstable();
    cols.sort_unstable();
    Ok(Contingency {
        n: a.len() as u64,
        cells,
        rows,
        cols,
    })
}

fn entropy<T: Scalar>(sizes: &[u64], n: T) -> T {
    sizes.iter().fold(T::zero(), |acc, &s| {
        let p = T::from_u64(s).unwrap() / n;
        acc - p * p.ln()
    })
}

/// Normalized mutual information with arithmetic-mean normalization.
///
/// Partitions that are equal up to relabelling score exactly 1; zero mutual
/// information scores 0.
pub fn nmi<T: Scalar>(a: &Clustering, b: &Clustering) -> Result<T> {
    let t = contingency(a, b)?;
    if t.n == 0 || (t.cells.len() == t.rows.len() && t.cells.len() == t.cols.len()) {
        return Ok(T::one());
    }
    let n = T::from_u64(t.n).unwrap();
    let mi = t.cells.iter().fold(T::zero(), |acc, &(k, r, c)| {
        let k_t = T::from_u64(k).unwrap();
        let ratio = n * k_t / (T::from_u64(r).unwrap() * T::from_u64(c).unwrap());
        acc + k_t / n * ratio.ln()
    });
    let (ha, hb) = (entropy(&t.rows, n), entropy(&t.cols, n));
    let mean = (ha + hb) / T::from_f64(2.0).unwrap();
    if mean <= T::zero() {
        return Ok(T::zero());
    }
    Ok((mi / mean).max(T::zero()).min(T::one()))
}

fn pairs(k: u64) -> u128 {
    let k = k as u128;
    k * k.saturating_sub(1) / 2
}

/// Adjusted Rand index under the permutation model.
///
/// Degenerate tables whose expected and maximum index coincide (for example
/// both partitions trivial) score 1.
pub fn ari<T: Scalar>(a: &Clustering, b: &Clustering) -> Result<T> {
    let t = contingency(a, b)?;
    let total = pairs(t.n);
    if total == 0 {
        return Ok(T::one());
    }
    let to_t = |x: u128| T::from_u128(x).unwrap();
    let index: u128 = t.cells.iter().map(|&(k, _, _)| pairs(k)).sum();
    let sum_rows: u128 = t.rows.iter().map(|&k| pairs(k)).sum();
    let sum_cols: u128 = t.cols.iter().map(|&k| pairs(k)).sum();
    let expected = to_t(sum_rows) * to_t(sum_cols) / to_t(total);
    let max = (to_t(sum_rows) + to_t(sum_cols)) / T::from_f64(2.0).unwrap();
    if max == expected {
        return Ok(T::one());
    }
    Ok((to_t(index) - expected) / (max - expected))
}
