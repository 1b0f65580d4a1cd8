//! Sparse Hermitian operators stored as upper-triangle triplets.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SdpError};

/// Hermitian matrix given by its upper triangle (`row <= col`).
///
/// An entry `(r, c, v)` with `r < c` implies the mirrored entry `(c, r, conj(v))`.
/// Diagonal values must be real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseHerm {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHerm {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect(),
        }
    }

    /// Builds from arbitrary (row, col, value) triplets, folding lower-triangle
    /// entries onto the upper triangle and summing duplicates.
    ///
    /// Lower entries are interpreted as the conjugate of their upper partner, so
    /// callers describing a Hermitian operator may give either half, or both
    /// halves each multiplied by one half.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (r, c, v) in triplets {
            let (key, val) = if r <= c { ((r, c), v) } else { ((c, r), v.conj()) };
            *map.entry(key).or_insert(Complex64::new(0.0, 0.0)) += val;
        }
        let entries = map
            .into_iter()
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|((r, c), v)| if r == c { (r, c, Complex64::new(v.re, 0.0)) } else { (r, c, v) })
            .collect();
        Self { dim, entries }
    }

    pub fn from_dense(m: &DMatrix<Complex64>, drop_below: f64) -> Self {
        let n = m.nrows();
        let mut entries = Vec::new();
        for c in 0..n {
            for r in 0..=c {
                let v = if r == c {
                    Complex64::new(m[(r, r)].re, 0.0)
                } else {
                    (m[(r, c)] + m[(c, r)].conj()) * 0.5
                };
                if v.norm() > drop_below {
                    entries.push((r, c, v));
                }
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Self { dim: n, entries }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
            if r != c {
                m[(c, r)] += v.conj();
            }
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|&(_, _, v)| v.im == 0.0)
    }

    /// `Re tr(self * x)` for a dense Hermitian `x`.
    pub fn inner_dense(&self, x: &DMatrix<Complex64>) -> f64 {
        let mut acc = 0.0;
        for &(r, c, v) in &self.entries {
            if r == c {
                acc += v.re * x[(r, r)].re;
            } else {
                // v * x[c, r] + conj(v) * x[r, c]
                acc += 2.0 * (v * x[(c, r)]).re;
            }
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| if r == c { v.norm_sqr() } else { 2.0 * v.norm_sqr() })
            .sum::<f64>()
            .sqrt()
    }

    pub fn validate(&self, context: &str) -> Result<()> {
        for &(r, c, v) in &self.entries {
            if r > c || c >= self.dim {
                return Err(SdpError::DimensionMismatch(format!(
                    "{context}: entry ({r},{c}) outside upper triangle of dimension {}",
                    self.dim
                )));
            }
            if r == c && v.im.abs() > 1e-12 {
                return Err(SdpError::NotHermitian { context: context.to_string(), deviation: v.im.abs() });
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(SdpError::Numerical(format!("{context}: non-finite entry")));
            }
        }
        Ok(())
    }
}

/// Accumulates `s * a` into a dense Hermitian matrix.
pub(crate) fn add_scaled_dense(target: &mut DMatrix<Complex64>, a: &SparseHerm, s: f64) {
    for &(r, c, v) in &a.entries {
        target[(r, c)] += v * s;
        if r != c {
            target[(c, r)] += v.conj() * s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triplets_fold_lower_entries() {
        let a = SparseHerm::from_triplets(2, vec![(1, 0, c(0.0, 1.0)), (0, 1, c(1.0, 0.0))]);
        assert_eq!(a.entries, vec![(0, 1, c(1.0, -1.0))]);
        let d = a.to_dense();
        assert_eq!(d[(1, 0)], c(1.0, 1.0));
    }

    #[test]
    fn inner_matches_dense_trace() {
        let a = SparseHerm::from_triplets(3, vec![(0, 0, c(2.0, 0.0)), (0, 2, c(0.5, -0.25)), (1, 2, c(0.0, 1.0))]);
        let x = SparseHerm::from_triplets(3, vec![(0, 0, c(1.0, 0.0)), (0, 2, c(0.3, 0.7)), (1, 2, c(-0.2, 0.4)), (1, 1, c(3.0, 0.0))])
            .to_dense();
        let dense = (a.to_dense() * &x).trace().re;
        assert!((a.inner_dense(&x) - dense).abs() < 1e-14);
    }
}
