//! Real symmetric embedding of complex Hermitian matrices.
//!
//! `H = R + iI` maps to `[[R, -I], [I, R]]`. The embedding doubles every
//! eigenvalue's multiplicity and satisfies `tr(H K) = tr(emb(H) emb(K)) / 2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::sparse::SparseHerm;

pub fn real_embedding(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let v = h[(i, j)];
            out[(i, j)] = v.re;
            out[(n + i, n + j)] = v.re;
            out[(n + i, j)] = v.im;
            out[(i, n + j)] = -v.im;
        }
    }
    out
}

/// Left inverse of [`real_embedding`]. For a matrix without the embedded block
/// structure this returns the Hermitian matrix whose embedding is the nearest
/// structured matrix, which stays positive semidefinite when the input is.
pub fn real_embedding_inverse(y: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = y.nrows() / 2;
    DMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (y[(i, j)] + y[(n + i, n + j)]);
        let im = 0.5 * (y[(n + i, j)] - y[(i, n + j)]);
        Complex64::new(re, im)
    })
}

/// Real matrix reinterpreted as a complex one.
pub fn complexify(y: &DMatrix<f64>) -> DMatrix<Complex64> {
    y.map(|v| Complex64::new(v, 0.0))
}

/// Full (both triangles) real entries of a sparse Hermitian operator, either
/// as-is when `embed` is false (imaginary parts must then vanish) or through
/// the real embedding.
pub(crate) fn sparse_real_entries(a: &SparseHerm, embed: bool, scale: f64) -> Vec<(usize, usize, f64)> {
    let n = a.dim;
    let mut out = Vec::with_capacity(a.entries.len() * if embed { 4 } else { 2 });
    for &(r, c, v) in &a.entries {
        let re = v.re * scale;
        let im = v.im * scale;
        if r == c {
            out.push((r, r, re));
            if embed {
                out.push((n + r, n + r, re));
            }
            continue;
        }
        out.push((r, c, re));
        out.push((c, r, re));
        if embed {
            out.push((n + r, n + c, re));
            out.push((n + c, n + r, re));
            if im != 0.0 {
                out.push((n + r, c, im));
                out.push((c, n + r, im));
                out.push((r, n + c, -im));
                out.push((n + c, r, -im));
            }
        }
    }
    out.retain(|&(_, _, v)| v != 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_y_spectrum_doubles() {
        let sy = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        );
        let e = real_embedding(&sy);
        assert!((&e - e.transpose()).amax() < 1e-15);
        let mut ev: Vec<f64> = e.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_embeds_to_identity() {
        let id = DMatrix::<Complex64>::identity(3, 3);
        assert_eq!(real_embedding(&id), DMatrix::<f64>::identity(6, 6));
    }

    #[test]
    fn sparse_entries_match_dense_embedding() {
        let a = SparseHerm::from_triplets(
            3,
            vec![(0, 0, Complex64::new(1.5, 0.0)), (0, 2, Complex64::new(0.3, -0.7)), (1, 2, Complex64::new(0.0, 2.0))],
        );
        let mut dense = DMatrix::<f64>::zeros(6, 6);
        for (r, c, v) in sparse_real_entries(&a, true, 1.0) {
            dense[(r, c)] += v;
        }
        assert!((dense - real_embedding(&a.to_dense())).amax() < 1e-15);
    }
}
