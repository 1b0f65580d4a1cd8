//! Small dense helpers shared by the solver and the certificate checks.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

pub fn frob_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in 0..j {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

pub fn sym_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut s = a.clone();
    symmetrize(&mut s);
    s
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    a.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn min_eigenvalue_herm(a: &DMatrix<Complex64>) -> f64 {
    min_eigenvalue(&crate::embed::real_embedding(a))
}

/// Largest `alpha` (capped at `cap`) keeping `x + alpha * dx` positive
/// semidefinite, given the Cholesky factor of the positive definite `x`.
pub fn max_step(chol: &Cholesky<f64, Dyn>, dx: &DMatrix<f64>, cap: f64) -> f64 {
    let l = chol.l();
    let Some(z) = l.solve_lower_triangular(dx) else {
        return 0.0;
    };
    let Some(w) = l.solve_lower_triangular(&z.transpose()) else {
        return 0.0;
    };
    let lam = min_eigenvalue(&sym_part(&w));
    if lam >= 0.0 {
        cap
    } else {
        (-1.0 / lam).min(cap)
    }
}

/// Cholesky factorization with a growing diagonal shift when the matrix is
/// numerically semidefinite.
pub fn robust_cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Some(c);
    }
    let scale = (0..m.nrows()).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut shift = 1e-14 * scale;
    for _ in 0..8 {
        let mut shifted = m.clone();
        for i in 0..m.nrows() {
            shifted[(i, i)] += shift;
        }
        if let Some(c) = Cholesky::new(shifted) {
            return Some(c);
        }
        shift *= 100.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_to_boundary_of_identity() {
        let x = DMatrix::<f64>::identity(3, 3);
        let chol = Cholesky::new(x).unwrap();
        let dx = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-2.0, 0.0, 1.0]));
        assert!((max_step(&chol, &dx, 10.0) - 0.5).abs() < 1e-14);
        assert_eq!(max_step(&chol, &DMatrix::identity(3, 3), 10.0), 10.0);
    }
}
