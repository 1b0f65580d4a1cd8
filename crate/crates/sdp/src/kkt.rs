//! Independent optimality checks on a returned solution.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::min_eigenvalue_herm;
use crate::problem::{SdpProblem, Sense};
use crate::solver::SdpSolution;
use crate::sparse::add_scaled_dense;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `max_i |sum_b <A_ib, X_b> - b_i|`.
    pub primal_residual: f64,
    /// Max-norm of `C - sum_i y_i A_i - S` (sign-flipped for max problems).
    pub dual_residual: f64,
    /// `|sum_b <X_b, S_b>|`.
    pub complementarity: f64,
    pub min_eig_x: f64,
    pub min_eig_s: f64,
    pub passed: bool,
}

/// Recomputes residuals from the problem data. Passes iff the three residuals
/// are at most `10 * tol` and both `X` and `S` are positive semidefinite within
/// `1e-9`.
pub fn verify_kkt(p: &SdpProblem, sol: &SdpSolution, tol: f64) -> KktReport {
    let mut primal_residual = 0.0f64;
    for con in &p.constraints {
        let lhs: f64 = con.terms.iter().map(|(b, a)| a.inner_dense(&sol.x[*b])).sum();
        primal_residual = primal_residual.max((lhs - con.rhs).abs());
    }

    let sign = match p.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let mut dual_residual = 0.0f64;
    let mut complementarity = 0.0;
    let mut min_eig_x = f64::INFINITY;
    let mut min_eig_s = f64::INFINITY;
    for (b, &n) in p.blocks.iter().enumerate() {
        let mut r: DMatrix<Complex64> = DMatrix::zeros(n, n);
        add_scaled_dense(&mut r, &p.objective[b], sign);
        for (i, con) in p.constraints.iter().enumerate() {
            for (bb, a) in &con.terms {
                if *bb == b {
                    add_scaled_dense(&mut r, a, -sign * sol.y[i]);
                }
            }
        }
        r -= &sol.s[b];
        dual_residual = dual_residual.max(r.iter().map(|z| z.norm()).fold(0.0, f64::max));
        complementarity += sol.x[b].iter().zip(sol.s[b].iter()).map(|(x, s)| (x.conj() * s).re).sum::<f64>();
        min_eig_x = min_eig_x.min(min_eigenvalue_herm(&sol.x[b]));
        min_eig_s = min_eig_s.min(min_eigenvalue_herm(&sol.s[b]));
    }
    let complementarity = complementarity.abs();
    let bound = 10.0 * tol;
    let passed = primal_residual <= bound
        && dual_residual <= bound
        && complementarity <= bound
        && min_eig_x >= -1e-9
        && min_eig_s >= -1e-9;
    KktReport { primal_residual, dual_residual, complementarity, min_eig_x, min_eig_s, passed }
}
