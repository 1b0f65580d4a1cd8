use convexroof_sdp::{
    real_embedding, real_embedding_inverse, solve, verify_kkt, Certificate, Constraint, SdpProblem, Sense, SolverOptions,
    SparseHerm, Status,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&g + g.adjoint()) * c(0.5, 0.0)
}

fn min_eig(h: &DMatrix<Complex64>) -> f64 {
    let e = real_embedding(h).symmetric_eigenvalues();
    e.iter().copied().fold(f64::INFINITY, f64::min)
}

/// min <C, X> s.t. tr X = 1 over an n x n block.
fn eigen_problem(cm: &DMatrix<Complex64>) -> SdpProblem {
    let n = cm.nrows();
    let mut p = SdpProblem::new(vec![n], Sense::Min);
    p.objective[0] = SparseHerm::from_dense(cm, 0.0);
    p.constraints.push(Constraint::single(0, SparseHerm::identity(n), 1.0));
    p
}

#[test]
fn trace_with_fixed_corner() {
    let mut p = SdpProblem::new(vec![2], Sense::Min);
    p.objective[0] = SparseHerm::identity(2);
    p.constraints.push(Constraint::single(0, SparseHerm::from_triplets(2, vec![(0, 0, c(1.0, 0.0))]), 1.0));
    let sol = solve(&p, &SolverOptions::with_tol(1e-9)).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!((sol.primal_obj - 1.0).abs() < 1e-8);
    assert!(sol.gap <= 1e-8);
    assert!((sol.x[0][(0, 0)].re - 1.0).abs() < 1e-7);
    assert!(sol.x[0][(1, 1)].re.abs() < 1e-7);
    assert!(verify_kkt(&p, &sol, 1e-9).passed);
}

#[test]
fn diagonal_eigenvalue_minimization() {
    let cm = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
    let p = eigen_problem(&cm);
    let sol = solve(&p, &SolverOptions::with_tol(1e-9)).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!((sol.primal_obj + 1.0).abs() < 1e-8);
    assert!(sol.gap <= 1e-8);
}

#[test]
fn random_complex_eigenvalue_matches_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let cm = random_hermitian(6, &mut rng);
        let p = eigen_problem(&cm);
        let sol = solve(&p, &SolverOptions::with_tol(1e-9)).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.primal_obj - min_eig(&cm)).abs() < 1e-7);
        assert!(verify_kkt(&p, &sol, 1e-9).passed);
    }
}

#[test]
fn max_sense_gives_largest_eigenvalue() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cm = random_hermitian(5, &mut rng);
    let mut p = eigen_problem(&cm);
    p.sense = Sense::Max;
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    let lmax = -min_eig(&(-&cm));
    assert_eq!(sol.status, Status::Optimal);
    assert!((sol.primal_obj - lmax).abs() < 1e-7);
    assert!(verify_kkt(&p, &sol, 1e-7).passed);
}

#[test]
fn weak_duality_on_every_iterate() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [2, 4, 6] {
        let cm = random_hermitian(n, &mut rng);
        let sol = solve(&eigen_problem(&cm), &SolverOptions::default()).unwrap();
        for log in &sol.history {
            assert!(log.primal_obj >= log.dual_obj - 1e-9, "iterate {}: {} < {}", log.iter, log.primal_obj, log.dual_obj);
        }
    }
}

#[test]
fn perturbed_multiplier_fails_kkt() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cm = random_hermitian(4, &mut rng);
    let p = eigen_problem(&cm);
    let mut sol = solve(&p, &SolverOptions::default()).unwrap();
    assert!(verify_kkt(&p, &sol, 1e-7).passed);
    sol.y[0] += 0.1;
    let report = verify_kkt(&p, &sol, 1e-7);
    assert!(!report.passed);
    assert!(report.dual_residual > 0.05);
}

#[test]
fn negative_diagonal_is_infeasible() {
    let mut p = SdpProblem::new(vec![2], Sense::Min);
    p.objective[0] = SparseHerm::identity(2);
    p.constraints.push(Constraint::single(0, SparseHerm::from_triplets(2, vec![(0, 0, c(1.0, 0.0))]), -1.0));
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, Status::Infeasible);
    match sol.certificate {
        Some(Certificate::Primal { y, min_eig }) => {
            let by: f64 = y.iter().zip(&p.constraints).map(|(y, c)| y * c.rhs).sum();
            assert!(by < 0.0);
            assert!(min_eig >= -1e-8);
        }
        other => panic!("expected a primal certificate, got {other:?}"),
    }
}

#[test]
fn unbounded_primal_yields_dual_ray() {
    // min -X11 with only X12 fixed: X11 can grow without bound.
    let mut p = SdpProblem::new(vec![2], Sense::Min);
    p.objective[0] = SparseHerm::from_triplets(2, vec![(0, 0, c(-1.0, 0.0))]);
    p.constraints.push(Constraint::single(0, SparseHerm::from_triplets(2, vec![(0, 1, c(0.5, 0.0))]), 0.0));
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, Status::Infeasible);
    assert!(matches!(sol.certificate, Some(Certificate::Dual { .. })));
}

#[test]
fn dependent_rows_are_dropped() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cm = random_hermitian(3, &mut rng);
    let mut p = eigen_problem(&cm);
    p.constraints.push(Constraint::single(0, SparseHerm::identity(3).scale(2.0), 2.0));
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert_eq!(sol.dropped.len(), 1);
    assert!((sol.primal_obj - min_eig(&cm)).abs() < 1e-7);
}

#[test]
fn inconsistent_dependent_rows_give_certificate() {
    let mut p = eigen_problem(&DMatrix::identity(2, 2));
    p.constraints.push(Constraint::single(0, SparseHerm::identity(2).scale(2.0), 3.0));
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, Status::Infeasible);
    let Some(Certificate::Primal { y, .. }) = sol.certificate else { panic!("missing certificate") };
    let by: f64 = y.iter().zip(&p.constraints).map(|(y, c)| y * c.rhs).sum();
    assert!((by + 1.0).abs() < 1e-12);
}

#[test]
fn multi_block_problem() {
    // min <C1, X1> + <C2, X2> with tr X1 + tr X2 = 1.
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let c1 = random_hermitian(3, &mut rng);
    let c2 = DMatrix::from_fn(4, 4, |i, j| c(if i == j { 0.3 * i as f64 - 0.9 } else { 0.0 }, 0.0));
    let mut p = SdpProblem::new(vec![3, 4], Sense::Min);
    p.objective[0] = SparseHerm::from_dense(&c1, 0.0);
    p.objective[1] = SparseHerm::from_dense(&c2, 0.0);
    p.constraints.push(Constraint::new(vec![(0, SparseHerm::identity(3)), (1, SparseHerm::identity(4))], 1.0));
    let sol = solve(&p, &SolverOptions::with_tol(1e-9)).unwrap();
    let want = min_eig(&c1).min(-0.9);
    assert_eq!(sol.status, Status::Optimal);
    assert!((sol.primal_obj - want).abs() < 1e-7);
}

#[test]
fn json_dump_round_trip_solves_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = eigen_problem(&random_hermitian(4, &mut rng));
    let back = SdpProblem::from_json(&p.to_json().unwrap()).unwrap();
    let a = solve(&p, &SolverOptions::default()).unwrap();
    let b = solve(&back, &SolverOptions::default()).unwrap();
    assert_eq!(a.primal_obj, b.primal_obj);
}

#[test]
fn embedding_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..6 {
        let h = random_hermitian(n, &mut rng);
        let back = real_embedding_inverse(&real_embedding(&h));
        assert!((back - &h).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-15);
    }
}

/// Two-constraint family used for the convexity property:
/// min <C, X> s.t. tr X = b0, <D, X> = b1.
fn two_constraint_problem(cm: &DMatrix<Complex64>, d: &DMatrix<Complex64>, b: [f64; 2]) -> SdpProblem {
    let n = cm.nrows();
    let mut p = SdpProblem::new(vec![n], Sense::Min);
    p.objective[0] = SparseHerm::from_dense(cm, 0.0);
    p.constraints.push(Constraint::single(0, SparseHerm::identity(n), b[0]));
    p.constraints.push(Constraint::single(0, SparseHerm::from_dense(d, 0.0), b[1]));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn optimal_value_is_convex_in_rhs(seed in 0u64..10_000, lam in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let cm = random_hermitian(n, &mut rng);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| c(i as f64, 0.0)));
        // Keep <D, X> strictly inside (0, 3 tr X) so each instance is feasible.
        let b1 = [1.0, rng.random_range(0.3..2.7)];
        let b2 = [rng.random_range(0.5..2.0), 0.0];
        let b2 = [b2[0], b2[0] * rng.random_range(0.3..2.7)];
        let mix = [lam * b1[0] + (1.0 - lam) * b2[0], lam * b1[1] + (1.0 - lam) * b2[1]];
        let opts = SolverOptions::with_tol(1e-9);
        let v1 = solve(&two_constraint_problem(&cm, &d, b1), &opts).unwrap();
        let v2 = solve(&two_constraint_problem(&cm, &d, b2), &opts).unwrap();
        let vm = solve(&two_constraint_problem(&cm, &d, mix), &opts).unwrap();
        prop_assert_eq!(v1.status, Status::Optimal);
        prop_assert_eq!(v2.status, Status::Optimal);
        prop_assert_eq!(vm.status, Status::Optimal);
        prop_assert!(vm.primal_obj <= lam * v1.primal_obj + (1.0 - lam) * v2.primal_obj + 1e-6);
    }

    #[test]
    fn objective_scaling(seed in 0u64..10_000, scale in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cm = random_hermitian(5, &mut rng);
        let opts = SolverOptions::with_tol(1e-11);
        let base = solve(&eigen_problem(&cm), &opts).unwrap();
        let scaled = solve(&eigen_problem(&(&cm * c(scale, 0.0))), &opts).unwrap();
        prop_assert!((scaled.primal_obj - scale * base.primal_obj).abs() <= 1e-9 * (scale * base.primal_obj).abs().max(1.0));
    }

    #[test]
    fn iterates_stay_positive_definite(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cm = random_hermitian(4, &mut rng);
        let p = eigen_problem(&cm);
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        let r = verify_kkt(&p, &sol, 1e-7);
        prop_assert!(r.min_eig_x >= -1e-9 && r.min_eig_s >= -1e-9);
        for log in &sol.history {
            prop_assert!(log.primal_obj >= log.dual_obj - 1e-9);
        }
    }
}
