//! Infeasible-start primal-dual interior-point method.
//!
//! Search directions use the HKM scaling with a Mehrotra predictor-corrector.
//! Complex blocks are solved through the real embedding; blocks whose data are
//! all real are solved directly in real arithmetic.

use std::collections::HashMap;

use log::{debug, warn};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::embed::{complexify, real_embedding_inverse, sparse_real_entries};
use crate::error::Result;
use crate::linalg::{frob_dot, max_step, min_eigenvalue, robust_cholesky, sym_part, symmetrize};
use crate::problem::{SdpProblem, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Absolute duality gap required for `Status::Optimal`.
    pub tol: f64,
    /// Absolute max-norm bound on primal and dual equality residuals.
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Rows of the constraint Gram factorization with pivots below this
    /// (relative to the largest diagonal) are dropped as dependent.
    pub dependency_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-7, feas_tol: 1e-8, max_iter: 200, step_fraction: 0.98, dependency_threshold: 1e-10 }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    MaxIter,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::MaxIter => "max_iter",
        })
    }
}

/// Farkas-type evidence attached to `Status::Infeasible`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    /// `sum_i y_i A_i` is positive semidefinite (up to `min_eig`) while
    /// `b . y = -1`, so no feasible `X` exists.
    Primal { y: Vec<f64>, min_eig: f64 },
    /// `X` is positive semidefinite with `A(X)` ≈ 0 (max-norm `residual`) and
    /// an objective of -1 for min problems (+1 for max problems), so the dual
    /// is infeasible and the primal, if feasible, is unbounded.
    Dual { x: Vec<DMatrix<Complex64>>, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iter: usize,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub mu: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

/// Solution in the caller's conventions.
///
/// For min problems `S = C - sum_i y_i A_i`; for max problems
/// `S = sum_i y_i A_i - C`. In both cases `dual_obj = b . y`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpSolution {
    pub x: Vec<DMatrix<Complex64>>,
    pub y: Vec<f64>,
    pub s: Vec<DMatrix<Complex64>>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub status: Status,
    pub iterations: usize,
    pub history: Vec<IterationLog>,
    pub certificate: Option<Certificate>,
    /// Constraint rows removed as linearly dependent; their multipliers are 0.
    pub dropped: Vec<usize>,
}

struct Part {
    block: usize,
    full: Vec<(usize, usize, f64)>,
    cols: Vec<(usize, Vec<(usize, f64)>)>,
}

impl Part {
    fn new(block: usize, mut full: Vec<(usize, usize, f64)>) -> Self {
        full.sort_by_key(|&(r, c, _)| (c, r));
        let mut cols: Vec<(usize, Vec<(usize, f64)>)> = Vec::new();
        for &(r, c, v) in &full {
            match cols.last_mut() {
                Some((cc, rows)) if *cc == c => rows.push((r, v)),
                _ => cols.push((c, vec![(r, v)])),
            }
        }
        Self { block, full, cols }
    }

    fn inner(&self, z: &DMatrix<f64>) -> f64 {
        self.full.iter().map(|&(r, c, v)| v * z[(r, c)]).sum()
    }
}

/// Real, min-sense copy of the problem with dependent rows removed.
struct Internal {
    dims: Vec<usize>,
    complex: Vec<bool>,
    scale: Vec<f64>,
    c: Vec<DMatrix<f64>>,
    cons: Vec<Vec<Part>>,
    b: DVector<f64>,
    by_block: Vec<Vec<(usize, usize)>>,
    kept: Vec<usize>,
}

impl Internal {
    fn m(&self) -> usize {
        self.cons.len()
    }

    fn n_total(&self) -> f64 {
        self.dims.iter().sum::<usize>() as f64
    }

    fn op(&self, z: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.cons.iter().map(|parts| parts.iter().map(|p| p.inner(&z[p.block])).sum()))
    }

    fn adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (i, parts) in self.cons.iter().enumerate() {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            for p in parts {
                let target = &mut out[p.block];
                for &(r, c, v) in &p.full {
                    target[(r, c)] += yi * v;
                }
            }
        }
        out
    }

    fn objective(&self, x: &[DMatrix<f64>]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| frob_dot(c, x)).sum()
    }

    /// HKM Schur complement `M_ij = <A_i, X A_j S^-1>`.
    fn schur(&self, x: &[DMatrix<f64>], sinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.m();
        let mut out = DMatrix::zeros(m, m);
        for (b, list) in self.by_block.iter().enumerate() {
            let n = self.dims[b];
            let xb = &x[b];
            let sb = &sinv[b];
            for (pos, &(j, pj)) in list.iter().enumerate() {
                let part = &self.cons[j][pj];
                let k = part.cols.len();
                let mut left = DMatrix::<f64>::zeros(n, k);
                let mut right = DMatrix::<f64>::zeros(k, n);
                for (t, (c, rows)) in part.cols.iter().enumerate() {
                    let mut col = left.column_mut(t);
                    for &(r, v) in rows {
                        col.axpy(v, &xb.column(r), 1.0);
                    }
                    right.row_mut(t).copy_from(&sb.row(*c));
                }
                let g = &left * &right;
                for &(i, pi) in &list[..=pos] {
                    let acc = self.cons[i][pi].inner(&g);
                    out[(i, j)] += acc;
                }
            }
        }
        for j in 0..m {
            for i in 0..j {
                out[(j, i)] = out[(i, j)];
            }
        }
        out
    }
}

fn build_internal(p: &SdpProblem, opts: &SolverOptions) -> (Internal, Vec<usize>, Option<Vec<f64>>) {
    let nb = p.blocks.len();
    let mut complex = vec![false; nb];
    for (b, c) in p.objective.iter().enumerate() {
        complex[b] |= !c.is_real();
    }
    for con in &p.constraints {
        for (b, a) in &con.terms {
            complex[*b] |= !a.is_real();
        }
    }
    let sign = match p.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let scale: Vec<f64> = complex.iter().map(|&z| if z { 0.5 } else { 1.0 }).collect();
    let dims: Vec<usize> = p.blocks.iter().zip(&complex).map(|(&n, &z)| if z { 2 * n } else { n }).collect();
    let c: Vec<DMatrix<f64>> = (0..nb)
        .map(|b| {
            let mut m = DMatrix::zeros(dims[b], dims[b]);
            for (r, cc, v) in sparse_real_entries(&p.objective[b], complex[b], scale[b] * sign) {
                m[(r, cc)] += v;
            }
            m
        })
        .collect();
    let all: Vec<Vec<Part>> = p
        .constraints
        .iter()
        .map(|con| {
            let mut per_block: Vec<(usize, Vec<(usize, usize, f64)>)> = Vec::new();
            for (b, a) in &con.terms {
                let entries = sparse_real_entries(a, complex[*b], scale[*b]);
                match per_block.iter_mut().find(|(bb, _)| bb == b) {
                    Some((_, list)) => list.extend(entries),
                    None => per_block.push((*b, entries)),
                }
            }
            per_block.into_iter().filter(|(_, e)| !e.is_empty()).map(|(b, e)| Part::new(b, e)).collect()
        })
        .collect();
    let rhs: Vec<f64> = p.constraints.iter().map(|c| c.rhs).collect();

    let (kept, dropped, farkas) = independent_rows(&all, &rhs, opts.dependency_threshold);
    let keep_set: Vec<bool> = {
        let mut v = vec![false; all.len()];
        for &i in &kept {
            v[i] = true;
        }
        v
    };
    let mut cons = Vec::with_capacity(kept.len());
    let mut b = Vec::with_capacity(kept.len());
    for (i, parts) in all.into_iter().enumerate() {
        if keep_set[i] {
            cons.push(parts);
            b.push(rhs[i]);
        }
    }
    let mut by_block = vec![Vec::new(); nb];
    for (i, parts) in cons.iter().enumerate() {
        for (k, part) in parts.iter().enumerate() {
            by_block[part.block].push((i, k));
        }
    }
    let internal = Internal { dims, complex, scale, c, cons, b: DVector::from_vec(b), by_block, kept };
    (internal, dropped, farkas)
}

/// Selects a maximal independent subset of constraint rows. Returns kept rows,
/// dropped rows, and a Farkas vector when a dropped row's right-hand side is
/// inconsistent with the kept rows.
fn independent_rows(cons: &[Vec<Part>], rhs: &[f64], threshold: f64) -> (Vec<usize>, Vec<usize>, Option<Vec<f64>>) {
    let m = cons.len();
    if m == 0 {
        return (Vec::new(), Vec::new(), None);
    }
    let mut by_pos: HashMap<(usize, usize, usize), Vec<(usize, f64)>> = HashMap::new();
    for (i, parts) in cons.iter().enumerate() {
        for p in parts {
            for &(r, c, v) in &p.full {
                let list = by_pos.entry((p.block, r, c)).or_default();
                match list.last_mut() {
                    Some((li, lv)) if *li == i => *lv += v,
                    _ => list.push((i, v)),
                }
            }
        }
    }
    let mut gram = DMatrix::<f64>::zeros(m, m);
    for list in by_pos.values() {
        for (a, &(i, vi)) in list.iter().enumerate() {
            for &(j, vj) in &list[a..] {
                gram[(i, j)] += vi * vj;
            }
        }
    }
    for j in 0..m {
        for i in 0..j {
            let v = gram[(i, j)] + gram[(j, i)];
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let maxdiag = (0..m).map(|i| gram[(i, i)]).fold(0.0, f64::max);
    let floor = threshold * maxdiag.max(1.0);

    // Fast path: a clean Cholesky of the diagonally scaled Gram matrix.
    if (0..m).all(|i| gram[(i, i)] > floor) {
        let d: Vec<f64> = (0..m).map(|i| gram[(i, i)].sqrt()).collect();
        let scaled = DMatrix::from_fn(m, m, |i, j| gram[(i, j)] / (d[i] * d[j]));
        if let Some(ch) = Cholesky::new(scaled) {
            let l = ch.l();
            if (0..m).all(|i| l[(i, i)] * l[(i, i)] > threshold) {
                return ((0..m).collect(), Vec::new(), None);
            }
        }
    }

    // Greedy pivoted Cholesky on the Gram matrix.
    let mut resid: Vec<f64> = (0..m).map(|i| gram[(i, i)]).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut lcols: Vec<Vec<f64>> = Vec::new();
    let mut used = vec![false; m];
    loop {
        let mut best = None;
        for i in 0..m {
            if !used[i] && best.is_none_or(|(_, v)| resid[i] > v) {
                best = Some((i, resid[i]));
            }
        }
        let Some((piv, val)) = best else { break };
        if val <= floor {
            break;
        }
        used[piv] = true;
        let root = val.sqrt();
        let col: Vec<f64> = (0..m)
            .map(|k| {
                if used[k] && k != piv {
                    return 0.0;
                }
                let mut s = gram[(k, piv)];
                for lc in &lcols {
                    s -= lc[k] * lc[piv];
                }
                s / root
            })
            .collect();
        for k in 0..m {
            if !used[k] {
                resid[k] -= col[k] * col[k];
            }
        }
        chosen.push(piv);
        lcols.push(col);
    }
    chosen.sort_unstable();
    let dropped: Vec<usize> = (0..m).filter(|i| !chosen.contains(i)).collect();
    if !dropped.is_empty() {
        warn!("dropping {} linearly dependent constraint rows", dropped.len());
    }

    // Consistency of the dropped rows: express A_i in the span of the kept rows.
    let k = chosen.len();
    let gkk = DMatrix::from_fn(k, k, |a, b| gram[(chosen[a], chosen[b])]);
    let gkk_ch = robust_cholesky(&gkk);
    for &i in &dropped {
        let coef = match (&gkk_ch, k) {
            (_, 0) => DVector::zeros(0),
            (Some(ch), _) => ch.solve(&DVector::from_fn(k, |a, _| gram[(chosen[a], i)])),
            (None, _) => continue,
        };
        let predicted: f64 = (0..k).map(|a| coef[a] * rhs[chosen[a]]).sum();
        let mismatch = rhs[i] - predicted;
        if mismatch.abs() > 1e-8 * (1.0 + rhs[i].abs()) {
            // y = s (e_i - sum coef e_k) has sum y A = 0 and b.y = s * mismatch.
            let s = -1.0 / mismatch;
            let mut y = vec![0.0; m];
            y[i] = s;
            for a in 0..k {
                y[chosen[a]] -= s * coef[a];
            }
            return (chosen, dropped, Some(y));
        }
    }
    (chosen, dropped, None)
}

fn initial_scales(int: &Internal) -> (Vec<f64>, Vec<f64>) {
    let nb = int.dims.len();
    let mut norm_a = vec![0.0f64; nb];
    let mut ratio = vec![0.0f64; nb];
    for (i, parts) in int.cons.iter().enumerate() {
        for p in parts {
            let nrm = p.full.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt();
            norm_a[p.block] = norm_a[p.block].max(nrm);
            ratio[p.block] = ratio[p.block].max((1.0 + int.b[i].abs()) / (1.0 + nrm));
        }
    }
    let mut xi = vec![0.0; nb];
    let mut eta = vec![0.0; nb];
    for b in 0..nb {
        let n = int.dims[b] as f64;
        let sq = n.sqrt();
        let norm_c = int.c[b].norm();
        xi[b] = 10.0f64.max(sq).max(sq * ratio[b]);
        eta[b] = 10.0f64.max(sq).max(norm_a[b].max(norm_c));
    }
    (xi, eta)
}

struct Iterate {
    x: Vec<DMatrix<f64>>,
    y: DVector<f64>,
    s: Vec<DMatrix<f64>>,
}

struct Measures {
    pobj: f64,
    dobj: f64,
    pinf: f64,
    dinf: f64,
    rp: DVector<f64>,
    rd: Vec<DMatrix<f64>>,
}

fn measure(int: &Internal, it: &Iterate) -> Measures {
    let ax = int.op(&it.x);
    let rp = &int.b - ax;
    let aty = int.adjoint(&it.y);
    let rd: Vec<DMatrix<f64>> = (0..int.dims.len()).map(|b| &int.c[b] - &aty[b] - &it.s[b]).collect();
    let pobj = int.objective(&it.x);
    let dobj = int.b.dot(&it.y);
    let pinf = rp.amax();
    let dinf = rd.iter().map(|m| if m.is_empty() { 0.0 } else { m.amax() }).fold(0.0, f64::max);
    Measures { pobj, dobj, pinf, dinf, rp, rd }
}

/// `out_i = <A_i, Z>` for non-symmetric dense `Z` per block.
fn op_general(int: &Internal, z: &[DMatrix<f64>]) -> DVector<f64> {
    int.op(z)
}

pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    p.validate()?;
    let (int, dropped, farkas) = build_internal(p, opts);
    let sign = match p.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let m_orig = p.constraints.len();

    if let Some(y) = farkas {
        return Ok(infeasible_rows_solution(p, y, dropped));
    }

    let nb = int.dims.len();
    let (xi, eta) = initial_scales(&int);
    let mut it = Iterate {
        x: (0..nb).map(|b| DMatrix::identity(int.dims[b], int.dims[b]) * xi[b]).collect(),
        y: DVector::zeros(int.m()),
        s: (0..nb).map(|b| DMatrix::identity(int.dims[b], int.dims[b]) * eta[b]).collect(),
    };
    // Start with b.y = <C,X> - <X,S>, so the duality gap equals <X,S> as it
    // would at a feasible point. Together with equal primal and dual step
    // lengths this keeps the gap nonnegative while the iterates stay inside
    // the starting scale.
    let bnorm2 = int.b.norm_squared();
    if bnorm2 > 0.0 {
        let xs: f64 = it.x.iter().zip(&it.s).map(|(x, s)| frob_dot(x, s)).sum();
        let target = int.objective(&it.x) - xs;
        it.y = &int.b * (target / bnorm2);
    }
    let n_total = int.n_total();
    let mut history = Vec::new();
    let mut best: Option<(f64, Iterate, Measures)> = None;
    let mut status = Status::MaxIter;
    let mut certificate = None;
    let mut iterations = 0;
    let mut stalls = 0;
    let mut last_steps = (0.0, 0.0);

    for iter in 0..=opts.max_iter {
        iterations = iter;
        let meas = measure(&int, &it);
        let mu = it.x.iter().zip(&it.s).map(|(x, s)| frob_dot(x, s)).sum::<f64>() / n_total;
        history.push(IterationLog {
            iter,
            primal_obj: sign * meas.pobj,
            dual_obj: sign * meas.dobj,
            primal_infeas: meas.pinf,
            dual_infeas: meas.dinf,
            mu,
            step_primal: last_steps.0,
            step_dual: last_steps.1,
        });
        debug!(
            "iter {iter}: pobj {:.10e} dobj {:.10e} pinf {:.2e} dinf {:.2e} mu {:.2e}",
            meas.pobj, meas.dobj, meas.pinf, meas.dinf, mu
        );
        let gap = (meas.pobj - meas.dobj).abs();
        let merit = gap.max(meas.pinf).max(meas.dinf);
        if gap <= opts.tol && meas.pinf <= opts.feas_tol && meas.dinf <= opts.feas_tol {
            status = Status::Optimal;
            best = Some((merit, clone_iterate(&it), meas));
            break;
        }
        if let Some(cert) = detect_infeasibility(p, &int, &it, &meas) {
            status = Status::Infeasible;
            certificate = Some(cert);
            best = Some((merit, clone_iterate(&it), meas));
            break;
        }
        if best.as_ref().is_none_or(|(bm, _, _)| merit < *bm) {
            best = Some((merit, clone_iterate(&it), measure(&int, &it)));
        }
        if iter == opts.max_iter {
            break;
        }
        match step(&int, &mut it, &meas, mu, opts) {
            Some((ap, ad)) => {
                last_steps = (ap, ad);
                if ap < 1e-9 && ad < 1e-9 {
                    stalls += 1;
                    if stalls >= 3 {
                        warn!("interior-point iteration stalled at iteration {iter}");
                        break;
                    }
                } else {
                    stalls = 0;
                }
            }
            None => {
                warn!("numerical breakdown in interior-point step at iteration {iter}");
                break;
            }
        }
    }

    let (_, fin, meas) = best.expect("at least one iterate is measured");
    Ok(finish(&int, fin, meas, status, iterations, history, certificate, dropped, m_orig, sign))
}

pub fn solve_default(p: &SdpProblem) -> Result<SdpSolution> {
    solve(p, &SolverOptions::default())
}

fn clone_iterate(it: &Iterate) -> Iterate {
    Iterate { x: it.x.clone(), y: it.y.clone(), s: it.s.clone() }
}

/// One predictor-corrector step. Returns the primal and dual step lengths.
fn step(int: &Internal, it: &mut Iterate, meas: &Measures, mu: f64, opts: &SolverOptions) -> Option<(f64, f64)> {
    let nb = int.dims.len();
    let mut s_chol: Vec<Cholesky<f64, Dyn>> = Vec::with_capacity(nb);
    let mut x_chol: Vec<Cholesky<f64, Dyn>> = Vec::with_capacity(nb);
    for b in 0..nb {
        s_chol.push(Cholesky::new(sym_part(&it.s[b]))?);
        x_chol.push(Cholesky::new(sym_part(&it.x[b]))?);
    }
    let sinv: Vec<DMatrix<f64>> = s_chol.iter().map(|c| c.inverse()).collect();
    let schur = int.schur(&it.x, &sinv);
    let m_chol = if int.m() > 0 { Some(robust_cholesky(&schur)?) } else { None };
    let solve_m = |rhs: DVector<f64>| -> DVector<f64> {
        match &m_chol {
            Some(ch) => ch.solve(&rhs),
            None => rhs,
        }
    };

    // X Rd S^-1, shared by predictor and corrector.
    let x_rd_sinv: Vec<DMatrix<f64>> = (0..nb).map(|b| &it.x[b] * &meas.rd[b] * &sinv[b]).collect();
    let base_rhs = &int.b + op_general(int, &x_rd_sinv);

    let directions = |rhs: DVector<f64>, extra: &[DMatrix<f64>]| -> (DVector<f64>, Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
        let dy = solve_m(rhs);
        let aty = int.adjoint(&dy);
        let ds: Vec<DMatrix<f64>> = (0..nb).map(|b| &meas.rd[b] - &aty[b]).collect();
        let dx: Vec<DMatrix<f64>> = (0..nb)
            .map(|b| {
                let mut t = &it.x[b] * &ds[b] * &sinv[b];
                symmetrize(&mut t);
                let mut d = &extra[b] - &it.x[b] - t;
                symmetrize(&mut d);
                d
            })
            .collect();
        (dy, dx, ds)
    };

    let zeros: Vec<DMatrix<f64>> = (0..nb).map(|b| DMatrix::zeros(int.dims[b], int.dims[b])).collect();
    let (_dy_a, dx_a, ds_a) = directions(base_rhs.clone(), &zeros);
    let ap = (0..nb).map(|b| max_step(&x_chol[b], &dx_a[b], 1.0)).fold(1.0, f64::min);
    let ad = (0..nb).map(|b| max_step(&s_chol[b], &ds_a[b], 1.0)).fold(1.0, f64::min);
    let ap = ap.min(ad);
    let ad = ap;
    let n_total = int.n_total();
    let mu_aff = (0..nb)
        .map(|b| frob_dot(&(&it.x[b] + &dx_a[b] * ap), &(&it.s[b] + &ds_a[b] * ad)))
        .sum::<f64>()
        / n_total;
    let sigma = if mu > 0.0 { (mu_aff / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };

    // Corrector: target sigma*mu and compensate the second-order term.
    let corr: Vec<DMatrix<f64>> = (0..nb).map(|b| &dx_a[b] * &ds_a[b] * &sinv[b]).collect();
    let extra: Vec<DMatrix<f64>> = (0..nb)
        .map(|b| {
            let mut e = &sinv[b] * (sigma * mu) - sym_part(&corr[b]);
            symmetrize(&mut e);
            e
        })
        .collect();
    let sinv_op = op_general(int, &sinv);
    let corr_op = op_general(int, &corr);
    let rhs = base_rhs - sinv_op * (sigma * mu) + corr_op;
    let (dy, dx, ds) = directions(rhs, &extra);

    let cap = 1.0 / opts.step_fraction;
    let ap = (0..nb).map(|b| max_step(&x_chol[b], &dx[b], cap)).fold(cap, f64::min) * opts.step_fraction;
    let ad = (0..nb).map(|b| max_step(&s_chol[b], &ds[b], cap)).fold(cap, f64::min) * opts.step_fraction;
    // A common step length shrinks both residuals by the same factor.
    let ap = ap.min(ad).min(1.0);
    let ad = ap;
    for b in 0..nb {
        it.x[b] += &dx[b] * ap;
        it.s[b] += &ds[b] * ad;
        symmetrize(&mut it.x[b]);
        symmetrize(&mut it.s[b]);
    }
    it.y += dy * ad;
    Some((ap, ad))
}

fn detect_infeasibility(p: &SdpProblem, int: &Internal, it: &Iterate, meas: &Measures) -> Option<Certificate> {
    const RAY_TOL: f64 = 1e-8;
    let by = meas.dobj;
    if by > 0.0 {
        // A^T y = C - S - Rd, so A^T(-y/by) >= (Rd - C)/by.
        let bound: f64 =
            (0..int.dims.len()).map(|b| (&int.c[b] - &meas.rd[b]).norm()).sum::<f64>() / by;
        if bound < RAY_TOL {
            let ray = &it.y * (-1.0 / by);
            let aty = int.adjoint(&ray);
            let min_eig = aty.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min);
            let mut y = vec![0.0; p.constraints.len()];
            for (k, &i) in int.kept.iter().enumerate() {
                y[i] = ray[k];
            }
            return Some(Certificate::Primal { y, min_eig });
        }
    }
    let cx = meas.pobj;
    if cx < 0.0 {
        let scale = -1.0 / cx;
        let resid = (&int.b - &meas.rp).amax() * scale;
        if resid < RAY_TOL {
            let x = (0..int.dims.len()).map(|b| user_block(int, b, &(&it.x[b] * scale))).collect();
            return Some(Certificate::Dual { x, residual: resid });
        }
    }
    None
}

fn user_block(int: &Internal, b: usize, m: &DMatrix<f64>) -> DMatrix<Complex64> {
    if int.complex[b] {
        real_embedding_inverse(m)
    } else {
        complexify(m)
    }
}

fn infeasible_rows_solution(p: &SdpProblem, y: Vec<f64>, dropped: Vec<usize>) -> SdpSolution {
    let x = p.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    let s = p.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    SdpSolution {
        x,
        y: vec![0.0; p.constraints.len()],
        s,
        primal_obj: f64::NAN,
        dual_obj: f64::NAN,
        gap: f64::INFINITY,
        primal_infeas: f64::INFINITY,
        dual_infeas: f64::INFINITY,
        status: Status::Infeasible,
        iterations: 0,
        history: Vec::new(),
        certificate: Some(Certificate::Primal { y, min_eig: 0.0 }),
        dropped,
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    int: &Internal,
    it: Iterate,
    meas: Measures,
    status: Status,
    iterations: usize,
    history: Vec<IterationLog>,
    certificate: Option<Certificate>,
    dropped: Vec<usize>,
    m_orig: usize,
    sign: f64,
) -> SdpSolution {
    let nb = int.dims.len();
    let x: Vec<DMatrix<Complex64>> = (0..nb).map(|b| user_block(int, b, &it.x[b])).collect();
    let s: Vec<DMatrix<Complex64>> = (0..nb)
        .map(|b| {
            let blk = user_block(int, b, &it.s[b]);
            blk / Complex64::new(int.scale[b], 0.0)
        })
        .collect();
    let mut y = vec![0.0; m_orig];
    for (k, &i) in int.kept.iter().enumerate() {
        y[i] = it.y[k] * sign;
    }
    let primal_obj = sign * meas.pobj;
    let dual_obj = sign * meas.dobj;
    SdpSolution {
        x,
        y,
        s,
        primal_obj,
        dual_obj,
        gap: (primal_obj - dual_obj).abs(),
        primal_infeas: meas.pinf,
        dual_infeas: meas.dinf,
        status,
        iterations,
        history,
        certificate,
        dropped,
    }
}
