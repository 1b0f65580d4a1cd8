//! Linear matrix inequality programs over real parameters.
//!
//! An [`AffineProgram`] optimizes `c . x + c0` over `x` in R^n subject to
//! linear equalities `E x = f` and `F_b(x) = F_b0 + sum_k x_k F_bk ⪰ 0` for
//! each block. Equalities are eliminated by a sparse reduced row echelon form,
//! and the remaining free parameters become the dual variables of a
//! standard-form [`SdpProblem`]; the primal matrices of that problem are the
//! multipliers of the matrix inequalities.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SdpError};
use crate::linalg::min_eigenvalue_herm;
use crate::problem::{Constraint, SdpProblem, Sense};
use crate::solver::{solve, Certificate, SdpSolution, SolverOptions, Status};
use crate::sparse::SparseHerm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmiBlock {
    pub dim: usize,
    pub constant: SparseHerm,
    pub terms: Vec<(usize, SparseHerm)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineProgram {
    pub nvars: usize,
    pub blocks: Vec<LmiBlock>,
    pub equalities: Vec<LinearRow>,
    pub objective: Vec<(usize, f64)>,
    pub objective_const: f64,
    pub sense: Sense,
}

/// Solution of an [`AffineProgram`].
#[derive(Debug, Clone)]
pub struct AffineSolution {
    /// Parameter vector; satisfies the equalities to rounding.
    pub x: Vec<f64>,
    /// Objective at `x`.
    pub value: f64,
    /// Bound from the multipliers: a lower bound for min programs and an upper
    /// bound for max programs whenever the multipliers are feasible.
    pub dual_bound: f64,
    pub gap: f64,
    pub status: Status,
    /// Multiplier matrices, one per block.
    pub multipliers: Vec<DMatrix<Complex64>>,
    /// Free parameters after elimination.
    pub free_params: usize,
    pub sdp: Option<SdpSolution>,
}

impl AffineProgram {
    pub fn new(nvars: usize, sense: Sense) -> Self {
        Self { nvars, blocks: Vec::new(), equalities: Vec::new(), objective: Vec::new(), objective_const: 0.0, sense }
    }

    pub fn add_block(&mut self, dim: usize) -> usize {
        self.blocks.push(LmiBlock { dim, constant: SparseHerm::zeros(dim), terms: Vec::new() });
        self.blocks.len() - 1
    }

    pub fn set_block_constant(&mut self, block: usize, m: SparseHerm) {
        self.blocks[block].constant = m;
    }

    pub fn add_block_term(&mut self, block: usize, var: usize, m: SparseHerm) {
        if m.nnz() > 0 {
            self.blocks[block].terms.push((var, m));
        }
    }

    pub fn add_equality(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.equalities.push(LinearRow { coeffs, rhs });
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, f64)>, constant: f64) {
        self.objective = coeffs;
        self.objective_const = constant;
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective_const + self.objective.iter().map(|&(k, c)| c * x[k]).sum::<f64>()
    }

    /// Dense value of every block at `x`.
    pub fn evaluate_blocks(&self, x: &[f64]) -> Vec<DMatrix<Complex64>> {
        self.blocks
            .iter()
            .map(|blk| {
                let mut m = blk.constant.to_dense();
                for (k, f) in &blk.terms {
                    if x[*k] != 0.0 {
                        m += f.to_dense() * Complex64::new(x[*k], 0.0);
                    }
                }
                m
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (b, blk) in self.blocks.iter().enumerate() {
            if blk.constant.dim != blk.dim {
                return Err(SdpError::DimensionMismatch(format!("constant of block {b}")));
            }
            for (k, f) in &blk.terms {
                if *k >= self.nvars || f.dim != blk.dim {
                    return Err(SdpError::DimensionMismatch(format!("term for variable {k} in block {b}")));
                }
            }
        }
        for row in &self.equalities {
            if row.coeffs.iter().any(|&(k, _)| k >= self.nvars) {
                return Err(SdpError::DimensionMismatch("equality refers to a missing variable".into()));
            }
        }
        if self.objective.iter().any(|&(k, _)| k >= self.nvars) {
            return Err(SdpError::DimensionMismatch("objective refers to a missing variable".into()));
        }
        Ok(())
    }

    pub fn compile(&self) -> Result<CompiledProgram> {
        self.validate()?;
        let elim = eliminate(&self.equalities, self.nvars)?;

        let mut obj = vec![0.0; self.nvars];
        for &(k, c) in &self.objective {
            obj[k] += c;
        }
        let shift = self.objective_const + (0..self.nvars).map(|k| obj[k] * elim.particular[k]).sum::<f64>();
        let reduced_obj: Vec<f64> =
            elim.basis.iter().map(|col| col.iter().map(|&(k, v)| obj[k] * v).sum()).collect();

        let mut problem = SdpProblem::new(self.blocks.iter().map(|b| b.dim).collect(), Sense::Min);
        let mut per_param: Vec<Vec<(usize, SparseHerm)>> = vec![Vec::new(); elim.basis.len()];
        for (b, blk) in self.blocks.iter().enumerate() {
            let mut by_var: HashMap<usize, Vec<&SparseHerm>> = HashMap::new();
            for (k, f) in &blk.terms {
                by_var.entry(*k).or_default().push(f);
            }
            let mut constant: Vec<(usize, usize, Complex64)> = blk.constant.entries.clone();
            for (k, fs) in &by_var {
                let xk = elim.particular[*k];
                if xk != 0.0 {
                    for f in fs {
                        constant.extend(f.entries.iter().map(|&(r, c, v)| (r, c, v * xk)));
                    }
                }
            }
            problem.objective[b] = SparseHerm::from_triplets(blk.dim, constant);
            for (j, col) in elim.basis.iter().enumerate() {
                let mut trip: Vec<(usize, usize, Complex64)> = Vec::new();
                for &(k, v) in col {
                    if let Some(fs) = by_var.get(&k) {
                        for f in fs {
                            // Constraint operators are A_j = -F_j.
                            trip.extend(f.entries.iter().map(|&(r, c, z)| (r, c, -z * v)));
                        }
                    }
                }
                let a = SparseHerm::from_triplets(blk.dim, trip);
                if a.nnz() > 0 {
                    per_param[j].push((b, a));
                }
            }
        }
        let sign = match self.sense {
            Sense::Min => -1.0,
            Sense::Max => 1.0,
        };
        for (j, terms) in per_param.into_iter().enumerate() {
            problem.constraints.push(Constraint::new(terms, sign * reduced_obj[j]));
        }
        Ok(CompiledProgram { problem, particular: elim.particular, basis: elim.basis, shift, sense: self.sense })
    }

    pub fn solve(&self, opts: &SolverOptions) -> Result<AffineSolution> {
        let compiled = self.compile()?;
        compiled.solve(self, opts)
    }
}

/// Result of eliminating the equality constraints: `x = particular + sum_j u_j basis_j`.
#[derive(Debug, Clone)]
pub struct CompiledProgram {
    pub problem: SdpProblem,
    pub particular: Vec<f64>,
    pub basis: Vec<Vec<(usize, f64)>>,
    pub shift: f64,
    pub sense: Sense,
}

impl CompiledProgram {
    pub fn free_params(&self) -> usize {
        self.basis.len()
    }

    pub fn lift(&self, u: &[f64]) -> Vec<f64> {
        let mut x = self.particular.clone();
        for (j, col) in self.basis.iter().enumerate() {
            if u[j] != 0.0 {
                for &(k, v) in col {
                    x[k] += u[j] * v;
                }
            }
        }
        x
    }

    pub fn solve(&self, prog: &AffineProgram, opts: &SolverOptions) -> Result<AffineSolution> {
        let nblocks = self.problem.blocks.len();
        if self.basis.is_empty() {
            // Only one point satisfies the equalities; check it directly.
            let x = self.particular.clone();
            let feasible = prog.evaluate_blocks(&x).iter().all(|m| min_eigenvalue_herm(m) >= -opts.feas_tol);
            let value = prog.objective_at(&x);
            return Ok(AffineSolution {
                x,
                value,
                dual_bound: value,
                gap: 0.0,
                status: if feasible { Status::Optimal } else { Status::Infeasible },
                multipliers: self.problem.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect(),
                free_params: 0,
                sdp: None,
            });
        }
        let sol = solve(&self.problem, opts)?;
        let x = self.lift(&sol.y);
        let value = prog.objective_at(&x);
        let dual_bound = match self.sense {
            Sense::Min => self.shift - sol.primal_obj,
            Sense::Max => self.shift + sol.primal_obj,
        };
        // A dual ray of the standard form means the matrix inequalities admit no point.
        let status = match (&sol.status, &sol.certificate) {
            (Status::Infeasible, Some(Certificate::Dual { .. })) => Status::Infeasible,
            (Status::Infeasible, _) => Status::MaxIter,
            (s, _) => *s,
        };
        debug_assert_eq!(sol.x.len(), nblocks);
        Ok(AffineSolution {
            x,
            value,
            dual_bound,
            gap: sol.gap,
            status,
            multipliers: sol.x.clone(),
            free_params: self.basis.len(),
            sdp: Some(sol),
        })
    }
}

struct Elimination {
    particular: Vec<f64>,
    basis: Vec<Vec<(usize, f64)>>,
}

/// Sparse reduced row echelon form with threshold pivoting that prefers
/// columns appearing in few rows, which keeps the null-space basis sparse.
fn eliminate(rows: &[LinearRow], nvars: usize) -> Result<Elimination> {
    const DROP: f64 = 1e-14;
    const RANK_TOL: f64 = 1e-10;
    let mut mat: Vec<BTreeMap<usize, f64>> = Vec::with_capacity(rows.len());
    let mut rhs: Vec<f64> = Vec::with_capacity(rows.len());
    let mut norms: Vec<f64> = Vec::with_capacity(rows.len());
    for row in rows {
        let mut m = BTreeMap::new();
        for &(k, v) in &row.coeffs {
            *m.entry(k).or_insert(0.0) += v;
        }
        m.retain(|_, v| *v != 0.0);
        norms.push(m.values().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300));
        mat.push(m);
        rhs.push(row.rhs);
    }
    let nrows = mat.len();
    let mut col_count = vec![0usize; nvars];
    for m in &mat {
        for &k in m.keys() {
            col_count[k] += 1;
        }
    }
    let mut done = vec![false; nrows];
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; nrows];
    // Column -> rows containing it, maintained as sets for elimination.
    let mut col_rows: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, m) in mat.iter().enumerate() {
        for &k in m.keys() {
            col_rows.entry(k).or_default().push(i);
        }
    }

    for _ in 0..nrows {
        // Row with the fewest entries among the unprocessed ones.
        let Some(i) = (0..nrows).filter(|&i| !done[i]).min_by_key(|&i| mat[i].len()) else { break };
        done[i] = true;
        let rowmax = mat[i].values().fold(0.0f64, |a, v| a.max(v.abs()));
        if rowmax <= RANK_TOL * norms[i] {
            if rhs[i].abs() > 1e-9 * (1.0 + rows[i].rhs.abs()) {
                return Err(SdpError::InconsistentEqualities { row: i, residual: rhs[i].abs() });
            }
            for &k in mat[i].keys() {
                col_count[k] -= 1;
            }
            mat[i].clear();
            continue;
        }
        let (&piv, &pv) = mat[i]
            .iter()
            .filter(|(_, v)| v.abs() >= 0.1 * rowmax)
            .min_by(|a, b| col_count[*a.0].cmp(&col_count[*b.0]).then(b.1.abs().total_cmp(&a.1.abs())))
            .expect("row has a maximal entry");
        // Normalize.
        for v in mat[i].values_mut() {
            *v /= pv;
        }
        rhs[i] /= pv;
        pivot_of_row[i] = Some(piv);
        let pivot_row: Vec<(usize, f64)> = mat[i].iter().map(|(&k, &v)| (k, v)).collect();
        let pivot_rhs = rhs[i];
        let targets: Vec<usize> = col_rows.get(&piv).cloned().unwrap_or_default();
        for t in targets {
            if t == i {
                continue;
            }
            let Some(&f) = mat[t].get(&piv) else { continue };
            for &(k, v) in &pivot_row {
                let e = mat[t].entry(k).or_insert_with(|| {
                    col_count[k] += 1;
                    col_rows.entry(k).or_default().push(t);
                    0.0
                });
                *e -= f * v;
            }
            rhs[t] -= f * pivot_rhs;
            let scale = norms[t];
            let mut removed = Vec::new();
            mat[t].retain(|&k, v| {
                if v.abs() <= DROP * scale || k == piv {
                    removed.push(k);
                    false
                } else {
                    true
                }
            });
            for k in removed {
                col_count[k] -= 1;
                if let Some(list) = col_rows.get_mut(&k) {
                    list.retain(|&r| r != t);
                }
            }
        }
    }

    let mut is_pivot = vec![false; nvars];
    let mut particular = vec![0.0; nvars];
    for i in 0..nrows {
        if let Some(p) = pivot_of_row[i] {
            is_pivot[p] = true;
            particular[p] = rhs[i];
        }
    }
    let mut index_of_free = vec![usize::MAX; nvars];
    let mut basis: Vec<Vec<(usize, f64)>> = Vec::new();
    for k in 0..nvars {
        if !is_pivot[k] {
            index_of_free[k] = basis.len();
            basis.push(vec![(k, 1.0)]);
        }
    }
    for i in 0..nrows {
        if let Some(p) = pivot_of_row[i] {
            for (&k, &v) in &mat[i] {
                if k != p {
                    debug_assert!(!is_pivot[k], "reduced rows contain no other pivots");
                    basis[index_of_free[k]].push((p, -v));
                }
            }
        }
    }
    Ok(Elimination { particular, basis })
}
