//! Quantitative entanglement witnesses from the multipliers of the two-copy
//! linear entropy program, with independent certificate checks.

use std::hash::{DefaultHasher, Hash, Hasher};

use nalgebra::{DMatrix, DVector};
use serde_json::json;

use crate::data::DataConstraint;
use crate::error::{Result, RoofError};
use crate::roof::program::{ConstraintMode, RoofProgram, RoofResult, RowTarget};
use crate::roof::sym_transfer;
use crate::symmetric::SymBasis;
use crate::tensor::{c, eig_hermitian_mat, gell_mann_basis, herm_inner, hermitian_part, kron_mat, CMat, DensityOp, HermitianOp, MatrixJson};

/// Residual tolerance of [`verify_witness`].
pub const WITNESS_TOL: f64 = 1e-7;
/// PSD tolerance of [`verify_witness`].
pub const WITNESS_PSD_TOL: f64 = 1e-8;
/// Step toward the maximally mixed state used when data sit on the boundary.
pub const DATA_NUDGE: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct WitnessOp {
    /// Witness on the single-copy space.
    pub w: HermitianOp,
    /// Remainder on the symmetric subspace, symmetric coordinates.
    pub p: CMat,
    /// Operator whose copy-1 partial transpose completes the decomposition.
    pub q: CMat,
    /// `tr(W rho)` on the state or data the program was built from.
    pub bound: f64,
    /// Program value the witness was extracted from.
    pub program_value: f64,
    /// Shift applied to make the remainder exactly PSD.
    pub shift: f64,
    /// Isometry onto the subspace where the certificate holds, when it is not the whole space.
    pub frame: Option<CMat>,
    /// Coefficients `(c_0, c_1, ...)` of `W = c_0 1 + sum c_i O_i` for restricted witnesses.
    pub coefficients: Option<Vec<f64>>,
    pub state_hash: Option<String>,
}

impl WitnessOp {
    pub fn is_restricted_to_frame(&self) -> bool {
        self.frame.is_some()
    }

    pub fn expectation(&self, rho: &CMat) -> f64 {
        herm_inner(self.w.matrix(), rho)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dims = self.w.space().party_dims().to_vec();
        let local = self.frame.as_ref().map_or(self.w.dim(), |f| f.ncols());
        json!({
            "W": MatrixJson::from_matrix(&dims, self.w.matrix()),
            "P": MatrixJson::from_matrix(&[self.p.nrows()], &self.p),
            "Q": MatrixJson::from_matrix(&[local, local], &self.q),
            "bound": self.bound,
            "program_value": self.program_value,
            "shift": self.shift,
            "frame_restricted": self.frame.is_some(),
            "coefficients": self.coefficients,
            "state_hash": self.state_hash,
        })
    }
}

/// Hex digest of a state's entries, for matching exported witnesses to inputs.
pub fn state_hash(rho: &DensityOp) -> String {
    let mut h = DefaultHasher::new();
    rho.space().party_dims().hash(&mut h);
    for z in rho.matrix().iter() {
        z.re.to_bits().hash(&mut h);
        z.im.to_bits().hash(&mut h);
    }
    format!("{:016x}", h.finish())
}

/// `X^{T_1}` for `X` on two copies of a `d`-dimensional space (copy-major).
pub fn transpose_copy1(x: &CMat, d: usize) -> CMat {
    let mut out = CMat::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for a2 in 0..d {
                for b2 in 0..d {
                    out[(a2 * d + b, a * d + b2)] = x[(a * d + b, a2 * d + b2)];
                }
            }
        }
    }
    out
}

fn psd_part(x: &CMat) -> CMat {
    let (vals, vecs) = eig_hermitian_mat(&hermitian_part(x));
    let d = CMat::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|&l| c(l.max(0.0), 0.0))));
    &vecs * d * vecs.adjoint()
}

fn min_eig(x: &CMat) -> f64 {
    if x.nrows() == 0 {
        return 0.0;
    }
    eig_hermitian_mat(&hermitian_part(x)).0[0]
}

/// Frame-coordinate pieces of the two-copy program: isometry onto Sym, objective,
/// and multipliers.
struct Pieces {
    r: usize,
    v: CMat,
    l: CMat,
    p: CMat,
    q: CMat,
}

fn pieces(result: &RoofResult) -> Result<Pieces> {
    if result.vars.len() != 1 || result.copies() != 2 {
        return Err(RoofError::InvalidInput("witness extraction needs a single two-copy variable".into()));
    }
    let var = &result.vars[0];
    if var.cuts.len() != 1 || var.cuts[0].t != 1 {
        return Err(RoofError::InvalidInput("witness extraction needs exactly the copy partial transpose".into()));
    }
    if !result.is_optimal() {
        return Err(RoofError::NotOptimal(format!("status {}", result.status)));
    }
    let r = result.frame.dim();
    let basis = SymBasis::new(r, 2)?;
    Ok(Pieces {
        r,
        v: basis.isometry()?,
        l: result.objectives[0].clone(),
        p: result.duals.p[0].clone(),
        q: result.duals.q[0][0].clone(),
    })
}

/// `V^dagger (Y (x) 1) V`.
fn lift_single(v: &CMat, y: &CMat) -> CMat {
    let r = y.nrows();
    v.adjoint() * kron_mat(y, &CMat::identity(r, r)) * v
}

/// Adjoint of `rho -> Pi (rho (x) 1) Pi` restricted to Sym, via the Gram-inverse
/// dual basis of `O_i = Pi (S_i (x) 1) Pi`.
fn adjoint_map(v: &CMat, z: &CMat, r: usize) -> Result<CMat> {
    let s = gell_mann_basis(r);
    let sym_dim = v.ncols() as f64;
    let o: Vec<CMat> = s.iter().map(|si| lift_single(v, si)).collect();
    let n = o.len();
    let mut w = CMat::identity(r, r) * c(z.trace().re / sym_dim, 0.0);
    if n == 0 {
        return Ok(w);
    }
    let g = DMatrix::<f64>::from_fn(n, n, |i, j| herm_inner(&o[i], &o[j]));
    let rhs = DVector::<f64>::from_fn(n, |i, _| herm_inner(&o[i], z));
    let chol = g
        .cholesky()
        .ok_or_else(|| RoofError::Internal("degenerate Gram matrix of the marginal operators".into()))?;
    let coef = chol.solve(&rhs);
    for (i, si) in s.iter().enumerate() {
        w += si * c(coef[i], 0.0);
    }
    Ok(w)
}

/// Exact certificate: PSD-clipped `Q`, remainder `P` recomputed from the identity,
/// `W` shifted down until `P` is PSD.
fn repair(pc: &Pieces, w: CMat) -> (CMat, CMat, CMat, f64) {
    let q = psd_part(&pc.q);
    let qt = pc.v.adjoint() * transpose_copy1(&q, pc.r) * &pc.v;
    let mut p = hermitian_part(&(&pc.l - lift_single(&pc.v, &w) - qt));
    let delta = (-min_eig(&p)).max(0.0);
    let w = w - CMat::identity(pc.r, pc.r) * c(delta, 0.0);
    for i in 0..p.nrows() {
        p[(i, i)] += c(delta, 0.0);
    }
    (w, p, q, delta)
}

/// Lifts a frame certificate to the full single-copy space.
fn lift_certificate(result: &RoofResult, w: &CMat, p: &CMat, q: &CMat) -> Result<(CMat, CMat, CMat)> {
    let u = &result.frame.basis;
    let wf = u * w * u.adjoint();
    let inner = SymBasis::new(result.frame.dim(), 2)?;
    let outer = SymBasis::new(result.frame.full_dim(), 2)?;
    let t = sym_transfer(&outer, &inner, u);
    let pf = &t * p * t.adjoint();
    let uu = kron_mat(&u.conjugate(), u);
    let qf = &uu * q * uu.adjoint();
    Ok((wf, pf, qf))
}

fn finish(result: &RoofResult, w: CMat, p: CMat, q: CMat) -> Result<(HermitianOp, CMat, CMat, Option<CMat>)> {
    let (wf, pf, qf) = lift_certificate(result, &w, &p, &q)?;
    let wop = HermitianOp::from_hermitian_part(result.space.clone(), &wf)?;
    if result.frame.dim() == result.frame.full_dim() {
        Ok((wop, hermitian_part(&pf), hermitian_part(&qf), None))
    } else {
        Ok((wop, p, q, Some(result.frame.basis.clone())))
    }
}

/// Witness `W` with `tr(W rho) = E_lin^(ppt)(rho)` from a solved two-copy linear entropy program.
pub fn extract_witness(result: &RoofResult) -> Result<WitnessOp> {
    let rho_r = match &result.target {
        RowTarget::Marginal(m) => m.clone(),
        RowTarget::Data(_) => {
            return Err(RoofError::InvalidInput("use the restricted extraction for data-constrained programs".into()))
        }
    };
    let pc = pieces(result)?;
    let z = &pc.l - &pc.p - pc.v.adjoint() * transpose_copy1(&pc.q, pc.r) * &pc.v;
    let w0 = adjoint_map(&pc.v, &z, pc.r)?;
    let (w, p, q, shift) = repair(&pc, w0);
    let bound = herm_inner(&w, &rho_r);
    let (wop, p, q, frame) = finish(result, w, p, q)?;
    Ok(WitnessOp {
        w: wop,
        p,
        q,
        bound,
        program_value: result.value,
        shift,
        frame,
        coefficients: None,
        state_hash: None,
    })
}

/// As [`extract_witness`], also recording the state hash.
pub fn extract_witness_for(result: &RoofResult, rho: &DensityOp) -> Result<WitnessOp> {
    let mut w = extract_witness(result)?;
    w.bound = herm_inner(w.w.matrix(), rho.matrix());
    w.state_hash = Some(state_hash(rho));
    Ok(w)
}

/// Witness `W = c_0 1 + sum_i c_i O_i` from a program with data constraints on `observables`.
///
/// Data on the boundary of the physical range are first moved a step `DATA_NUDGE`
/// toward the maximally mixed state, so the certificate holds on the whole space;
/// the reported bound is `c_0 + sum c_i v_i` on the original data.
pub fn extract_witness_restricted(program: &RoofProgram, result: &RoofResult, observables: &[HermitianOp]) -> Result<WitnessOp> {
    let data = match &program.constraints {
        ConstraintMode::Data(d) => d.clone(),
        ConstraintMode::FullMarginal(_) => {
            return Err(RoofError::InvalidInput("restricted witnesses need a data-constrained program".into()))
        }
    };
    if data.len() != observables.len()
        || data.iter().zip(observables).any(|(d, o)| crate::tensor::max_abs(&(d.observable.matrix() - o.matrix())) > 1e-12)
    {
        return Err(RoofError::InvalidInput("observables do not match the program data".into()));
    }
    let full = result.frame.dim() == result.frame.full_dim();
    let nudged;
    let solved = if full {
        result
    } else {
        let dim = program.space.total_dim() as f64;
        let moved: Vec<DataConstraint> = data
            .iter()
            .map(|d| DataConstraint::raw(d.observable.clone(), (1.0 - DATA_NUDGE) * d.value + DATA_NUDGE * d.observable.trace() / dim))
            .collect();
        let mut p2 = program.clone();
        p2.constraints = ConstraintMode::Data(moved);
        nudged = p2.solve()?;
        if nudged.frame.dim() != nudged.frame.full_dim() {
            return Err(RoofError::Internal("nudged data still sit on the boundary".into()));
        }
        &nudged
    };
    let pc = pieces(solved)?;
    let u = &solved.frame.basis;
    let mut ops: Vec<CMat> = vec![CMat::identity(pc.r, pc.r)];
    ops.extend(observables.iter().map(|o| u.adjoint() * o.matrix() * u));
    let images: Vec<CMat> = ops.iter().map(|o| lift_single(&pc.v, o)).collect();
    let z = &pc.l - &pc.p - pc.v.adjoint() * transpose_copy1(&pc.q, pc.r) * &pc.v;
    let n = images.len();
    let g = DMatrix::<f64>::from_fn(n, n, |i, j| herm_inner(&images[i], &images[j]));
    let rhs = DVector::<f64>::from_fn(n, |i, _| herm_inner(&images[i], &z));
    let svd = g.svd(true, true);
    let smax = svd.singular_values.max();
    let mut coef = svd
        .solve(&rhs, 1e-12 * smax.max(1e-300))
        .map_err(|e| RoofError::Internal(format!("least squares failed: {e}")))?;
    let mut w0 = CMat::zeros(pc.r, pc.r);
    for (k, o) in ops.iter().enumerate() {
        w0 += o * c(coef[k], 0.0);
    }
    let (w, p, q, shift) = repair(&pc, w0);
    coef[0] -= shift;
    let mut bound = coef[0];
    for (k, d) in data.iter().enumerate() {
        bound += coef[k + 1] * d.value;
    }
    let (wop, p, q, frame) = finish(solved, w, p, q)?;
    Ok(WitnessOp {
        w: wop,
        p,
        q,
        bound,
        program_value: result.value,
        shift,
        frame,
        coefficients: Some(coef.iter().copied().collect()),
        state_hash: None,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct WitnessReport {
    /// `max |Pi M Pi - Pi (W (x) 1) Pi - V P V^dagger - Pi Q^{T_1} Pi|`.
    pub decomposition_residual: f64,
    pub min_eig_p: f64,
    pub min_eig_q: f64,
    /// Smallest eigenvalue of `M - (W (x) 1) - Q^{T_1}` compressed to Sym.
    pub min_eig_remainder: f64,
    pub passed: bool,
}

/// Checks the certificate `M - Pi (W (x) 1) Pi = P + Pi Q^{T_1} Pi`, `P, Q >= 0` with fresh
/// eigendecompositions. `m` is the two-copy objective on the full space.
pub fn verify_witness(w: &WitnessOp, m: &HermitianOp) -> Result<WitnessReport> {
    let d = w.w.dim();
    if m.dim() != d * d {
        return Err(RoofError::DimensionMismatch("objective is not a two-copy operator of the witness space".into()));
    }
    let (r, mm, ww) = match &w.frame {
        Some(u) => {
            let uu = kron_mat(u, u);
            (u.ncols(), uu.adjoint() * m.matrix() * &uu, u.adjoint() * w.w.matrix() * u)
        }
        None => (d, m.matrix().clone(), w.w.matrix().clone()),
    };
    let basis = SymBasis::new(r, 2)?;
    if w.p.nrows() != basis.sym_dim() || w.q.nrows() != r * r {
        return Err(RoofError::DimensionMismatch("certificate blocks have the wrong size".into()));
    }
    let v = basis.isometry()?;
    let proj = &v * v.adjoint();
    let remainder = &mm - kron_mat(&ww, &CMat::identity(r, r)) - transpose_copy1(&w.q, r);
    let lhs = &proj * &remainder * &proj;
    let decomposition_residual = crate::tensor::max_abs(&(lhs - &v * &w.p * v.adjoint()));
    let min_eig_p = min_eig(&w.p);
    let min_eig_q = min_eig(&w.q);
    let min_eig_remainder = min_eig(&(v.adjoint() * &remainder * &v));
    let passed = decomposition_residual <= WITNESS_TOL
        && min_eig_p >= -WITNESS_PSD_TOL
        && min_eig_q >= -WITNESS_PSD_TOL
        && min_eig_remainder >= -WITNESS_PSD_TOL;
    Ok(WitnessReport { decomposition_residual, min_eig_p, min_eig_q, min_eig_remainder, passed })
}
