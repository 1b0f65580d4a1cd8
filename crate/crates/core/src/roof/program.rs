//! Multi-copy roof programs: assembly into affine matrix-inequality form,
//! solution, and result handling.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use convexroof_sdp::{verify_kkt, AffineProgram, KktReport, SdpError, SdpProblem, Sense, SolverOptions, Status};
use log::debug;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::data::DataConstraint;
use crate::error::{Result, RoofError};
use crate::roof::frame::{clean_real, eigenspace_frame, local_phase_charges, range_frame, Frame, RANGE_THRESHOLD};
use crate::roof::objective::MultiCopyOp;
use crate::roof::sym_var::{hermitian_image, SparseMap, SymVariable};
use crate::symmetric::SymBasis;
use crate::tensor::{c, eig_hermitian_mat, hermitian_basis, herm_inner, CMat, DensityOp, ProductSpace};

#[derive(Debug, Clone)]
pub enum ConstraintMode {
    FullMarginal(DensityOp),
    Data(Vec<DataConstraint>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relaxation {
    /// Copy subsets whose partial transpose must be PSD.
    PptCuts(Vec<Vec<usize>>),
    /// `n:1` PPT symmetric extension: `n + 1` copies, PPT across every copy bipartition.
    Extension(usize),
}

impl Relaxation {
    /// Every copy bipartition up to complement and relabeling.
    pub fn all_cuts(copies: usize) -> Relaxation {
        Relaxation::PptCuts((1..=copies / 2).map(|t| (0..t).collect()).collect())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProgramOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Block-diagonalize by local phase charges and drop imaginary parts of real programs.
    pub symmetry_reduction: bool,
    /// Restrict to extreme eigenspaces when data sit on an eigenvalue bound.
    pub facial_reduction: bool,
    pub max_free_params: usize,
}

impl Default for ProgramOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iter: 200, symmetry_reduction: true, facial_reduction: true, max_free_params: 12_000 }
    }
}

impl ProgramOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions { max_iter: self.max_iter, ..SolverOptions::with_tol(self.tol) }
    }
}

#[derive(Debug, Clone)]
pub struct RoofProgram {
    pub name: String,
    pub space: ProductSpace,
    pub objective: MultiCopyOp,
    pub constraints: ConstraintMode,
    pub relaxation: Relaxation,
    pub sense: Sense,
    /// Single-copy operators the reduction torus must leave invariant.
    pub invariant_ops: Vec<CMat>,
    /// Single-copy unitaries `U` with `U^{(x) N} omega U^{dagger (x) N} = omega` imposed.
    pub copy_invariance: Vec<CMat>,
    pub options: ProgramOptions,
}

impl RoofProgram {
    pub fn new(name: &str, space: ProductSpace, objective: MultiCopyOp, constraints: ConstraintMode, sense: Sense) -> Self {
        let relaxation = Relaxation::all_cuts(objective.copies);
        Self {
            name: name.to_string(),
            space,
            objective,
            constraints,
            relaxation,
            sense,
            invariant_ops: Vec::new(),
            copy_invariance: Vec::new(),
            options: ProgramOptions::default(),
        }
    }

    pub fn with_relaxation(mut self, relaxation: Relaxation) -> Self {
        self.relaxation = relaxation;
        self
    }

    pub fn with_options(mut self, options: ProgramOptions) -> Self {
        self.options = options;
        self
    }

    pub fn copies(&self) -> usize {
        match self.relaxation {
            Relaxation::Extension(n) => n + 1,
            Relaxation::PptCuts(_) => self.objective.copies,
        }
    }

    /// Distinct cut sizes `t <= N/2`; a cut and its complement have the same spectrum.
    pub fn cut_sizes(&self) -> Vec<usize> {
        let n = self.copies();
        let mut ts: Vec<usize> = match &self.relaxation {
            Relaxation::Extension(_) => (1..=n / 2).collect(),
            Relaxation::PptCuts(cuts) => {
                cuts.iter().map(|s| s.len().min(n - s.len().min(n))).filter(|&t| t > 0).collect()
            }
        };
        ts.sort_unstable();
        ts.dedup();
        ts
    }

    fn validate(&self) -> Result<()> {
        if self.objective.local_dim != self.space.total_dim() {
            return Err(RoofError::DimensionMismatch("objective and state spaces differ".into()));
        }
        if self.copies() < self.objective.copies {
            return Err(RoofError::InvalidInput("extension level below objective copy count".into()));
        }
        if let Relaxation::PptCuts(cuts) = &self.relaxation {
            for s in cuts {
                if s.iter().any(|&k| k >= self.copies()) {
                    return Err(RoofError::InvalidInput("cut names a copy out of range".into()));
                }
            }
        }
        if let Relaxation::Extension(n) = self.relaxation {
            if n < 1 {
                return Err(RoofError::InvalidInput("extension level must be at least 1".into()));
            }
        }
        match &self.constraints {
            ConstraintMode::FullMarginal(rho) if rho.space().total_dim() != self.space.total_dim() => {
                Err(RoofError::DimensionMismatch("state does not live on the program space".into()))
            }
            ConstraintMode::Data(list) if list.iter().any(|d| d.observable.dim() != self.space.total_dim()) => {
                Err(RoofError::DimensionMismatch("observable does not live on the program space".into()))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn assemble(&self) -> Result<Assembly> {
        self.validate()?;
        let spec = VarSpec { objective: self.objective.padded(self.copies())?, cuts: self.cut_sizes() };
        Assembly::build(
            &self.space,
            &self.constraints,
            &self.invariant_ops,
            &self.copy_invariance,
            vec![spec],
            self.sense,
            &self.options,
            true,
        )
    }

    /// The standard-form problem this program compiles to.
    pub fn to_sdp(&self) -> Result<SdpProblem> {
        Ok(self.assemble()?.prog.compile().map_err(map_solver_error)?.problem)
    }

    pub fn solve(&self) -> Result<RoofResult> {
        let asm = self.assemble()?;
        asm.solve(&self.name, &self.options)
    }
}

/// Replaces the constraint mode by expectation-value data `tr(O_i omega_1) = v_i`.
pub fn with_data_constraints(mut program: RoofProgram, constraints: Vec<DataConstraint>) -> RoofProgram {
    program.constraints = ConstraintMode::Data(constraints);
    program
}

pub(crate) struct VarSpec {
    pub objective: MultiCopyOp,
    pub cuts: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) enum RowTarget {
    /// Sum of variable marginals equals this (frame coordinates).
    Marginal(CMat),
    /// `tr(O_r omega_1) = v` plus unit trace (frame coordinates).
    Data(Vec<(CMat, f64)>),
}

pub(crate) struct Assembly {
    pub space: ProductSpace,
    pub frame: Frame,
    pub target: RowTarget,
    pub prog: AffineProgram,
    pub vars: Vec<SymVariable>,
    pub objectives: Vec<CMat>,
    pub face_reduced: bool,
    pub sense: Sense,
}

pub(crate) fn map_solver_error(e: SdpError) -> RoofError {
    match e {
        SdpError::InconsistentEqualities { .. } => RoofError::Infeasible,
        other => RoofError::Solver(other),
    }
}

/// Reconstructs the state when data determine it completely.
fn reconstruct(space: &ProductSpace, data: &[DataConstraint]) -> Option<CMat> {
    let d = space.total_dim();
    let basis = hermitian_basis(d);
    let rows = data.len() + 1;
    if rows < d * d {
        return None;
    }
    let mut a = DMatrix::<f64>::zeros(rows, d * d);
    let mut b = nalgebra::DVector::<f64>::zeros(rows);
    for (i, dc) in data.iter().enumerate() {
        for (m, g) in basis.iter().enumerate() {
            a[(i, m)] = herm_inner(dc.observable.matrix(), g);
        }
        b[i] = dc.value;
    }
    for (m, g) in basis.iter().enumerate() {
        a[(data.len(), m)] = g.trace().re;
    }
    b[data.len()] = 1.0;
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.iter().filter(|&&s| s > 1e-9 * smax).count() < d * d {
        return None;
    }
    let coef = svd.solve(&b, 1e-12 * smax).ok()?;
    if (&a * &coef - &b).amax() > 1e-9 {
        return None;
    }
    let mut rho = CMat::zeros(d, d);
    for (m, g) in basis.iter().enumerate() {
        rho += g * c(coef[m], 0.0);
    }
    let lmin = eig_hermitian_mat(&rho).0[0];
    (lmin >= -1e-9).then_some(rho)
}

/// Matrix `<t| U^{(x) N} |s>` between symmetric bases of the output and input spaces.
pub fn sym_transfer(out: &SymBasis, inp: &SymBasis, u: &CMat) -> CMat {
    let n = out.copies();
    let mut m = CMat::zeros(out.sym_dim(), inp.sym_dim());
    let arr_in: Vec<Vec<Vec<usize>>> = (0..inp.sym_dim()).map(|s| inp.arrangements(s)).collect();
    for t in 0..out.sym_dim() {
        let at = out.arrangements(t);
        for s in 0..inp.sym_dim() {
            let mut acc = c(0.0, 0.0);
            for b in &at {
                for a in &arr_in[s] {
                    let mut prod = c(1.0, 0.0);
                    for k in 0..n {
                        prod *= u[(b[k], a[k])];
                        if prod == c(0.0, 0.0) {
                            break;
                        }
                    }
                    acc += prod;
                }
            }
            m[(t, s)] = acc * (out.coefficient(t) * inp.coefficient(s));
        }
    }
    m
}

impl Assembly {
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        space: &ProductSpace,
        mode: &ConstraintMode,
        invariant_ops: &[CMat],
        copy_invariance: &[CMat],
        specs: Vec<VarSpec>,
        sense: Sense,
        opts: &ProgramOptions,
        normalized: bool,
    ) -> Result<Assembly> {
        let mode = match mode {
            ConstraintMode::Data(list) => match reconstruct(space, list) {
                Some(rho) => {
                    debug!("data determine the state; switching to full marginal constraints");
                    ConstraintMode::FullMarginal(DensityOp::new(space.clone(), rho).map_err(|_| RoofError::Infeasible)?)
                }
                None => mode.clone(),
            },
            _ => mode.clone(),
        };
        if !normalized && !matches!(mode, ConstraintMode::FullMarginal(_)) {
            return Err(RoofError::InvalidInput("unnormalized variables need a full marginal".into()));
        }
        let mut support: Vec<&CMat> = invariant_ops.iter().collect();
        match &mode {
            ConstraintMode::FullMarginal(rho) => support.push(rho.matrix()),
            ConstraintMode::Data(list) => support.extend(list.iter().map(|d| d.observable.matrix())),
        }
        let charges = if opts.symmetry_reduction {
            local_phase_charges(space, &support)
        } else {
            vec![vec![]; space.total_dim()]
        };
        let base = Frame::identity(space, charges);
        let (frame, target, face_reduced) = match &mode {
            ConstraintMode::FullMarginal(rho) => {
                let (f, vals) = range_frame(&base, rho.matrix(), RANGE_THRESHOLD);
                let r = f.dim();
                let rho_r = CMat::from_fn(r, r, |i, j| if i == j { c(vals[i], 0.0) } else { c(0.0, 0.0) });
                (f, RowTarget::Marginal(rho_r), r < space.total_dim())
            }
            ConstraintMode::Data(list) => {
                let mut f = base;
                let mut reduced = false;
                if opts.facial_reduction {
                    loop {
                        let mut changed = false;
                        for dc in list {
                            let o = f.reduce(dc.observable.matrix());
                            let ev = eig_hermitian_mat(&o).0;
                            let (lo, hi) = (ev[0], ev[ev.len() - 1]);
                            let tol = 1e-9 * (1.0 + hi.abs().max(lo.abs()));
                            if hi - lo <= tol {
                                continue;
                            }
                            let target = if (dc.value - hi).abs() <= tol {
                                hi
                            } else if (dc.value - lo).abs() <= tol {
                                lo
                            } else {
                                continue;
                            };
                            f = eigenspace_frame(&f, &o, target, tol);
                            changed = true;
                            reduced = true;
                        }
                        if !changed || f.dim() == 0 {
                            break;
                        }
                    }
                }
                if f.dim() == 0 {
                    return Err(RoofError::Infeasible);
                }
                let rows = list.iter().map(|dc| (clean_real(&f.reduce(dc.observable.matrix()), 1e-14), dc.value)).collect();
                (f, RowTarget::Data(rows), reduced)
            }
        };
        let mut asm = Self::with_frame(space, frame, target, copy_invariance, &specs, sense, opts)?;
        if asm.is_none() {
            debug!("objective breaks the phase torus; rebuilding without charge sectors");
            asm = Self::with_frame_stripped(space, &specs, copy_invariance, &mode, sense, opts, normalized)?;
        }
        let mut asm = asm.ok_or_else(|| RoofError::Internal("objective not invariant".into()))?;
        asm.face_reduced = face_reduced;
        Ok(asm)
    }

    fn with_frame_stripped(
        space: &ProductSpace,
        specs: &[VarSpec],
        copy_invariance: &[CMat],
        mode: &ConstraintMode,
        sense: Sense,
        opts: &ProgramOptions,
        normalized: bool,
    ) -> Result<Option<Assembly>> {
        let no = ProgramOptions { symmetry_reduction: false, ..*opts };
        let specs2: Vec<VarSpec> =
            specs.iter().map(|s| VarSpec { objective: s.objective.clone(), cuts: s.cuts.clone() }).collect();
        Ok(Some(Self::build(space, mode, &[], copy_invariance, specs2, sense, &no, normalized)?))
    }

    fn with_frame(
        space: &ProductSpace,
        frame: Frame,
        target: RowTarget,
        copy_invariance: &[CMat],
        specs: &[VarSpec],
        sense: Sense,
        opts: &ProgramOptions,
    ) -> Result<Option<Assembly>> {
        let r = frame.dim();
        let target_real = match &target {
            RowTarget::Marginal(m) => m.iter().all(|z| z.im == 0.0),
            RowTarget::Data(rows) => rows.iter().all(|(o, _)| o.iter().all(|z| z.im == 0.0)),
        };
        let mut objectives = Vec::with_capacity(specs.len());
        let mut bases = Vec::with_capacity(specs.len());
        let mut all_real = target_real && opts.symmetry_reduction;
        let mut u_syms: Vec<Vec<CMat>> = Vec::new();
        for spec in specs {
            let basis = SymBasis::new(r, spec.objective.copies)?;
            let l = spec.objective.reduced(&frame).sym_matrix(&basis);
            let scale = l.iter().fold(1.0f64, |a, z| a.max(z.norm()));
            let l = clean_real(&l, 1e-13 * scale);
            all_real &= l.iter().all(|z| z.im == 0.0);
            let mut us = Vec::new();
            for u in copy_invariance {
                let ur = frame.reduce(&(u * &frame.basis * frame.basis.adjoint()));
                let unitarity = (&ur * ur.adjoint() - CMat::identity(r, r)).iter().fold(0.0f64, |a, z| a.max(z.norm()));
                if unitarity > 1e-8 {
                    return Err(RoofError::InvalidInput("state support is not invariant under the given symmetry".into()));
                }
                let us_ = clean_real(&sym_transfer(&basis, &basis, &ur), 1e-13);
                let drift = (&us_ * &l * us_.adjoint() - &l).iter().fold(0.0f64, |a, z| a.max(z.norm()));
                if drift > 1e-9 * scale {
                    return Err(RoofError::InvalidInput("objective is not invariant under the given symmetry".into()));
                }
                all_real &= us_.iter().all(|z| z.im == 0.0);
                us.push(us_);
            }
            u_syms.push(us);
            objectives.push(l);
            bases.push(basis);
        }
        let charges = frame.charges.clone();
        let mut vars = Vec::with_capacity(specs.len());
        let mut offset = 0;
        for basis in bases {
            let v = SymVariable::new(basis, &charges, all_real, offset);
            offset += v.nparams();
            vars.push(v);
        }
        for (v, l) in vars.iter().zip(&objectives) {
            let scale = l.iter().fold(1.0f64, |a, z| a.max(z.norm()));
            if v.leakage(l) > 1e-10 * scale {
                if frame.charge_width() == 0 && !all_real {
                    return Err(RoofError::Internal("objective leaks outside a single sector".into()));
                }
                return Ok(None);
            }
        }
        let nvars = offset;
        if nvars > 4 * opts.max_free_params {
            return Err(RoofError::DimensionCap(format!("{nvars} raw parameters")));
        }
        let mut prog = AffineProgram::new(nvars, sense);
        let mut obj: Vec<(usize, f64)> = Vec::new();
        for (k, (v, spec)) in vars.iter_mut().zip(specs).enumerate() {
            v.add_psd_blocks(&mut prog);
            for &t in &spec.cuts {
                v.add_pt_blocks(&mut prog, t);
            }
            obj.extend(v.linear_form(&objectives[k]));
        }
        prog.set_objective(obj, 0.0);
        let real = all_real;

        // Marginal or data rows.
        let images: Vec<Vec<SparseMap>> = vars.iter().map(|v| v.marginal_images()).collect();
        match &target {
            RowTarget::Marginal(rho_r) => {
                let mut rows: BTreeMap<(usize, usize, bool), Vec<(usize, f64)>> = BTreeMap::new();
                for (v, imgs) in vars.iter().zip(&images) {
                    for (k, img) in imgs.iter().enumerate() {
                        for (&(i, j), &val) in img {
                            if val.re != 0.0 {
                                rows.entry((i, j, false)).or_default().push((v.offset + k, val.re));
                            }
                            if i != j && val.im != 0.0 && !real {
                                rows.entry((i, j, true)).or_default().push((v.offset + k, val.im));
                            }
                        }
                    }
                }
                for i in 0..r {
                    for j in i..r {
                        let z = rho_r[(i, j)];
                        if z.re != 0.0 {
                            rows.entry((i, j, false)).or_default();
                        }
                        if i != j && z.im != 0.0 {
                            rows.entry((i, j, true)).or_default();
                        }
                    }
                }
                for ((i, j, im), coeffs) in rows {
                    let z = rho_r[(i, j)];
                    prog.add_equality(coeffs, if im { z.im } else { z.re });
                }
            }
            RowTarget::Data(list) => {
                let imgs = &images[0];
                let v = &vars[0];
                let tr_row: Vec<(usize, f64)> = imgs
                    .iter()
                    .enumerate()
                    .filter_map(|(k, img)| {
                        let t: f64 = (0..r).filter_map(|i| img.get(&(i, i))).map(|z| z.re).sum();
                        (t != 0.0).then_some((v.offset + k, t))
                    })
                    .collect();
                prog.add_equality(tr_row, 1.0);
                for (o, val) in list {
                    let row: Vec<(usize, f64)> = imgs
                        .iter()
                        .enumerate()
                        .filter_map(|(k, img)| {
                            let t = sparse_trace_product(o, img);
                            (t.abs() > 1e-15).then_some((v.offset + k, t))
                        })
                        .collect();
                    prog.add_equality(row, *val);
                }
            }
        }

        // Copy invariance rows.
        for (v, us) in vars.iter().zip(&u_syms) {
            for u in us {
                add_invariance_rows(&mut prog, v, u, real);
            }
        }

        Ok(Some(Assembly {
            space: space.clone(),
            frame,
            target,
            prog,
            vars,
            objectives,
            face_reduced: false,
            sense,
        }))
    }

    pub fn solve(self, name: &str, opts: &ProgramOptions) -> Result<RoofResult> {
        let start = Instant::now();
        let compiled = self.prog.compile().map_err(map_solver_error)?;
        if compiled.free_params() > opts.max_free_params {
            return Err(RoofError::DimensionCap(format!(
                "{} free parameters exceed the cap {}",
                compiled.free_params(),
                opts.max_free_params
            )));
        }
        debug!(
            "{name}: {} raw parameters, {} free, blocks {:?}",
            self.prog.nvars,
            compiled.free_params(),
            compiled.problem.blocks
        );
        let sol = compiled.solve(&self.prog, &opts.solver()).map_err(map_solver_error)?;
        if sol.status == Status::Infeasible {
            return Err(RoofError::Infeasible);
        }
        let kkt = sol.sdp.as_ref().map(|s| verify_kkt(&compiled.problem, s, opts.tol));
        let omegas: Vec<CMat> = self.vars.iter().map(|v| v.assemble(&sol.x)).collect();
        let duals = DualData {
            p: self.vars.iter().map(|v| v.assemble_blocks(&sol.multipliers)).collect(),
            q: self
                .vars
                .iter()
                .map(|v| (0..v.cuts.len()).map(|k| v.assemble_cut(k, &sol.multipliers)).collect())
                .collect(),
        };
        Ok(RoofResult {
            name: name.to_string(),
            value: sol.value,
            dual_bound: sol.dual_bound,
            gap: sol.gap,
            status: sol.status,
            iterations: sol.sdp.as_ref().map_or(0, |s| s.iterations),
            free_params: sol.free_params,
            blocks: compiled.problem.blocks.clone(),
            kkt,
            sense: self.sense,
            seconds: start.elapsed().as_secs_f64(),
            space: self.space,
            frame: self.frame,
            target: self.target,
            vars: self.vars,
            objectives: self.objectives,
            omegas,
            duals,
            face_reduced: self.face_reduced,
        })
    }
}

fn sparse_trace_product(o: &CMat, img: &SparseMap) -> f64 {
    let mut t = 0.0;
    for (&(i, j), &v) in img {
        if i == j {
            t += (o[(i, i)] * v).re;
        } else {
            t += 2.0 * (o[(j, i)] * v).re;
        }
    }
    t
}

/// Rounding noise in transferred symmetries; true coefficients are O(1).
const INVARIANCE_DROP: f64 = 1e-10;

fn add_invariance_rows(prog: &mut AffineProgram, v: &SymVariable, u: &CMat, real: bool) {
    let s = v.sym_dim();
    let mut rows: BTreeMap<(usize, usize, bool), Vec<(usize, f64)>> = BTreeMap::new();
    let ud = u.adjoint();
    for (k, pr) in v.params.iter().enumerate() {
        let mut unit: SparseMap = HashMap::new();
        unit.insert((pr.p, pr.q), c(1.0, 0.0));
        let img = hermitian_image(&unit, pr.kind);
        let mut b = CMat::zeros(s, s);
        for (&(i, j), &val) in &img {
            b[(i, j)] += val;
            if i != j {
                b[(j, i)] += val.conj();
            }
        }
        let d = u * &b * &ud - &b;
        for p in 0..s {
            for q in p..s {
                let z = d[(p, q)];
                if z.re.abs() > INVARIANCE_DROP {
                    rows.entry((p, q, false)).or_default().push((v.offset + k, z.re));
                }
                if p != q && !real && z.im.abs() > INVARIANCE_DROP {
                    rows.entry((p, q, true)).or_default().push((v.offset + k, z.im));
                }
            }
        }
    }
    for (_, coeffs) in rows {
        prog.add_equality(coeffs, 0.0);
    }
}

#[derive(Debug, Clone)]
pub(crate) struct DualData {
    /// Multiplier of each variable's PSD constraint, symmetric frame coordinates.
    pub p: Vec<CMat>,
    /// Multiplier of each cut's PSD constraint, product coordinates of the cut.
    pub q: Vec<Vec<CMat>>,
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    pub name: String,
    /// Objective at the returned `omega`.
    pub value: f64,
    /// Bound implied by the multipliers.
    pub dual_bound: f64,
    pub gap: f64,
    pub status: Status,
    pub iterations: usize,
    pub free_params: usize,
    pub blocks: Vec<usize>,
    pub kkt: Option<KktReport>,
    pub sense: Sense,
    pub seconds: f64,
    pub space: ProductSpace,
    pub frame: Frame,
    pub(crate) target: RowTarget,
    pub(crate) vars: Vec<SymVariable>,
    pub(crate) objectives: Vec<CMat>,
    /// Optimal variables in symmetric frame coordinates.
    pub omegas: Vec<CMat>,
    pub(crate) duals: DualData,
    pub face_reduced: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultSummary {
    pub name: String,
    pub value: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub status: String,
    pub iterations: usize,
    pub free_params: usize,
    pub blocks: Vec<usize>,
    pub kkt_passed: Option<bool>,
    pub seconds: f64,
}

impl RoofResult {
    pub fn copies(&self) -> usize {
        self.vars[0].basis.copies()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn kkt_passed(&self) -> bool {
        self.kkt.is_none_or(|k| k.passed)
    }

    pub fn summary(&self) -> ResultSummary {
        ResultSummary {
            name: self.name.clone(),
            value: self.value,
            dual_bound: self.dual_bound,
            gap: self.gap,
            status: self.status.to_string(),
            iterations: self.iterations,
            free_params: self.free_params,
            blocks: self.blocks.clone(),
            kkt_passed: self.kkt.map(|k| k.passed),
            seconds: self.seconds,
        }
    }

    /// Variable `k` in symmetric coordinates of the full single-copy space.
    pub fn omega_sym_of(&self, k: usize) -> Result<CMat> {
        let inner = &self.vars[k].basis;
        let outer = SymBasis::new(self.frame.full_dim(), inner.copies())?;
        let t = sym_transfer(&outer, inner, &self.frame.basis);
        Ok(&t * &self.omegas[k] * t.adjoint())
    }

    pub fn omega_sym(&self) -> Result<CMat> {
        self.omega_sym_of(0)
    }

    /// Variable `k` as a dense operator on all copies.
    pub fn omega_full_of(&self, k: usize) -> Result<CMat> {
        let outer = SymBasis::new(self.frame.full_dim(), self.vars[k].basis.copies())?;
        if outer.full_dim() > crate::roof::objective::DENSE_CAP {
            return Err(RoofError::DimensionCap(format!("dense omega of dimension {}", outer.full_dim())));
        }
        outer.embed(&self.omega_sym_of(k)?)
    }

    pub fn omega_full(&self) -> Result<CMat> {
        self.omega_full_of(0)
    }

    pub fn omega_density(&self) -> Result<DensityOp> {
        let m = crate::tensor::hermitian_part(&self.omega_full()?);
        DensityOp::new(self.space.copies(self.copies()), m)
    }

    /// Single-copy marginal of variable `k`, full coordinates.
    pub fn marginal_of(&self, k: usize) -> CMat {
        let v = &self.vars[k];
        let r = self.frame.dim();
        let mut m = CMat::zeros(r, r);
        let x = &self.omegas[k];
        for p in 0..v.sym_dim() {
            for q in 0..v.sym_dim() {
                if x[(p, q)] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let cpq = v.basis.coefficient(p) * v.basis.coefficient(q);
                let arr_q = v.basis.arrangements(q);
                for a in v.basis.arrangements(p) {
                    for b in &arr_q {
                        if a[1..] == b[1..] {
                            m[(a[0], b[0])] += x[(p, q)] * cpq;
                        }
                    }
                }
            }
        }
        self.frame.lift(&m)
    }

    pub fn marginal(&self) -> CMat {
        self.marginal_of(0)
    }

    /// `tr(L omega)` recomputed from the stored variables.
    pub fn objective_at_omega(&self) -> f64 {
        self.objectives.iter().zip(&self.omegas).map(|(l, w)| herm_inner(l, w)).sum()
    }

    pub fn reduced_dim(&self) -> usize {
        self.frame.dim()
    }
}
