//! Concrete roof programs built on [`RoofProgram`].

use convexroof_sdp::Sense;
use log::warn;

use crate::data::DataConstraint;
use crate::error::{Result, RoofError};
use crate::roof::objective::{antisymmetrizer_objective, flip_factor_pairs, linear_entropy_objective, MultiCopyOp};
use crate::roof::program::{
    Assembly, ConstraintMode, ProgramOptions, Relaxation, RoofProgram, RoofResult, VarSpec,
};
use crate::symmetric::symmetrize_copies;
use crate::tensor::{c, CMat, CVec, DensityOp, HermitianOp, ProductSpace};

fn check_cut(space: &ProductSpace, cut: &[usize]) -> Result<()> {
    let n = space.parties();
    if cut.is_empty() || cut.len() >= n {
        return Err(RoofError::InvalidInput("cut must name a proper nonempty party subset".into()));
    }
    let mut seen = vec![false; n];
    for &p in cut {
        if p >= n || seen[p] {
            return Err(RoofError::InvalidInput(format!("invalid party index {p} in cut")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Two-copy linear entropy program across `cut` with the given relaxation.
pub fn elin_program(rho: &DensityOp, cut: &[usize], relaxation: Relaxation, sense: Sense, opts: ProgramOptions) -> Result<RoofProgram> {
    check_cut(rho.space(), cut)?;
    let objective = linear_entropy_objective(rho.space(), cut);
    Ok(RoofProgram::new(
        "elin",
        rho.space().clone(),
        objective,
        ConstraintMode::FullMarginal(rho.clone()),
        sense,
    )
    .with_relaxation(relaxation)
    .with_options(opts))
}

/// Lower bound on the linear entropy of entanglement from symmetric PPT two-copy states.
pub fn elin_ppt(rho: &DensityOp, cut: &[usize], opts: ProgramOptions) -> Result<RoofResult> {
    elin_program(rho, cut, Relaxation::all_cuts(2), Sense::Min, opts)?.solve()
}

/// `n:1` PPT symmetric extension level of the linear entropy bound.
pub fn elin_extension(rho: &DensityOp, cut: &[usize], n: usize, opts: ProgramOptions) -> Result<RoofResult> {
    if n < 1 {
        return Err(RoofError::InvalidInput("extension level must be at least 1".into()));
    }
    elin_program(rho, cut, Relaxation::Extension(n), Sense::Min, opts)?.solve()
}

/// Upper bound on the linear entanglement of assistance.
pub fn assistance_upper(rho: &DensityOp, cut: &[usize], opts: ProgramOptions) -> Result<RoofResult> {
    let mut r = elin_program(rho, cut, Relaxation::all_cuts(2), Sense::Max, opts)?.solve()?;
    r.name = "assist".into();
    Ok(r)
}

/// Two-copy PPT linear entropy program constrained by expectation-value data only.
pub fn elin_data_program(
    space: &ProductSpace,
    cut: &[usize],
    data: Vec<DataConstraint>,
    opts: ProgramOptions,
) -> Result<RoofProgram> {
    check_cut(space, cut)?;
    for d in &data {
        if d.observable.space().total_dim() != space.total_dim() {
            return Err(RoofError::DimensionMismatch("observable does not match the state space".into()));
        }
    }
    Ok(RoofProgram::new("elin_data", space.clone(), linear_entropy_objective(space, cut), ConstraintMode::Data(data), Sense::Min)
        .with_options(opts))
}

/// Linear entropy bound from expectation-value data only.
pub fn elin_from_data(
    space: &ProductSpace,
    cut: &[usize],
    data: Vec<DataConstraint>,
    opts: ProgramOptions,
) -> Result<RoofResult> {
    elin_data_program(space, cut, data, opts)?.solve()
}

/// Polynomial pure-state functional `sum_m c_m <A_m>^{n_m}`.
#[derive(Debug, Clone)]
pub struct MeasureSpec {
    pub terms: Vec<(f64, HermitianOp, usize)>,
}

impl MeasureSpec {
    pub fn new(terms: Vec<(f64, HermitianOp, usize)>) -> Result<Self> {
        let spec = Self { terms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn copies(&self) -> usize {
        self.terms.iter().map(|t| t.2).max().unwrap_or(0).max(1)
    }

    pub fn space(&self) -> &ProductSpace {
        self.terms[0].1.space()
    }

    fn validate(&self) -> Result<()> {
        let first = self.terms.first().ok_or_else(|| RoofError::InvalidInput("empty measure".into()))?;
        if self.terms.iter().any(|t| t.1.space() != first.1.space()) {
            return Err(RoofError::DimensionMismatch("measure operators on different spaces".into()));
        }
        Ok(())
    }

    /// Direct evaluation on a pure state.
    pub fn evaluate(&self, psi: &[num_complex::Complex64]) -> f64 {
        let v = CVec::from_column_slice(psi);
        self.terms.iter().map(|(cm, a, n)| cm * (v.adjoint() * a.matrix() * &v)[(0, 0)].re.powi(*n as i32)).sum()
    }
}

/// Multi-copy operator `sum c_m A_m^{(x) n} (x) 1^{(x)(N-n)}`.
pub fn poly_objective(spec: &MeasureSpec) -> Result<MultiCopyOp> {
    spec.validate()?;
    let n = spec.copies();
    let mut op = MultiCopyOp::new(spec.space().total_dim(), n);
    for (cm, a, p) in &spec.terms {
        op.push_product(*cm, vec![a.matrix().clone(); *p]);
    }
    Ok(op)
}

/// Dense copy-symmetrized operator whose expectation on `psi^{(x) N}` is the functional.
pub fn build_poly_operator(spec: &MeasureSpec) -> Result<HermitianOp> {
    let op = poly_objective(spec)?;
    let dense = op.dense()?;
    let sym = symmetrize_copies(&dense, op.local_dim, op.copies);
    HermitianOp::from_hermitian_part(spec.space().copies(op.copies), &sym)
}

/// Convex (min) or concave (max) roof bound of a polynomial functional.
pub fn poly_roof(rho: &DensityOp, spec: &MeasureSpec, sense: Sense, opts: ProgramOptions) -> Result<RoofResult> {
    if spec.space().total_dim() != rho.space().total_dim() {
        return Err(RoofError::DimensionMismatch("measure and state spaces differ".into()));
    }
    RoofProgram::new("poly", rho.space().clone(), poly_objective(spec)?, ConstraintMode::FullMarginal(rho.clone()), sense)
        .with_options(opts)
        .solve()
}

/// Bound on the convex roof of `R_r = e_r(lambda)` of the reduced spectrum on `cut`.
pub fn schmidt_r(rho: &DensityOp, cut: &[usize], r: usize, opts: ProgramOptions) -> Result<RoofResult> {
    check_cut(rho.space(), cut)?;
    if r < 2 {
        return Err(RoofError::InvalidInput("r must be at least 2".into()));
    }
    let da: usize = cut.iter().map(|&p| rho.space().party_dims()[p]).product();
    if r > da {
        warn!("r = {r} exceeds the local dimension {da}; R_r vanishes identically");
    }
    let objective = antisymmetrizer_objective(rho.space(), cut, r);
    let mut res = RoofProgram::new("schmidt", rho.space().clone(), objective, ConstraintMode::FullMarginal(rho.clone()), Sense::Min)
        .with_options(opts)
        .solve()?;
    res.name = format!("schmidt_r{r}");
    Ok(res)
}

/// Two-copy operator `(2/N) sum_n (1 - F_n)` on `N` qubits.
pub fn meyer_wallach_objective(space: &ProductSpace) -> Result<MultiCopyOp> {
    if space.party_dims().iter().any(|&d| d != 2) {
        return Err(RoofError::InvalidInput("Meyer-Wallach roof needs qubits".into()));
    }
    let n = space.parties();
    let mut op = MultiCopyOp::new(space.total_dim(), 2);
    for q in 0..n {
        op.push_identity(2.0 / n as f64);
        for (a, b) in flip_factor_pairs(space, &[q]) {
            op.push_product(-2.0 / n as f64, vec![a, b]);
        }
    }
    Ok(op)
}

pub fn meyer_wallach_roof(rho: &DensityOp, opts: ProgramOptions) -> Result<RoofResult> {
    let objective = meyer_wallach_objective(rho.space())?;
    let mut res = RoofProgram::new("mw", rho.space().clone(), objective, ConstraintMode::FullMarginal(rho.clone()), Sense::Min)
        .with_options(opts)
        .solve()?;
    res.name = "mw".into();
    Ok(res)
}

fn eps(a: usize, b: usize) -> f64 {
    match (a, b) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

/// Vector `h` on four copies of three qubits with `<h|psi^{(x)4}>` the Cayley hyperdeterminant.
pub fn hyperdeterminant_vector() -> CVec {
    let mut h = CVec::zeros(4096);
    let idx = |i: usize, j: usize, k: usize| (i << 2) | (j << 1) | k;
    for bits in 0..4096usize {
        let b = |s: usize| (bits >> s) & 1;
        let (i, i2, j, j2, k, k2) = (b(0), b(1), b(2), b(3), b(4), b(5));
        let (m, m2, n, n2, p, p2) = (b(6), b(7), b(8), b(9), b(10), b(11));
        let e = eps(i, i2) * eps(j, j2) * eps(k, k2) * eps(m, m2) * eps(n, n2) * eps(p, p2);
        if e == 0.0 {
            continue;
        }
        let c1 = idx(i, j, k);
        let c2 = idx(i2, j2, m);
        let c3 = idx(n, p, k2);
        let c4 = idx(n2, p2, m2);
        h[((c1 * 8 + c2) * 8 + c3) * 8 + c4] += c(-0.5 * e, 0.0);
    }
    h
}

/// Four-copy operator `16 |h><h|` realizing `16 |Hdet(psi)|^2`.
pub fn build_tangle_operator() -> MultiCopyOp {
    let mut op = MultiCopyOp::new(8, 4);
    op.push_projector(16.0, hyperdeterminant_vector());
    op
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TangleOptions {
    /// Impose invariance of the four-copy variable under qubit permutations.
    pub permutation_invariant: bool,
}

pub const TANGLE_RANK_CAP: usize = 6;

/// Qubit swap unitaries generating all permutations of three qubits.
pub fn qubit_swaps() -> Vec<CMat> {
    let space = ProductSpace::qubits(3);
    [(0usize, 1usize), (1, 2)]
        .iter()
        .map(|&(a, b)| {
            let mut u = CMat::zeros(8, 8);
            for col in 0..8 {
                let mut d = space.digits(col);
                d.swap(a, b);
                let row = d.iter().fold(0, |acc, &x| acc * 2 + x);
                u[(row, col)] = c(1.0, 0.0);
            }
            u
        })
        .collect()
}

/// Lower bound on the convex roof of `16 |Hdet|^2` from four-copy symmetric PPT states.
pub fn tangle_ppt(rho: &DensityOp, topts: TangleOptions, opts: ProgramOptions) -> Result<RoofResult> {
    if rho.space().party_dims() != [2, 2, 2] {
        return Err(RoofError::InvalidInput("tangle needs three qubits".into()));
    }
    let rank = rho.rank(crate::roof::frame::RANGE_THRESHOLD);
    if rank > TANGLE_RANK_CAP && !topts.permutation_invariant {
        return Err(RoofError::DimensionCap(format!(
            "rank {rank} exceeds {TANGLE_RANK_CAP}; set the permutation-invariance flag for symmetric states"
        )));
    }
    let mut program =
        RoofProgram::new("tangle", rho.space().clone(), build_tangle_operator(), ConstraintMode::FullMarginal(rho.clone()), Sense::Min)
            .with_options(opts);
    if topts.permutation_invariant {
        for u in qubit_swaps() {
            let drift = (&u * rho.matrix() * u.adjoint() - rho.matrix()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
            if drift > 1e-9 {
                return Err(RoofError::InvalidInput("state is not invariant under qubit permutations".into()));
            }
            program.invariant_ops.push(u.clone());
            program.copy_invariance.push(u);
        }
    }
    program.solve()
}

/// GME mixer: three unnormalized two-copy variables whose marginals sum to `rho`,
/// each weighted with the linear entropy across one party.
pub fn gme_mixer(rho: &DensityOp, opts: ProgramOptions) -> Result<RoofResult> {
    let space = rho.space();
    if space.parties() != 3 {
        return Err(RoofError::InvalidInput("GME mixer needs three parties".into()));
    }
    let specs = (0..3)
        .map(|p| VarSpec { objective: linear_entropy_objective(space, &[p]), cuts: vec![1] })
        .collect();
    let asm = Assembly::build(
        space,
        &ConstraintMode::FullMarginal(rho.clone()),
        &[],
        &[],
        specs,
        Sense::Min,
        &opts,
        false,
    )?;
    asm.solve("gme", &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{
        bell_state, cayley_hyperdeterminant, ghz_state, horodecki, linear_entropy, qutrit_max_entangled, w_state,
    };
    use crate::tensor::{pauli_z, random_haar_ket, Ket};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn opts() -> ProgramOptions {
        ProgramOptions::default()
    }

    #[test]
    fn bell_and_product_values() {
        let r = elin_ppt(&bell_state().density(), &[0], opts()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-6, "{}", r.value);
        let prod = Ket::basis(ProductSpace::qubits(2), 2).unwrap();
        let r = elin_ppt(&prod.density(), &[0], opts()).unwrap();
        assert!(r.value.abs() < 1e-6);
    }

    #[test]
    fn random_pure_states_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dims in [(2, 2), (2, 3), (3, 3)] {
            let psi = random_haar_ket(&ProductSpace::bipartite(dims.0, dims.1), &mut rng);
            let r = elin_ppt(&psi.density(), &[0], opts()).unwrap();
            assert!((r.value - linear_entropy(&psi, &[0]).unwrap()).abs() < 1e-6);
            assert!(r.kkt_passed());
        }
    }

    #[test]
    fn horodecki_is_detected() {
        let r = elin_ppt(&horodecki(0.5, 1.0).unwrap(), &[0], opts()).unwrap();
        assert!(r.value > 1e-6, "{}", r.value);
        assert!(r.kkt_passed());
    }

    #[test]
    fn poly_operator_reproduces_powers() {
        let q = ProductSpace::qubits(1);
        let spec = MeasureSpec::new(vec![(1.0, HermitianOp::new(q.clone(), pauli_z()).unwrap(), 2)]).unwrap();
        let l = build_poly_operator(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let psi = random_haar_ket(&q, &mut rng);
            let v2 = crate::tensor::kron_vec(psi.amplitudes(), psi.amplitudes());
            let got = (v2.adjoint() * l.matrix() * &v2)[(0, 0)].re;
            assert!((got - spec.evaluate(psi.amplitudes().as_slice())).abs() < 1e-10);
        }
    }

    #[test]
    fn tangle_vector_matches_hyperdeterminant() {
        let h = hyperdeterminant_vector();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let psi = random_haar_ket(&ProductSpace::qubits(3), &mut rng);
            let a = psi.amplitudes();
            let p4 = crate::tensor::kron_vec(&crate::tensor::kron_vec(a, a), &crate::tensor::kron_vec(a, a));
            let got = (h.transpose() * p4)[(0, 0)];
            assert!((got - cayley_hyperdeterminant(&psi).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn tangle_anchors() {
        let g = tangle_ppt(&ghz_state(3).density(), TangleOptions::default(), opts()).unwrap();
        assert!((g.value - 1.0).abs() < 1e-4, "{}", g.value);
        let w = tangle_ppt(&w_state(3).density(), TangleOptions::default(), opts()).unwrap();
        assert!(w.value.abs() < 1e-6);
    }

    #[test]
    fn permutation_flag_keeps_value() {
        for (x, y) in [(0.0, 0.6), (0.1, 0.5), (0.6, 0.2)] {
            let rho = crate::oracles::rho_xy(x, y).unwrap();
            let plain = tangle_ppt(&rho, TangleOptions::default(), opts()).unwrap();
            let sym = tangle_ppt(&rho, TangleOptions { permutation_invariant: true }, opts()).unwrap();
            assert!((plain.value - sym.value).abs() < 1e-6, "({x}, {y}): {} vs {}", plain.value, sym.value);
        }
    }

    #[test]
    fn schmidt_and_meyer_wallach_pure_values() {
        let r = schmidt_r(&qutrit_max_entangled().density(), &[0], 3, opts()).unwrap();
        assert!((r.value - 1.0 / 27.0).abs() < 1e-6, "{}", r.value);
        let g = meyer_wallach_roof(&ghz_state(3).density(), opts()).unwrap();
        assert!((g.value - 1.0).abs() < 1e-6);
        let w = meyer_wallach_roof(&w_state(3).density(), opts()).unwrap();
        assert!((w.value - 8.0 / 9.0).abs() < 1e-6);
    }

    #[test]
    fn gme_mixer_separates_ghz_from_biseparable() {
        let g = gme_mixer(&ghz_state(3).density(), opts()).unwrap();
        assert!(g.value > 1e-3, "{}", g.value);
        let bell = bell_state().projector();
        let zero = Ket::basis(ProductSpace::qubits(1), 0).unwrap().projector();
        let space = ProductSpace::qubits(3);
        let a = crate::tensor::kron_mat(&zero, &bell);
        let c_ = crate::tensor::kron_mat(&bell, &zero);
        let mut b = CMat::zeros(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                let d = space.digits(i);
                let e = space.digits(j);
                // Bell pair on parties 0 and 2, party 1 in |0>.
                if d[1] == 0 && e[1] == 0 {
                    b[(i, j)] = bell[(d[0] * 2 + d[2], e[0] * 2 + e[2])];
                }
            }
        }
        let m = (a + b + c_) * c(1.0 / 3.0, 0.0);
        let rho = DensityOp::new(space, m).unwrap();
        let r = gme_mixer(&rho, opts()).unwrap();
        assert!(r.value < 1e-6, "{}", r.value);
    }
}
