//! Quantum Fisher information lower bounds and variance roofs from data.

use convexroof_sdp::Sense;

use crate::data::DataConstraint;
use crate::error::{Result, RoofError};
use crate::roof::objective::MultiCopyOp;
use crate::roof::program::{ConstraintMode, RoofProgram, RoofResult};
use crate::roof::ProgramOptions;
use crate::tensor::{c, embed_local, pauli_x, pauli_y, pauli_z, CMat, DensityOp, HermitianOp, ProductSpace};

/// What is known about the state.
#[derive(Debug, Clone)]
pub enum Knowledge {
    State(DensityOp),
    Data(Vec<DataConstraint>),
}

impl Knowledge {
    fn mode(&self) -> ConstraintMode {
        match self {
            Knowledge::State(rho) => ConstraintMode::FullMarginal(rho.clone()),
            Knowledge::Data(d) => ConstraintMode::Data(d.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FisherBound {
    pub value: f64,
    pub result: RoofResult,
}

/// `sum_l (A_l^2 (x) 1 - A_l (x) A_l)`: the summed variance on `psi (x) psi`.
fn variance_objective(ops: &[&CMat]) -> MultiCopyOp {
    let d = ops[0].nrows();
    let mut op = MultiCopyOp::new(d, 2);
    for a in ops {
        op.push_product(1.0, vec![*a * *a]);
        op.push_product(-1.0, vec![(*a).clone(), (*a).clone()]);
    }
    op
}

fn variance_program(
    name: &str,
    space: &ProductSpace,
    ops: &[&HermitianOp],
    knowledge: &Knowledge,
    sense: Sense,
    opts: ProgramOptions,
) -> Result<RoofResult> {
    if let Knowledge::Data(list) = knowledge {
        for d in list {
            if d.observable.space() != space {
                return Err(RoofError::DimensionMismatch("observable and generator spaces differ".into()));
            }
        }
    }
    if let Knowledge::State(rho) = knowledge {
        if rho.space() != space {
            return Err(RoofError::DimensionMismatch("state and generator spaces differ".into()));
        }
    }
    let mats: Vec<&CMat> = ops.iter().map(|o| o.matrix()).collect();
    let mut program = RoofProgram::new(name, space.clone(), variance_objective(&mats), knowledge.mode(), sense).with_options(opts);
    program.invariant_ops = mats.iter().map(|m| (*m).clone()).collect();
    program.solve()
}

/// `4 min tr((A^2 (x) 1 - A (x) A) omega)` over symmetric PPT two-copy states matching the data.
pub fn qfi_lower_bound(a: &HermitianOp, constraints: Vec<DataConstraint>, opts: ProgramOptions) -> Result<FisherBound> {
    let result = variance_program("qfi", a.space(), &[a], &Knowledge::Data(constraints), Sense::Min, opts)?;
    Ok(FisherBound { value: 4.0 * result.value, result })
}

/// Full-state version of [`qfi_lower_bound`].
pub fn qfi_lower_bound_state(a: &HermitianOp, rho: &DensityOp, opts: ProgramOptions) -> Result<FisherBound> {
    let result = variance_program("qfi", a.space(), &[a], &Knowledge::State(rho.clone()), Sense::Min, opts)?;
    Ok(FisherBound { value: 4.0 * result.value, result })
}

/// Upper bound on the concave roof of the variance of `A` (the variance itself) from data.
pub fn variance_upper_bound(a: &HermitianOp, constraints: Vec<DataConstraint>, opts: ProgramOptions) -> Result<FisherBound> {
    let result = variance_program("varmax", a.space(), &[a], &Knowledge::Data(constraints), Sense::Max, opts)?;
    Ok(FisherBound { value: result.value, result })
}

/// Collective spin operators `J_l = 1/2 sum_n sigma_l^(n)` on `n` qubits.
#[derive(Debug, Clone)]
pub struct SpinEnsemble {
    pub n: usize,
    pub jx: HermitianOp,
    pub jy: HermitianOp,
    pub jz: HermitianOp,
}

impl SpinEnsemble {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(RoofError::InvalidInput("need at least one qubit".into()));
        }
        let space = ProductSpace::qubits(n);
        let collective = |s: CMat| -> Result<HermitianOp> {
            let d = space.total_dim();
            let mut m = CMat::zeros(d, d);
            for k in 0..n {
                m += embed_local(&s, &space, k);
            }
            HermitianOp::new(space.clone(), m * c(0.5, 0.0))
        };
        Ok(Self { n, jx: collective(pauli_x())?, jy: collective(pauli_y())?, jz: collective(pauli_z())? })
    }

    pub fn space(&self) -> &ProductSpace {
        self.jx.space()
    }

    pub fn ops(&self) -> [&HermitianOp; 3] {
        [&self.jx, &self.jy, &self.jz]
    }

    /// `sum_l Var(J_l)` of a state.
    pub fn total_variance(&self, rho: &DensityOp) -> f64 {
        self.ops()
            .iter()
            .map(|j| {
                let m = rho.expectation(j.matrix());
                rho.expectation(&(j.matrix() * j.matrix())) - m * m
            })
            .sum()
    }
}

pub const SPIN_QUBIT_CAP: usize = 3;

#[derive(Debug, Clone)]
pub struct SpinRoofReport {
    pub value: f64,
    /// `N/2`, the pure product-state value of `sum_l Var(J_l)`.
    pub threshold: f64,
    pub sense: Sense,
    /// Min roof above `N/2 + tol` or max roof below `N/2 - tol`.
    pub entangled: bool,
    pub result: RoofResult,
}

/// Convex (min) or concave (max) roof bound of `sum_l Var(J_l)`.
pub fn spin_variance_roofs(n: usize, knowledge: &Knowledge, sense: Sense, opts: ProgramOptions) -> Result<SpinRoofReport> {
    if n > SPIN_QUBIT_CAP {
        return Err(RoofError::DimensionCap(format!("{n} qubits exceed the cap {SPIN_QUBIT_CAP}")));
    }
    let spins = SpinEnsemble::new(n)?;
    let result = variance_program("spin", spins.space(), &spins.ops(), knowledge, sense, opts)?;
    let threshold = n as f64 / 2.0;
    let value = result.value;
    let entangled = match sense {
        Sense::Min => value > threshold + opts.tol.max(1e-6),
        Sense::Max => value < threshold - opts.tol.max(1e-6),
    };
    Ok(SpinRoofReport { value, threshold, sense, entangled, result })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::ghz_state;
    use crate::tensor::{hermitian_basis, random_haar_ket, Ket};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fidelity_data(f: f64) -> Vec<DataConstraint> {
        let g = ghz_state(3);
        vec![DataConstraint::new(HermitianOp::new(g.space().clone(), g.projector()).unwrap(), f).unwrap()]
    }

    #[test]
    fn spin_commutator() {
        let s = SpinEnsemble::new(3).unwrap();
        let comm = s.jx.matrix() * s.jy.matrix() - s.jy.matrix() * s.jx.matrix();
        assert!(crate::tensor::max_abs(&(comm - s.jz.matrix() * c(0.0, 1.0))) < 1e-12);
    }

    #[test]
    fn ghz_fidelity_anchors() {
        let jz = SpinEnsemble::new(3).unwrap().jz;
        let top = qfi_lower_bound(&jz, fidelity_data(1.0), ProgramOptions::default()).unwrap();
        assert!((top.value - 9.0).abs() < 1e-4, "{}", top.value);
        let half = qfi_lower_bound(&jz, fidelity_data(0.5), ProgramOptions::default()).unwrap();
        assert!(half.value.abs() < 1e-6, "{}", half.value);
    }

    #[test]
    fn full_tomography_of_pure_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let space = ProductSpace::qubits(2);
        let psi = random_haar_ket(&space, &mut rng);
        let a = HermitianOp::new(space.clone(), crate::tensor::kron_mat(&pauli_x(), &pauli_z())).unwrap();
        let obs: Vec<HermitianOp> = hermitian_basis(4).into_iter().map(|g| HermitianOp::new(space.clone(), g).unwrap()).collect();
        let data = DataConstraint::from_state(&psi.density(), &obs).unwrap();
        let m = psi.expectation(a.matrix());
        let var = psi.expectation(&(a.matrix() * a.matrix())) - m * m;
        let q = qfi_lower_bound(&a, data.clone(), ProgramOptions::default()).unwrap();
        assert!((q.value - 4.0 * var).abs() < 1e-6);
        let v = variance_upper_bound(&a, data, ProgramOptions::default()).unwrap();
        assert!((v.value - var).abs() < 1e-6);
    }

    #[test]
    fn qubit_variance_maximum() {
        let q = ProductSpace::qubits(1);
        let z = HermitianOp::new(q, pauli_z()).unwrap();
        let v = variance_upper_bound(&z, vec![], ProgramOptions::default()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn spin_roofs_on_pure_states() {
        let prod = Ket::basis(ProductSpace::qubits(3), 0).unwrap();
        let r = spin_variance_roofs(3, &Knowledge::State(prod.density()), Sense::Min, ProgramOptions::default()).unwrap();
        assert!((r.value - 1.5).abs() < 1e-6);
        let g = ghz_state(3).density();
        let s = SpinEnsemble::new(3).unwrap();
        let r = spin_variance_roofs(3, &Knowledge::State(g.clone()), Sense::Min, ProgramOptions::default()).unwrap();
        assert!((r.value - s.total_variance(&g)).abs() < 1e-6);
    }
}
