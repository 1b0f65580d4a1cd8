//! Independent reference values: closed forms, the hyperdeterminant,
//! ensemble-search upper bounds, negativity, and named state families.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, RoofError};
use crate::tensor::{
    c, complex_gaussian, eig_hermitian_mat, partial_trace_mat, partial_transpose_mat, pauli_y, random_unitary, CMat,
    CVec, DensityOp, Ket, ProductSpace,
};

/// `1 - tr(rho_A^2)` of a pure state with `cut` the parties kept in `rho_A`.
pub fn linear_entropy(psi: &Ket, cut: &[usize]) -> Result<f64> {
    let rest: Vec<usize> = (0..psi.space().parties()).filter(|p| !cut.contains(p)).collect();
    let (_, ra) = partial_trace_mat(&psi.projector(), psi.space(), &rest)?;
    Ok(1.0 - (&ra * &ra).trace().re)
}

/// Elementary symmetric polynomial `e_k` of `values`.
pub fn elementary_symmetric(values: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &v in values {
        for j in (1..=k).rev() {
            e[j] += e[j - 1] * v;
        }
    }
    e[k]
}

/// `e_r` of the reduced spectrum of a pure state on `cut`.
pub fn schmidt_functional(psi: &Ket, cut: &[usize], r: usize) -> Result<f64> {
    let rest: Vec<usize> = (0..psi.space().parties()).filter(|p| !cut.contains(p)).collect();
    let (_, ra) = partial_trace_mat(&psi.projector(), psi.space(), &rest)?;
    Ok(elementary_symmetric(&eig_hermitian_mat(&ra).0, r))
}

fn sqrt_psd(m: &CMat) -> CMat {
    let (vals, vecs) = eig_hermitian_mat(m);
    let cut = 1e-14 * vals.iter().fold(0.0f64, |a, &l| a.max(l));
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| c(if l > cut { l.sqrt() } else { 0.0 }, 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// Singular values of `sqrt(rho) (Y (x) Y) conj(sqrt(rho))`, the square roots of the
/// eigenvalues of `rho rho~`.
fn two_qubit_concurrence(m: &CMat) -> f64 {
    let yy = crate::tensor::kron_mat(&pauli_y(), &pauli_y());
    let s = sqrt_psd(m);
    let a = &s * yy * s.conjugate();
    let mut lam: Vec<f64> = a.singular_values().iter().copied().collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    (lam[0] - lam[1] - lam[2] - lam[3]).max(0.0)
}

/// Wootters concurrence of a two-qubit state.
pub fn wootters_concurrence(rho: &DensityOp) -> Result<f64> {
    if rho.space().party_dims() != [2, 2] {
        return Err(RoofError::InvalidInput("concurrence needs two qubits".into()));
    }
    Ok(two_qubit_concurrence(rho.matrix()))
}

/// Cayley hyperdeterminant `d1 - 2 d2 + 4 d3` of three-qubit amplitudes.
pub fn cayley_hyperdeterminant(psi: &Ket) -> Result<Complex64> {
    if psi.space().party_dims() != [2, 2, 2] {
        return Err(RoofError::InvalidInput("hyperdeterminant needs three qubits".into()));
    }
    let a = |i: usize, j: usize, k: usize| psi.amplitudes()[4 * i + 2 * j + k];
    let d1 = a(0, 0, 0).powi(2) * a(1, 1, 1).powi(2)
        + a(0, 0, 1).powi(2) * a(1, 1, 0).powi(2)
        + a(0, 1, 0).powi(2) * a(1, 0, 1).powi(2)
        + a(1, 0, 0).powi(2) * a(0, 1, 1).powi(2);
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1) + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    Ok(d1 - d2 * 2.0 + d3 * 4.0)
}

/// Three-tangle `C^2_{A(BC)} - C^2_{AB} - C^2_{AC}` from concurrences.
pub fn ckw_tangle(psi: &Ket) -> Result<f64> {
    if psi.space().party_dims() != [2, 2, 2] {
        return Err(RoofError::InvalidInput("tangle needs three qubits".into()));
    }
    let rho = psi.projector();
    let (_, ra) = partial_trace_mat(&rho, psi.space(), &[1, 2])?;
    let c_a_bc = 4.0 * ra.determinant().re;
    let (_, rab) = partial_trace_mat(&rho, psi.space(), &[2])?;
    let (_, rac) = partial_trace_mat(&rho, psi.space(), &[1])?;
    Ok(c_a_bc - two_qubit_concurrence(&rab).powi(2) - two_qubit_concurrence(&rac).powi(2))
}

/// `(||rho^{T_A}||_1 - 1) / 2` with the transpose on `cut`.
pub fn negativity(rho: &DensityOp, cut: &[usize]) -> Result<f64> {
    let pt = partial_transpose_mat(rho.matrix(), rho.space(), cut)?;
    let tn: f64 = eig_hermitian_mat(&pt).0.iter().map(|l| l.abs()).sum();
    Ok(((tn - 1.0) / 2.0).max(0.0))
}

#[derive(Debug, Clone, Copy)]
pub struct EnsembleOptions {
    /// Number of branches; `None` means `rank + 2`.
    pub branches: Option<usize>,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self { branches: None, restarts: 20, iterations: 3000, seed: 7 }
    }
}

/// Average of a pure-state functional over the decomposition `U sqrt(lambda) e`.
fn ensemble_average<F: Fn(&Ket) -> f64>(space: &ProductSpace, scaled: &CMat, u: &CMat, f: &F) -> f64 {
    let r = scaled.ncols();
    let mut total = 0.0;
    for k in 0..u.nrows() {
        let mut v = CVec::zeros(scaled.nrows());
        for i in 0..r {
            v += scaled.column(i) * u[(k, i)];
        }
        let p = v.norm_squared();
        if p < 1e-14 {
            continue;
        }
        let ket = Ket::normalized(space.clone(), v).expect("nonzero branch");
        total += p * f(&ket);
    }
    total
}

fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| complex_gaussian(rng));
    (&g + g.adjoint()) * c(0.5, 0.0)
}

fn exp_i_hermitian(h: &CMat, eps: f64) -> CMat {
    let (vals, vecs) = eig_hermitian_mat(h);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&l| Complex64::from_polar(1.0, eps * l))));
    &vecs * d * vecs.adjoint()
}

/// Upper bound on a convex roof from a local search over pure-state decompositions.
/// Decompositions are `sqrt(p_k) psi_k = sum_i U_ki sqrt(lambda_i) e_i` for unitary `U`;
/// the result is the best average found over all restarts.
pub fn ensemble_upper_bound<F: Fn(&Ket) -> f64 + Sync>(rho: &DensityOp, f: F, opts: EnsembleOptions) -> f64 {
    let (vals, vecs) = eig_hermitian_mat(rho.matrix());
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 1e-12).collect();
    let r = keep.len();
    let scaled = CMat::from_fn(vecs.nrows(), r, |row, j| vecs[(row, keep[j])] * vals[keep[j]].sqrt());
    let m = opts.branches.unwrap_or(r + 2).max(r);
    let space = rho.space();
    let run = |restart: usize| -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(1_000_003).wrapping_add(restart as u64));
        let mut u = if restart == 0 { CMat::identity(m, m) } else { random_unitary(m, &mut rng) };
        let mut best = ensemble_average(space, &scaled, &u, &f);
        let mut eps = 0.3;
        for _ in 0..opts.iterations {
            let step = exp_i_hermitian(&random_hermitian(m, &mut rng), eps);
            let cand = &step * &u;
            let val = ensemble_average(space, &scaled, &cand, &f);
            if val < best {
                best = val;
                u = cand;
                eps = (eps * 1.3).min(1.0);
            } else {
                eps = (eps * 0.97).max(1e-5);
            }
        }
        best
    };
    let results: Vec<f64> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..opts.restarts.max(1)).map(|k| s.spawn(move || run(k))).collect();
        handles.into_iter().map(|h| h.join().expect("restart thread")).collect()
    });
    results.into_iter().fold(f64::INFINITY, f64::min)
}

fn ket(space: ProductSpace, entries: &[(usize, f64)]) -> Ket {
    let mut v = CVec::zeros(space.total_dim());
    for &(i, a) in entries {
        v[i] = c(a, 0.0);
    }
    Ket::normalized(space, v).expect("nonzero family ket")
}

pub fn bell_state() -> Ket {
    ket(ProductSpace::qubits(2), &[(0, 1.0), (3, 1.0)])
}

pub fn singlet() -> Ket {
    ket(ProductSpace::qubits(2), &[(1, 1.0), (2, -1.0)])
}

pub fn ghz_state(n: usize) -> Ket {
    ket(ProductSpace::qubits(n), &[(0, 1.0), ((1 << n) - 1, 1.0)])
}

pub fn ghz_minus() -> Ket {
    ket(ProductSpace::qubits(3), &[(0, 1.0), (7, -1.0)])
}

pub fn w_state(n: usize) -> Ket {
    let entries: Vec<(usize, f64)> = (0..n).map(|k| (1 << k, 1.0)).collect();
    ket(ProductSpace::qubits(n), &entries)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(RoofError::InvalidInput(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

fn mix_white(pure: &CMat, space: ProductSpace, p: f64) -> Result<DensityOp> {
    let d = space.total_dim();
    let m = pure * c(p, 0.0) + CMat::identity(d, d) * c((1.0 - p) / d as f64, 0.0);
    DensityOp::new(space, m)
}

/// Horodecki bound entangled 3x3 state with white noise, `p rho_a + (1 - p) 1/9`.
pub fn horodecki(a: f64, p: f64) -> Result<DensityOp> {
    check_unit("a", a)?;
    check_unit("p", p)?;
    let mut m = CMat::zeros(9, 9);
    for i in 0..9 {
        m[(i, i)] = c(a, 0.0);
    }
    for &i in &[0usize, 4, 8] {
        for &j in &[0usize, 4, 8] {
            if i != j {
                m[(i, j)] = c(a, 0.0);
            }
        }
    }
    let b = (1.0 + a) / 2.0;
    let s = (1.0 - a * a).sqrt() / 2.0;
    m[(6, 6)] = c(b, 0.0);
    m[(8, 8)] = c(b, 0.0);
    m[(6, 8)] = c(s, 0.0);
    m[(8, 6)] = c(s, 0.0);
    m /= c(8.0 * a + 1.0, 0.0);
    mix_white(&m, ProductSpace::bipartite(3, 3), p)
}

/// `x |GHZ+><GHZ+| + y |GHZ-><GHZ-| + (1 - x - y) |W><W|`.
pub fn rho_xy(x: f64, y: f64) -> Result<DensityOp> {
    if x < 0.0 || y < 0.0 || x + y > 1.0 + 1e-12 {
        return Err(RoofError::InvalidInput(format!("(x, y) = ({x}, {y}) outside the simplex")));
    }
    let w = (1.0 - x - y).max(0.0);
    let m = ghz_state(3).projector() * c(x, 0.0) + ghz_minus().projector() * c(y, 0.0) + w_state(3).projector() * c(w, 0.0);
    DensityOp::new(ProductSpace::qubits(3), m)
}

/// Maximally entangled two-qutrit ket `(|00> + |11> + |22>)/sqrt 3`.
pub fn qutrit_max_entangled() -> Ket {
    ket(ProductSpace::bipartite(3, 3), &[(0, 1.0), (4, 1.0), (8, 1.0)])
}

/// `(1 - p) |Psi_S><Psi_S| + p (1_2 (x) 1_2)/4` with `1_2` the projector onto levels 0, 1.
pub fn schmidt_family(p: f64) -> Result<DensityOp> {
    check_unit("p", p)?;
    let mut noise = CMat::zeros(9, 9);
    for i in [0usize, 1, 3, 4] {
        noise[(i, i)] = c(0.25, 0.0);
    }
    let m = qutrit_max_entangled().projector() * c(1.0 - p, 0.0) + noise * c(p, 0.0);
    DensityOp::new(ProductSpace::bipartite(3, 3), m)
}

/// `p |Phi+><Phi+| + (1 - p) 1/9` with the qubit Bell state embedded in 3x3.
pub fn embedded_bell_family(p: f64) -> Result<DensityOp> {
    check_unit("p", p)?;
    let phi = ket(ProductSpace::bipartite(3, 3), &[(0, 1.0), (4, 1.0)]);
    mix_white(&phi.projector(), ProductSpace::bipartite(3, 3), p)
}

/// `eps |00> + eps |11> + sqrt(1 - 2 eps^2) |22>`.
pub fn psi_e(eps: f64) -> Result<Ket> {
    if 2.0 * eps * eps > 1.0 {
        return Err(RoofError::InvalidInput(format!("eps = {eps} needs 2 eps^2 <= 1")));
    }
    Ok(ket(ProductSpace::bipartite(3, 3), &[(0, eps), (4, eps), (8, (1.0 - 2.0 * eps * eps).sqrt())]))
}

/// `p |Psi_E><Psi_E| + (1 - p) 1/9`.
pub fn assistance_family(p: f64, eps: f64) -> Result<DensityOp> {
    check_unit("p", p)?;
    mix_white(&psi_e(eps)?.projector(), ProductSpace::bipartite(3, 3), p)
}

/// `v |singlet><singlet| + (1 - v) 1/4`.
pub fn werner(v: f64) -> Result<DensityOp> {
    check_unit("v", v)?;
    mix_white(&singlet().projector(), ProductSpace::qubits(2), v)
}

/// Named families and their parameter names.
pub const FAMILIES: &[(&str, &[&str])] = &[
    ("horodecki", &["a", "p"]),
    ("rhoxy", &["x", "y"]),
    ("schmidt", &["p"]),
    ("bell3x3", &["p"]),
    ("assist", &["p", "eps"]),
    ("werner", &["v"]),
    ("bell", &[]),
    ("ghz", &["n"]),
    ("w", &["n"]),
];

/// Builds a named family from a parameter map.
pub fn state_family(name: &str, params: &BTreeMap<String, f64>) -> Result<DensityOp> {
    let spec = FAMILIES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| RoofError::InvalidInput(format!("unknown family {name}")))?;
    for k in params.keys() {
        if !spec.1.contains(&k.as_str()) {
            return Err(RoofError::InvalidInput(format!("family {name} has no parameter {k}")));
        }
    }
    let get = |k: &str, default: Option<f64>| -> Result<f64> {
        params
            .get(k)
            .copied()
            .or(default)
            .ok_or_else(|| RoofError::InvalidInput(format!("family {name} needs parameter {k}")))
    };
    let count = |v: f64| -> Result<usize> {
        if v.fract() != 0.0 || !(2.0..=6.0).contains(&v) {
            return Err(RoofError::InvalidInput(format!("qubit count {v} must be an integer in 2..=6")));
        }
        Ok(v as usize)
    };
    match name {
        "horodecki" => horodecki(get("a", None)?, get("p", Some(1.0))?),
        "rhoxy" => rho_xy(get("x", None)?, get("y", None)?),
        "schmidt" => schmidt_family(get("p", None)?),
        "bell3x3" => embedded_bell_family(get("p", None)?),
        "assist" => assistance_family(get("p", None)?, get("eps", Some(0.3))?),
        "werner" => werner(get("v", None)?),
        "bell" => Ok(bell_state().density()),
        "ghz" => Ok(ghz_state(count(get("n", Some(3.0))?)?).density()),
        "w" => Ok(w_state(count(get("n", Some(3.0))?)?).density()),
        _ => unreachable!(),
    }
}
