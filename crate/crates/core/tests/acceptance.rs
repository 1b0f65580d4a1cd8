//! Acceptance criteria, one pass/fail line each.

use std::time::Instant;

use convexroof::data::DataConstraint;
use convexroof::fisher::{qfi_lower_bound, SpinEnsemble};
use convexroof::oracles::{
    assistance_family, embedded_bell_family, ensemble_upper_bound, ghz_state, horodecki, linear_entropy, negativity, psi_e,
    rho_xy, schmidt_family, w_state, wootters_concurrence, EnsembleOptions,
};
use convexroof::roof::measures::{
    assistance_upper, elin_extension, elin_from_data, elin_ppt, schmidt_r, tangle_ppt, TangleOptions,
};
use convexroof::roof::{ProgramOptions, RoofResult};
use convexroof::steering::{noisy_singlet_assemblage, steering_bound, SteeringOptions, SteeringResult, WordSet};
use convexroof::tensor::{
    c, eig_hermitian_mat, kron_mat, partial_trace_mat, random_density, random_haar_ket, CMat, DensityOp, HermitianOp, Ket,
    ProductSpace,
};
use convexroof::witness::{extract_witness_for, verify_witness};
use convexroof_sdp::{solve, verify_kkt, Constraint, SdpProblem, Sense, SolverOptions, SparseHerm, Status};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// KKT bookkeeping across every solve of the run.
#[derive(Default)]
struct Ledger {
    solves: usize,
    failures: Vec<String>,
}

impl Ledger {
    fn roof(&mut self, label: &str, r: &RoofResult) {
        self.solves += 1;
        if let Some(k) = r.kkt {
            if !k.passed {
                self.failures.push(format!("{label}: {k:?}"));
            }
        }
    }

    fn steer(&mut self, label: &str, r: &SteeringResult) {
        self.solves += 1;
        if let Some(k) = r.kkt {
            if !k.passed {
                self.failures.push(format!("{label}: {k:?}"));
            }
        }
    }
}

fn opts() -> ProgramOptions {
    ProgramOptions::default()
}

fn check(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn min_eig(m: &CMat) -> f64 {
    eig_hermitian_mat(m).0[0]
}

fn elin(ledger: &mut Ledger, label: &str, rho: &DensityOp) -> Result<f64, String> {
    let r = elin_ppt(rho, &[0], opts()).map_err(|e| format!("{label}: {e}"))?;
    ledger.roof(label, &r);
    Ok(r.value)
}

fn pure_state_exactness(ledger: &mut Ledger) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for (da, db) in [(2, 2), (3, 3), (2, 3)] {
        let space = ProductSpace::bipartite(da, db);
        for k in 0..50 {
            let psi = random_haar_ket(&space, &mut rng);
            let v = elin(ledger, &format!("pure {da}x{db} #{k}"), &psi.density())?;
            let exact = linear_entropy(&psi, &[0]).map_err(|e| e.to_string())?;
            worst = worst.max((v - exact).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-6, format!("max deviation {worst:.2e}"))?;
    check(secs < 60.0, format!("runtime {secs:.1} s"))?;
    Ok(format!("150 states, max deviation {worst:.2e}, {secs:.1} s"))
}

/// Matrix of the party permutation `new[k] = old[perm[k]]`.
fn permute_parties(dims: &[usize], perm: &[usize]) -> CMat {
    let n: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut out = CMat::zeros(n, n);
    for idx in 0..n {
        let mut digits = vec![0; dims.len()];
        let mut rest = idx;
        for k in (0..dims.len()).rev() {
            digits[k] = rest % dims[k];
            rest /= dims[k];
        }
        let mut target = 0;
        for k in 0..dims.len() {
            target = target * new_dims[k] + digits[perm[k]];
        }
        out[(target, idx)] = c(1.0, 0.0);
    }
    out
}

/// Random state on `A B A' B'` symmetric under `A <-> A'` and `B <-> B'`, PSD and PPT
/// under the transpose of `A B`, by mixing toward the normalized symmetric projector.
fn random_symmetric_extension(da: usize, db: usize, rng: &mut ChaCha8Rng) -> CMat {
    let dims = [da, db, da, db];
    let n = (da * db) * (da * db);
    let swap_a = permute_parties(&dims, &[2, 1, 0, 3]);
    let swap_b = permute_parties(&dims, &[0, 3, 2, 1]);
    let id = CMat::identity(n, n);
    let pi = (&id + &swap_a) * (&id + &swap_b) * c(0.25, 0.0);
    let rank = rng.random_range(1..=4);
    let space = ProductSpace::new(dims.to_vec()).expect("valid dims");
    let raw = random_density(&space, rank, rng).expect("valid rank");
    let proj_raw = &pi * raw.matrix() * &pi;
    let proj_raw = &proj_raw / proj_raw.trace();
    let mixed = &pi / pi.trace();
    let at = |lam: f64| -> CMat { &proj_raw * c(1.0 - lam, 0.0) + &mixed * c(lam, 0.0) };
    let feasible = |m: &CMat| {
        let pt = convexroof::tensor::partial_transpose_mat(m, &space, &[0, 1]).expect("valid parties");
        min_eig(m) >= -1e-12 && min_eig(&pt) >= 1e-9
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if feasible(&at(0.0)) {
        hi = 0.0;
    }
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if feasible(&at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    at((hi + 1e-3_f64).min(1.0))
}

fn observation_two(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let space = ProductSpace::qubits(2);
    let mut smallest = f64::INFINITY;
    let mut found = 0;
    while found < 50 {
        let rank = rng.random_range(1..=4);
        let rho = random_density(&space, rank, &mut rng).map_err(|e| e.to_string())?;
        if negativity(&rho, &[0]).map_err(|e| e.to_string())? < 1e-4 {
            continue;
        }
        let v = elin(ledger, &format!("npt #{found}"), &rho)?;
        smallest = smallest.min(v);
        found += 1;
    }
    check(smallest > 1e-6, format!("smallest value on non-PPT states {smallest:.2e}"))?;
    let mut largest = 0.0f64;
    for (k, (da, db)) in [(2usize, 2usize), (2, 3)].iter().cycle().take(20).enumerate() {
        let omega = random_symmetric_extension(*da, *db, &mut rng);
        let big = ProductSpace::new(vec![*da, *db, *da, *db]).expect("valid dims");
        let (_, marg) = partial_trace_mat(&omega, &big, &[2, 3]).map_err(|e| e.to_string())?;
        let rho = DensityOp::new(ProductSpace::bipartite(*da, *db), convexroof::tensor::hermitian_part(&marg))
            .map_err(|e| e.to_string())?;
        largest = largest.max(elin(ledger, &format!("extendible #{k}"), &rho)?);
    }
    check(largest <= 1e-6, format!("largest value on extendible states {largest:.2e}"))?;
    Ok(format!("non-PPT min {smallest:.2e}, extendible max {largest:.2e}"))
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

fn bound_entanglement(ledger: &mut Ledger) -> Outcome {
    let start = Instant::now();
    let axis = grid(0.0, 1.0, 0.05);
    let mut table = vec![vec![0.0; axis.len()]; axis.len()];
    for (i, &a) in axis.iter().enumerate() {
        for (j, &p) in axis.iter().enumerate() {
            let rho = horodecki(a, p).map_err(|e| e.to_string())?;
            table[i][j] = elin(ledger, &format!("horodecki a={a:.2} p={p:.2}"), &rho)?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut critical = Vec::new();
    for (i, &a) in axis.iter().enumerate() {
        let row = &table[i];
        for j in 1..row.len() - 1 {
            let second = row[j + 1] - 2.0 * row[j] + row[j - 1];
            check(second >= -1e-6, format!("not convex along a={a:.2} at p={:.2}: {second:.2e}", axis[j]))?;
        }
        if (0.2 - 1e-9..=0.8 + 1e-9).contains(&a) {
            let top = *row.last().expect("nonempty row");
            check(top > 1e-6, format!("a={a:.2}: value {top:.2e} at p=1"))?;
            let zeros = row.iter().take_while(|v| **v <= 1e-6).count();
            check(zeros > 0 && row[zeros..].iter().all(|v| *v > 1e-6), format!("a={a:.2}: zero set is not an interval from p=0"))?;
            critical.push(axis[zeros]);
        }
    }
    check(secs < 600.0, format!("runtime {secs:.1} s"))?;
    let mid = table[10][20];
    Ok(format!(
        "value at a=0.5,p=1 {mid:.3e}; first nonzero p in [{:.2}, {:.2}]; {secs:.1} s",
        critical.iter().copied().fold(f64::INFINITY, f64::min),
        critical.iter().copied().fold(0.0, f64::max)
    ))
}

fn hierarchy(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let bell = convexroof::oracles::bell_state().density();
    let mut worst = f64::INFINITY;
    for k in 0..10 {
        let (rho, label) = if k < 5 {
            let r = random_density(&ProductSpace::qubits(2), 4, &mut rng).map_err(|e| e.to_string())?;
            (r.mix(&bell, 0.1 * k as f64).map_err(|e| e.to_string())?, "2x2 rank 4")
        } else {
            (random_density(&ProductSpace::bipartite(3, 3), 4, &mut rng).map_err(|e| e.to_string())?, "3x3 rank 4")
        };
        let ppt = elin(ledger, &format!("hierarchy ppt #{k}"), &rho)?;
        let e2 = elin_extension(&rho, &[0], 2, opts()).map_err(|e| format!("{label} n=2: {e}"))?;
        ledger.roof("hierarchy n=2", &e2);
        let e3 = elin_extension(&rho, &[0], 3, opts()).map_err(|e| format!("{label} n=3: {e}"))?;
        ledger.roof("hierarchy n=3", &e3);
        check(
            e3.value >= e2.value - 1e-7 && e2.value >= ppt - 1e-7,
            format!("#{k} ({label}): E3 {:.6e}, E2 {:.6e}, ppt {ppt:.6e}", e3.value, e2.value),
        )?;
        worst = worst.min((e3.value - e2.value).min(e2.value - ppt));
    }
    Ok(format!("smallest step {worst:.2e}"))
}

fn sandwich(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut gaps = Vec::new();
    for k in 0..20 {
        let rho = random_density(&ProductSpace::qubits(2), 2, &mut rng).map_err(|e| e.to_string())?;
        let lower = elin(ledger, &format!("sandwich #{k}"), &rho)?;
        let upper = ensemble_upper_bound(&rho, |psi: &Ket| linear_entropy(psi, &[0]).unwrap_or(f64::NAN), EnsembleOptions::default());
        let conc = wootters_concurrence(&rho).map_err(|e| e.to_string())?;
        check(lower <= upper + 1e-6, format!("#{k}: lower {lower:.6e} above upper {upper:.6e}"))?;
        check(lower <= conc * conc / 2.0 + 1e-6, format!("#{k}: lower {lower:.6e} above C^2/2 {:.6e}", conc * conc / 2.0))?;
        gaps.push(upper - lower);
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let max = gaps.iter().copied().fold(0.0, f64::max);
    Ok(format!("upper - lower: mean {mean:.3e}, max {max:.3e}"))
}

fn tangle_anchors(ledger: &mut Ledger) -> Outcome {
    let start = Instant::now();
    let g = tangle_ppt(&ghz_state(3).density(), TangleOptions::default(), opts()).map_err(|e| e.to_string())?;
    ledger.roof("tangle ghz", &g);
    let w = tangle_ppt(&w_state(3).density(), TangleOptions::default(), opts()).map_err(|e| e.to_string())?;
    ledger.roof("tangle w", &w);
    check((g.value - 1.0).abs() <= 1e-4, format!("GHZ {:.6}", g.value))?;
    check(w.value <= 1e-6, format!("W {:.2e}", w.value))?;
    let sym = TangleOptions { permutation_invariant: true };
    let axis = grid(0.0, 1.0, 0.1);
    let mut zeros = 0;
    let mut points = 0;
    let mut corner_w = f64::NAN;
    let mut corner_ghz = f64::NAN;
    for (i, &x) in axis.iter().enumerate() {
        for (j, &y) in axis.iter().enumerate() {
            if i + j > 10 {
                continue;
            }
            let rho = rho_xy(x, y).map_err(|e| e.to_string())?;
            let r = tangle_ppt(&rho, sym, opts()).map_err(|e| format!("({x:.1}, {y:.1}): {e}"))?;
            ledger.roof(&format!("tangle ({x:.1}, {y:.1})"), &r);
            points += 1;
            if r.value <= 1e-6 {
                zeros += 1;
            }
            if i == 0 && j == 0 {
                corner_w = r.value;
            }
            if i == 10 && j == 0 {
                corner_ghz = r.value;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(corner_w <= 1e-6, format!("W corner {corner_w:.2e}"))?;
    check((corner_ghz - 1.0).abs() <= 1e-4, format!("(1, 0) gives {corner_ghz:.6}"))?;
    check(secs < 1800.0, format!("runtime {secs:.1} s"))?;
    Ok(format!("GHZ {:.6}, W {:.1e}; {zeros}/{points} grid points zero; {secs:.1} s", g.value, w.value))
}

fn schmidt_superiority(ledger: &mut Ledger) -> Outcome {
    let mut witnesses = Vec::new();
    for p in grid(0.0, 1.0, 0.02) {
        let rho = schmidt_family(p).map_err(|e| e.to_string())?;
        let neg = negativity(&rho, &[0]).map_err(|e| e.to_string())?;
        let r = schmidt_r(&rho, &[0], 3, opts()).map_err(|e| e.to_string())?;
        ledger.roof(&format!("schmidt p={p:.2}"), &r);
        if r.value > 1e-4 && neg - 0.5 <= 0.0 {
            witnesses.push((p, r.value, neg));
        }
    }
    match witnesses.first() {
        Some(&(p, v, neg)) => Ok(format!(
            "{} grid points, first p={p:.2}: R_3 bound {v:.3e}, negativity {neg:.4}",
            witnesses.len()
        )),
        None => Err("no p with R_3 bound > 1e-4 and negativity <= 1/2".into()),
    }
}

fn embedded_pauli(m: &CMat) -> CMat {
    let mut out = CMat::zeros(3, 3);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

fn partial_information(ledger: &mut Ledger) -> Outcome {
    let space = ProductSpace::bipartite(3, 3);
    let x = embedded_pauli(&convexroof::tensor::pauli_x());
    let z = embedded_pauli(&convexroof::tensor::pauli_z());
    let obs = [kron_mat(&x, &x), kron_mat(&z, &z)]
        .into_iter()
        .map(|m| HermitianOp::new(space.clone(), m))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let rho = embedded_bell_family(p).map_err(|e| e.to_string())?;
        let data = DataConstraint::from_state(&rho, &obs).map_err(|e| e.to_string())?;
        let partial = elin_from_data(&space, &[0], data, opts()).map_err(|e| format!("p={p}: {e}"))?;
        ledger.roof(&format!("partial p={p}"), &partial);
        let full = elin(ledger, &format!("full p={p}"), &rho)?;
        check(partial.value <= full + 1e-6, format!("p={p}: partial {:.6e} above full {full:.6e}", partial.value))?;
        rows.push((p, partial.value, full));
    }
    let top = rows.last().expect("five points").1;
    check(top > 1e-6, format!("bound at p=1 is {top:.2e}"))?;
    Ok(rows.iter().map(|(p, a, b)| format!("p={p}: {a:.4}/{b:.4}")).collect::<Vec<_>>().join(", "))
}

fn assistance(ledger: &mut Ledger) -> Outcome {
    let mut worst = f64::INFINITY;
    for p in grid(0.0, 1.0, 0.1) {
        let rho = assistance_family(p, 0.3).map_err(|e| e.to_string())?;
        let up = assistance_upper(&rho, &[0], opts()).map_err(|e| e.to_string())?;
        ledger.roof(&format!("assist p={p:.1}"), &up);
        let low = elin(ledger, &format!("assist elin p={p:.1}"), &rho)?;
        check(up.value >= low - 1e-7, format!("p={p:.1}: assistance {:.6e} below elin {low:.6e}", up.value))?;
        worst = worst.min(up.value - low);
    }
    let psi = psi_e(0.3).map_err(|e| e.to_string())?;
    let exact = linear_entropy(&psi, &[0]).map_err(|e| e.to_string())?;
    let rho = psi.density();
    let up = assistance_upper(&rho, &[0], opts()).map_err(|e| e.to_string())?;
    ledger.roof("assist pure", &up);
    let low = elin(ledger, "elin pure", &rho)?;
    check((up.value - exact).abs() <= 1e-6 && (low - exact).abs() <= 1e-6, format!("pure endpoint {:.8} / {low:.8} vs {exact:.8}", up.value))?;
    let mixed = DensityOp::maximally_mixed(ProductSpace::qubits(2));
    let m = assistance_upper(&mixed, &[0], opts()).map_err(|e| e.to_string())?;
    ledger.roof("assist mixed", &m);
    check(m.value >= 0.5 - 1e-6, format!("maximally mixed {:.8}", m.value))?;
    Ok(format!("min(upper - lower) {worst:.2e}; pure endpoint {exact:.6}; maximally mixed {:.6}", m.value))
}

fn qfi_anchors(ledger: &mut Ledger) -> Outcome {
    let jz = SpinEnsemble::new(3).map_err(|e| e.to_string())?.jz;
    let g = ghz_state(3);
    let proj = HermitianOp::new(g.space().clone(), g.projector()).map_err(|e| e.to_string())?;
    let mut values = Vec::new();
    for f in [0.5, 0.6, 0.7, 0.8, 0.9, 1.0] {
        let data = vec![DataConstraint::new(proj.clone(), f).map_err(|e| e.to_string())?];
        let b = qfi_lower_bound(&jz, data, opts()).map_err(|e| format!("F={f}: {e}"))?;
        ledger.roof(&format!("qfi F={f}"), &b.result);
        values.push(b.value);
    }
    check((values[5] - 9.0).abs() <= 1e-4, format!("F=1 gives {:.6}", values[5]))?;
    check(values[0] <= 1e-6, format!("F=0.5 gives {:.2e}", values[0]))?;
    for w in values.windows(2) {
        check(w[1] >= w[0] - 1e-6, format!("not monotone: {values:?}"))?;
    }
    Ok(values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", "))
}

fn random_separable(rng: &mut ChaCha8Rng) -> DensityOp {
    let q = ProductSpace::qubits(1);
    let terms = rng.random_range(1..=4);
    let mut m = CMat::zeros(4, 4);
    let mut total = 0.0;
    for _ in 0..terms {
        let w: f64 = rng.random_range(0.05..1.0);
        let a = random_density(&q, rng.random_range(1..=2), rng).expect("qubit state");
        let b = random_density(&q, rng.random_range(1..=2), rng).expect("qubit state");
        m += kron_mat(a.matrix(), b.matrix()) * c(w, 0.0);
        total += w;
    }
    DensityOp::new(ProductSpace::qubits(2), convexroof::tensor::hermitian_part(&(m / c(total, 0.0)))).expect("separable state")
}

fn witness_duality(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let space = ProductSpace::qubits(2);
    let bell = convexroof::oracles::bell_state().density();
    let m = {
        let op = convexroof::roof::objective::linear_entropy_objective(&space, &[0]);
        HermitianOp::from_hermitian_part(space.copies(2), &op.dense().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?
    };
    let separable: Vec<DensityOp> = (0..100).map(|_| random_separable(&mut rng)).collect();
    let (mut dev, mut resid, mut sep_max) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for k in 0..20 {
        let rho = random_density(&space, 4, &mut rng)
            .and_then(|r| r.mix(&bell, rng.random_range(0.0..0.9)))
            .map_err(|e| e.to_string())?;
        let res = elin_ppt(&rho, &[0], opts()).map_err(|e| e.to_string())?;
        ledger.roof(&format!("witness #{k}"), &res);
        let w = extract_witness_for(&res, &rho).map_err(|e| format!("#{k}: {e}"))?;
        check(!w.is_restricted_to_frame(), format!("#{k}: witness only certified on the range"))?;
        dev = dev.max((w.bound - res.value).abs());
        let rep = verify_witness(&w, &m).map_err(|e| e.to_string())?;
        check(rep.passed, format!("#{k}: {rep:?}"))?;
        resid = resid.max(rep.decomposition_residual);
        for s in &separable {
            sep_max = sep_max.max(w.expectation(s.matrix()));
        }
    }
    check(dev <= 1e-6, format!("|tr(W rho) - value| up to {dev:.2e}"))?;
    check(sep_max <= 1e-7, format!("separable expectation up to {sep_max:.2e}"))?;
    Ok(format!("max |tr(W rho) - value| {dev:.2e}, max residual {resid:.2e}, max separable tr(W sigma) {sep_max:.2e}"))
}

fn steering_cutoffs(ledger: &mut Ledger) -> Outcome {
    let mut report = Vec::new();
    for settings in [2usize, 3] {
        let cutoff = 1.0 / (settings as f64).sqrt();
        let words = WordSet::level(settings, 2, 1).map_err(|e| e.to_string())?;
        let mut run = |p: f64| -> Result<f64, String> {
            let a = noisy_singlet_assemblage(p, settings).map_err(|e| e.to_string())?;
            let r = steering_bound(&a, &words, SteeringOptions::default()).map_err(|e| e.to_string())?;
            ledger.steer(&format!("steer {settings} p={p:.4}"), &r);
            Ok(r.value)
        };
        for p in [0.0, 0.5 * cutoff, 0.9 * cutoff, cutoff] {
            let v = run(p)?;
            check(v <= 1e-5, format!("{settings} settings, p={p:.4}: {v:.2e}"))?;
        }
        let above = run(cutoff + 0.05)?;
        check(above >= 1e-3, format!("{settings} settings, cutoff + 0.05: {above:.2e}"))?;
        let top = run(1.0)?;
        check((top - 1.0).abs() <= 1e-4, format!("{settings} settings, p=1: {top:.6}"))?;
        report.push(format!("{settings} settings: cutoff+0.05 {above:.4}, p=1 {top:.6}"));
    }
    Ok(report.join("; "))
}

fn eigen_problem(cm: &DMatrix<num_complex::Complex64>) -> SdpProblem {
    let n = cm.nrows();
    let mut p = SdpProblem::new(vec![n], Sense::Min);
    p.objective[0] = SparseHerm::from_dense(cm, 0.0);
    p.constraints.push(Constraint::single(0, SparseHerm::identity(n), 1.0));
    p
}

fn solver_suite(ledger: &Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let opts = SolverOptions::with_tol(1e-9);
    let mut worst_gap = 0.0f64;
    let mut worst_err = 0.0f64;
    for n in 2..=8 {
        let g = DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let h = (&g + g.adjoint()) * c(0.5, 0.0);
        let p = eigen_problem(&h);
        let sol = solve(&p, &opts).map_err(|e| e.to_string())?;
        check(sol.status == Status::Optimal, format!("eigenvalue n={n}: status {}", sol.status))?;
        for log in &sol.history {
            check(log.primal_obj >= log.dual_obj - 1e-9, format!("eigenvalue n={n}: weak duality fails at iterate {}", log.iter))?;
        }
        check(verify_kkt(&p, &sol, 1e-9).passed, format!("eigenvalue n={n}: KKT"))?;
        worst_gap = worst_gap.max(sol.gap);
        worst_err = worst_err.max((sol.primal_obj - min_eig(&h)).abs());
    }
    let mut p = SdpProblem::new(vec![2], Sense::Min);
    p.objective[0] = SparseHerm::identity(2);
    p.constraints.push(Constraint::single(0, SparseHerm::from_triplets(2, vec![(0, 0, c(1.0, 0.0))]), 1.0));
    let sol = solve(&p, &opts).map_err(|e| e.to_string())?;
    check((sol.primal_obj - 1.0).abs() <= 1e-8, format!("toy value {}", sol.primal_obj))?;
    worst_gap = worst_gap.max(sol.gap);
    check(worst_gap <= 1e-8, format!("gap {worst_gap:.2e}"))?;
    check(
        ledger.failures.is_empty(),
        format!("{} of {} acceptance solves fail KKT: {}", ledger.failures.len(), ledger.solves, ledger.failures.join("; ")),
    )?;
    Ok(format!(
        "max gap {worst_gap:.2e}, max eigenvalue error {worst_err:.2e}, KKT passed on {} acceptance solves",
        ledger.solves
    ))
}

fn main() {
    let mut ledger = Ledger::default();
    type Criterion = fn(&mut Ledger) -> Outcome;
    let criteria: [(&str, Criterion); 12] = [
        ("pure-state exactness", pure_state_exactness),
        ("non-PPT positive, extendible zero", observation_two),
        ("bound entanglement grid", bound_entanglement),
        ("hierarchy monotonicity", hierarchy),
        ("sandwich against ensemble search", sandwich),
        ("tangle anchors and grid", tangle_anchors),
        ("Schmidt number beyond negativity", schmidt_superiority),
        ("partial information", partial_information),
        ("assistance", assistance),
        ("QFI anchors", qfi_anchors),
        ("witness duality", witness_duality),
        ("steering cutoffs", steering_cutoffs),
    ];
    let mut failed = 0;
    let mut line = |k: usize, name: &str, outcome: Outcome, secs: f64| {
        match outcome {
            Ok(detail) => println!("criterion {k:>2} PASS {name}: {detail} [{secs:.1} s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {k:>2} FAIL {name}: {why} [{secs:.1} s]");
            }
        }
    };
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f(&mut ledger);
        line(k + 1, name, outcome, t.elapsed().as_secs_f64());
    }
    let t = Instant::now();
    let outcome = solver_suite(&ledger);
    line(13, "solver suite and KKT", outcome, t.elapsed().as_secs_f64());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 13 criteria passed");
}
