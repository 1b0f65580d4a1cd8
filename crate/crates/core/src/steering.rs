//! One-sided device-independent linear entropy bounds from steering data, via a
//! two-copy moment matrix of the uncharacterized side.

use std::collections::HashMap;
use std::time::Instant;

use convexroof_sdp::{verify_kkt, AffineProgram, KktReport, Sense, SdpProblem, SparseHerm, Status};
use num_complex::Complex64;

use crate::error::{Result, RoofError};
use crate::roof::program::map_solver_error;
use crate::roof::ProgramOptions;
use crate::tensor::{c, eig_hermitian_mat, hermitian_deviation, max_abs, pauli_x, pauli_y, pauli_z, CMat};

const ASSEMBLAGE_TOL: f64 = 1e-9;

/// Unnormalized conditional states `rho_{a|x}` of the trusted side.
#[derive(Debug, Clone)]
pub struct Assemblage {
    pub settings: usize,
    pub outcomes: usize,
    /// `states[x][a]`.
    pub states: Vec<Vec<CMat>>,
}

impl Assemblage {
    pub fn new(states: Vec<Vec<CMat>>) -> Result<Self> {
        let settings = states.len();
        if settings == 0 || states[0].len() < 2 {
            return Err(RoofError::InvalidInput("need at least one setting with two outcomes".into()));
        }
        let outcomes = states[0].len();
        let d = states[0][0].nrows();
        let mut reduced: Option<CMat> = None;
        for (x, row) in states.iter().enumerate() {
            if row.len() != outcomes {
                return Err(RoofError::InvalidInput(format!("setting {x} has {} outcomes, expected {outcomes}", row.len())));
            }
            let mut sum = CMat::zeros(d, d);
            for (a, s) in row.iter().enumerate() {
                if s.nrows() != d || s.ncols() != d {
                    return Err(RoofError::DimensionMismatch(format!("state ({a}|{x}) is not {d} x {d}")));
                }
                let dev = hermitian_deviation(s);
                if dev > ASSEMBLAGE_TOL {
                    return Err(RoofError::NotHermitian(dev));
                }
                if eig_hermitian_mat(s).0[0] < -ASSEMBLAGE_TOL {
                    return Err(RoofError::NotDensity(format!("state ({a}|{x}) is not PSD")));
                }
                sum += s;
            }
            if (sum.trace().re - 1.0).abs() > ASSEMBLAGE_TOL {
                return Err(RoofError::NotDensity(format!("probabilities of setting {x} do not sum to 1")));
            }
            match &reduced {
                None => reduced = Some(sum),
                Some(r) => {
                    if max_abs(&(r - &sum)) > ASSEMBLAGE_TOL {
                        return Err(RoofError::InvalidInput(format!("setting {x} signals to the trusted side")));
                    }
                }
            }
        }
        Ok(Self { settings, outcomes, states })
    }

    pub fn trusted_dim(&self) -> usize {
        self.states[0][0].nrows()
    }

    pub fn probability(&self, a: usize, x: usize) -> f64 {
        self.states[x][a].trace().re
    }

    /// Reduced state of the trusted side.
    pub fn reduced(&self) -> CMat {
        self.states[0].iter().fold(CMat::zeros(self.trusted_dim(), self.trusted_dim()), |acc, s| acc + s)
    }
}

/// `P(r|s) = 1/2`, `rho_{r|s} = (1 - r p_D sigma_s) / 4` for settings `(x, z)` or `(x, y, z)`;
/// outcome 0 is `r = +1`.
pub fn noisy_singlet_assemblage(p_d: f64, settings: usize) -> Result<Assemblage> {
    if !(0.0..=1.0).contains(&p_d) {
        return Err(RoofError::InvalidInput(format!("p_D = {p_d} outside [0, 1]")));
    }
    let paulis = match settings {
        2 => vec![pauli_x(), pauli_z()],
        3 => vec![pauli_x(), pauli_y(), pauli_z()],
        _ => return Err(RoofError::InvalidInput(format!("{settings} settings; expected 2 or 3"))),
    };
    let one = CMat::identity(2, 2);
    let states = paulis
        .iter()
        .map(|s| [1.0, -1.0].iter().map(|r| (&one - s * c(r * p_d, 0.0)) * c(0.25, 0.0)).collect())
        .collect();
    Assemblage::new(states)
}

/// Projector `M_{a|x}` as `(x, a)`.
pub type Letter = (usize, usize);
pub type Word = Vec<Letter>;

/// Reduces a word with `M_{a|x} M_{a'|x} = delta_{aa'} M_{a|x}`; `None` is the zero operator.
pub fn reduce_word(w: &[Letter]) -> Option<Word> {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        match out.last() {
            Some(&last) if last.0 == l.0 => {
                if last.1 != l.1 {
                    return None;
                }
            }
            _ => out.push(l),
        }
    }
    Some(out)
}

pub fn adjoint_word(w: &[Letter]) -> Word {
    w.iter().rev().copied().collect()
}

/// Generating operator set of the moment matrix.
#[derive(Debug, Clone)]
pub struct WordSet {
    pub words: Vec<Word>,
    /// Distinct reduced products `j^dagger i`.
    pub moments: Vec<Word>,
    /// `products[j][i]`: index into `moments` of `j^dagger i`, `None` when it vanishes.
    pub products: Vec<Vec<Option<usize>>>,
}

impl WordSet {
    pub fn new(words: Vec<Word>) -> Result<Self> {
        let mut unique: Vec<Word> = Vec::new();
        for w in words {
            let r = reduce_word(&w).ok_or_else(|| RoofError::InvalidInput("generating word is zero".into()))?;
            if !unique.contains(&r) {
                unique.push(r);
            }
        }
        if !unique.iter().any(|w| w.is_empty()) {
            return Err(RoofError::InvalidInput("word set must contain the identity".into()));
        }
        let mut index: HashMap<Word, usize> = HashMap::new();
        let mut moments: Vec<Word> = Vec::new();
        let mut intern = |w: Word, moments: &mut Vec<Word>| -> usize {
            *index.entry(w.clone()).or_insert_with(|| {
                moments.push(w);
                moments.len() - 1
            })
        };
        intern(Vec::new(), &mut moments);
        let products = unique
            .iter()
            .map(|j| {
                unique
                    .iter()
                    .map(|i| {
                        let mut w = adjoint_word(j);
                        w.extend_from_slice(i);
                        reduce_word(&w).map(|r| intern(r, &mut moments))
                    })
                    .collect()
            })
            .collect();
        Ok(Self { words: unique, moments, products })
    }

    /// `{1} u {M_{a|x}}_{a < n_a - 1}`, plus products of two letters from different settings at level 2.
    pub fn level(settings: usize, outcomes: usize, level: usize) -> Result<Self> {
        if level == 0 || level > 2 {
            return Err(RoofError::InvalidInput(format!("word level {level}; expected 1 or 2")));
        }
        let letters: Vec<Letter> = (0..settings).flat_map(|x| (0..outcomes - 1).map(move |a| (x, a))).collect();
        let mut words: Vec<Word> = vec![Vec::new()];
        words.extend(letters.iter().map(|&l| vec![l]));
        if level == 2 {
            for &l in &letters {
                for &m in &letters {
                    if l.0 != m.0 {
                        words.push(vec![l, m]);
                    }
                }
            }
        }
        Self::new(words)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn moment_index(&self, w: &[Letter]) -> Option<usize> {
        self.moments.iter().position(|m| m.as_slice() == w)
    }

    pub fn adjoint_index(&self, k: usize) -> Option<usize> {
        self.moment_index(&adjoint_word(&self.moments[k]))
    }

    /// Moments fixed in the single-copy marginal by the assemblage: the identity and single letters.
    pub fn data_moments(&self) -> Vec<usize> {
        (0..self.moments.len()).filter(|&k| self.moments[k].len() <= 1).collect()
    }
}

/// Entry `(u, u', b, c)`: element `(b, c)` of `tr_{A A'}[(u (x) u') omega]` on the trusted pair.
type Key = (usize, usize, usize, usize);

/// Real parametrization of the two-copy moments, identified under copy swap and conjugation.
struct MomentModel {
    adj: Vec<usize>,
    dt: usize,
    params: HashMap<Key, (usize, Option<usize>)>,
    nvars: usize,
}

impl MomentModel {
    fn swap_pair(&self, b: usize) -> usize {
        (b % self.dt) * self.dt + b / self.dt
    }

    fn conj(&self, k: Key) -> Key {
        (self.adj[k.0], self.adj[k.1], k.3, k.2)
    }

    fn swap(&self, k: Key) -> Key {
        (k.1, k.0, self.swap_pair(k.2), self.swap_pair(k.3))
    }

    /// Entry as a linear form in the real parameters.
    fn form(&mut self, k: Key) -> Vec<(usize, Complex64)> {
        let s = self.swap(k);
        let orbit = [(k, false), (self.conj(k), true), (s, false), (self.conj(s), true)];
        let &(rep, conjugated) = orbit.iter().min_by_key(|(key, _)| *key).expect("nonempty orbit");
        let real = self.conj(rep) == rep || self.conj(self.swap(rep)) == rep;
        let nvars = &mut self.nvars;
        let &mut (re, im) = self.params.entry(rep).or_insert_with(|| {
            let re = *nvars;
            *nvars += 1;
            let im = if real {
                None
            } else {
                *nvars += 1;
                Some(re + 1)
            };
            (re, im)
        });
        let mut out = vec![(re, c(1.0, 0.0))];
        if let Some(im) = im {
            out.push((im, if conjugated { c(0.0, -1.0) } else { c(0.0, 1.0) }));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SteeringOptions {
    /// Factor between the reported bound and the linear entropy.
    pub scale: f64,
    pub program: ProgramOptions,
}

impl Default for SteeringOptions {
    fn default() -> Self {
        Self { scale: 2.0, program: ProgramOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SteeringProgram {
    pub assemblage: Assemblage,
    pub words: WordSet,
    pub affine: AffineProgram,
    pub chi_dim: usize,
    pub scale: f64,
    /// Real parameters before elimination of the data rows.
    pub open_params: usize,
}

impl SteeringProgram {
    /// Compiled standard-form problem.
    pub fn to_sdp(&self) -> Result<SdpProblem> {
        Ok(self.affine.compile().map_err(map_solver_error)?.problem)
    }
}

/// Moment program: minimize `scale tr((1 - F) chi_{1,1})` over `chi >= 0`, `chi^{T_1} >= 0`
/// with the single-copy moments fixed by the assemblage.
pub fn build_steering_program(assemblage: &Assemblage, words: &WordSet, scale: f64) -> Result<SteeringProgram> {
    let ident = words
        .moment_index(&[])
        .ok_or_else(|| RoofError::InvalidInput("word set must contain the identity".into()))?;
    if !words.words.iter().any(|w| w.is_empty()) {
        return Err(RoofError::InvalidInput("word set must contain the identity".into()));
    }
    for w in &words.words {
        if w.iter().any(|&(x, a)| x >= assemblage.settings || a >= assemblage.outcomes) {
            return Err(RoofError::InvalidInput("word refers to a measurement outside the assemblage".into()));
        }
    }
    let adj: Vec<usize> = (0..words.moments.len())
        .map(|k| words.adjoint_index(k).ok_or_else(|| RoofError::Internal("moment set not closed under adjoints".into())))
        .collect::<Result<_>>()?;
    let dt = assemblage.trusted_dim();
    let d2 = dt * dt;
    let nw = words.len();
    let dim = nw * nw * d2;
    let mut model = MomentModel { adj, dt, params: HashMap::new(), nvars: 0 };

    let chi_entry = |model: &mut MomentModel, r: usize, s: usize| -> Vec<(usize, Complex64)> {
        let (i, ip, b) = (r / (nw * d2), (r / d2) % nw, r % d2);
        let (j, jp, cc) = (s / (nw * d2), (s / d2) % nw, s % d2);
        match (words.products[j][i], words.products[jp][ip]) {
            (Some(u), Some(up)) => model.form((u, up, b, cc)),
            _ => Vec::new(),
        }
    };
    let pt_index = |r: usize, s: usize| -> (usize, usize) {
        let (i, ip, b) = (r / (nw * d2), (r / d2) % nw, r % d2);
        let (j, jp, cc) = (s / (nw * d2), (s / d2) % nw, s % d2);
        let (b1, b2, c1, c2) = (b / dt, b % dt, cc / dt, cc % dt);
        let row = (j * nw + ip) * d2 + c1 * dt + b2;
        let col = (i * nw + jp) * d2 + b1 * dt + c2;
        (row, col)
    };

    let mut plain: HashMap<usize, Vec<(usize, usize, Complex64)>> = HashMap::new();
    let mut transposed: HashMap<usize, Vec<(usize, usize, Complex64)>> = HashMap::new();
    for r in 0..dim {
        for s in r..dim {
            for (p, v) in chi_entry(&mut model, r, s) {
                plain.entry(p).or_default().push((r, s, v));
            }
            let (pr, ps) = pt_index(r, s);
            for (p, v) in chi_entry(&mut model, pr, ps) {
                transposed.entry(p).or_default().push((r, s, v));
            }
        }
    }

    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for &w in &words.data_moments() {
        let target = match words.moments[w].as_slice() {
            [] => assemblage.reduced(),
            [(x, a)] => assemblage.states[*x][*a].clone(),
            _ => unreachable!(),
        };
        for b in 0..dt {
            for cc in 0..dt {
                let mut acc: HashMap<usize, Complex64> = HashMap::new();
                for bp in 0..dt {
                    for (p, v) in model.form((w, ident, b * dt + bp, cc * dt + bp)) {
                        *acc.entry(p).or_insert(c(0.0, 0.0)) += v;
                    }
                }
                let t = target[(b, cc)];
                rows.push((acc.iter().filter(|(_, v)| v.re != 0.0).map(|(&p, v)| (p, v.re)).collect(), t.re));
                rows.push((acc.iter().filter(|(_, v)| v.im != 0.0).map(|(&p, v)| (p, v.im)).collect(), t.im));
            }
        }
    }

    let mut objective: HashMap<usize, f64> = HashMap::new();
    for b in 0..d2 {
        for (p, v) in model.form((ident, ident, b, b)) {
            *objective.entry(p).or_insert(0.0) += scale * v.re;
        }
        for (p, v) in model.form((ident, ident, b, model.swap_pair(b))) {
            *objective.entry(p).or_insert(0.0) -= scale * v.re;
        }
    }

    let mut prog = AffineProgram::new(model.nvars, Sense::Min);
    let b0 = prog.add_block(dim);
    let b1 = prog.add_block(dim);
    let mut keys: Vec<usize> = plain.keys().chain(transposed.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    for p in keys {
        if let Some(t) = plain.remove(&p) {
            prog.add_block_term(b0, p, SparseHerm::from_triplets(dim, t));
        }
        if let Some(t) = transposed.remove(&p) {
            prog.add_block_term(b1, p, SparseHerm::from_triplets(dim, t));
        }
    }
    for (coeffs, rhs) in rows {
        if coeffs.is_empty() {
            if rhs.abs() > ASSEMBLAGE_TOL {
                return Err(RoofError::Infeasible);
            }
            continue;
        }
        prog.add_equality(coeffs, rhs);
    }
    let mut obj: Vec<(usize, f64)> = objective.into_iter().filter(|(_, v)| *v != 0.0).collect();
    obj.sort_unstable_by_key(|&(p, _)| p);
    prog.set_objective(obj, 0.0);
    Ok(SteeringProgram {
        assemblage: assemblage.clone(),
        words: words.clone(),
        open_params: model.nvars,
        affine: prog,
        chi_dim: dim,
        scale,
    })
}

#[derive(Debug, Clone)]
pub struct SteeringResult {
    /// `max(raw_value, 0)`.
    pub value: f64,
    pub raw_value: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub status: Status,
    pub scale: f64,
    pub free_params: usize,
    pub kkt: Option<KktReport>,
    pub seconds: f64,
    /// Optimal two-copy moment matrix, ordered `(word, word', trusted, trusted')`.
    pub chi: CMat,
    pub words: usize,
}

impl SteeringResult {
    /// Bound on the linear entropy of entanglement itself.
    pub fn linear_entropy(&self) -> f64 {
        self.value / self.scale
    }
}

pub fn solve_steering(program: &SteeringProgram, opts: &ProgramOptions) -> Result<SteeringResult> {
    let start = Instant::now();
    let compiled = program.affine.compile().map_err(map_solver_error)?;
    if compiled.free_params() > opts.max_free_params {
        return Err(RoofError::DimensionCap(format!(
            "{} free parameters exceed the cap {}",
            compiled.free_params(),
            opts.max_free_params
        )));
    }
    let sol = compiled.solve(&program.affine, &opts.solver()).map_err(map_solver_error)?;
    if sol.status == Status::Infeasible {
        return Err(RoofError::Infeasible);
    }
    let kkt = sol.sdp.as_ref().map(|s| verify_kkt(&compiled.problem, s, opts.tol));
    let chi = program.affine.evaluate_blocks(&sol.x).swap_remove(0);
    Ok(SteeringResult {
        value: sol.value.max(0.0),
        raw_value: sol.value,
        dual_bound: sol.dual_bound,
        gap: sol.gap,
        status: sol.status,
        scale: program.scale,
        free_params: sol.free_params,
        kkt,
        seconds: start.elapsed().as_secs_f64(),
        chi,
        words: program.words.len(),
    })
}

/// Lower bound (times `scale`) on the linear entropy of any state producing the assemblage.
pub fn steering_bound(assemblage: &Assemblage, words: &WordSet, opts: SteeringOptions) -> Result<SteeringResult> {
    let program = build_steering_program(assemblage, words, opts.scale)?;
    solve_steering(&program, &opts.program)
}

/// Swap of `(word, trusted)` between the two copies on the moment-matrix index space.
pub fn copy_swap(words: usize, trusted: usize) -> CMat {
    let d2 = trusted * trusted;
    let dim = words * words * d2;
    let mut f = CMat::zeros(dim, dim);
    for i in 0..words {
        for ip in 0..words {
            for b1 in 0..trusted {
                for b2 in 0..trusted {
                    let r = (i * words + ip) * d2 + b1 * trusted + b2;
                    let s = (ip * words + i) * d2 + b2 * trusted + b1;
                    f[(s, r)] = c(1.0, 0.0);
                }
            }
        }
    }
    f
}
