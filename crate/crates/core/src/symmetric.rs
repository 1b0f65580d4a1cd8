//! Symmetric subspace of `N` copies of a `d`-dimensional space in the
//! occupation (multiset) basis, plus flip and antisymmetrizer operators.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Result, RoofError};
use crate::tensor::{c, CMat, HermitianOp, ProductSpace};

pub const SYM_DIM_CAP: usize = 5000;

#[derive(Debug, Clone)]
pub struct SymBasis {
    d: usize,
    n: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r.min(usize::MAX as u128) as usize
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// All permutations of `0..n` with their signs, in lexicographic order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push((p.clone(), permutation_sign(&p)));
        if !next_permutation(&mut p) {
            break;
        }
    }
    out
}

pub fn permutation_sign(p: &[usize]) -> f64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1.0;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Advances to the next lexicographic permutation; false when wrapped around.
pub fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn multisets(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(d: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for a in start..d {
            cur.push(a);
            rec(d, n, a, cur, out);
            cur.pop();
        }
    }
    rec(d, n, 0, &mut cur, &mut out);
    out
}

impl SymBasis {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(RoofError::InvalidInput("symmetric basis needs d, N >= 1".into()));
        }
        let s = binomial(d + n - 1, n);
        if s > SYM_DIM_CAP {
            return Err(RoofError::DimensionCap(format!("symmetric dimension {s} exceeds {SYM_DIM_CAP}")));
        }
        let states = multisets(d, n);
        let index = states.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
        Ok(Self { d, n, states, index })
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn copies(&self) -> usize {
        self.n
    }

    pub fn sym_dim(&self) -> usize {
        self.states.len()
    }

    pub fn full_dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn state(&self, k: usize) -> &[usize] {
        &self.states[k]
    }

    pub fn index_of(&self, multiset: &[usize]) -> Option<usize> {
        self.index.get(multiset).copied()
    }

    /// Index of the symmetric state containing the product tuple `digits`.
    pub fn index_of_tuple(&self, digits: &[usize]) -> usize {
        let mut s = digits.to_vec();
        s.sort_unstable();
        self.index[&s]
    }

    pub fn arrangement_count(&self, k: usize) -> usize {
        let s = &self.states[k];
        let mut count = factorial(self.n);
        let mut run = 1;
        for i in 1..=s.len() {
            if i < s.len() && s[i] == s[i - 1] {
                run += 1;
            } else {
                count /= factorial(run);
                run = 1;
            }
        }
        count.round() as usize
    }

    /// Amplitude of each product tuple in the normalized symmetric state `k`.
    pub fn coefficient(&self, k: usize) -> f64 {
        1.0 / (self.arrangement_count(k) as f64).sqrt()
    }

    /// Distinct orderings of the multiset `k`.
    pub fn arrangements(&self, k: usize) -> Vec<Vec<usize>> {
        let mut p = self.states[k].clone();
        let mut out = vec![p.clone()];
        while next_permutation(&mut p) {
            out.push(p.clone());
        }
        out
    }

    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &a| acc * self.d + a)
    }

    fn check_dense(&self) -> Result<()> {
        let rows = self.d.checked_pow(self.n as u32).unwrap_or(usize::MAX);
        if rows.saturating_mul(self.sym_dim()) > 50_000_000 {
            return Err(RoofError::DimensionCap(format!("dense isometry {rows}x{} too large", self.sym_dim())));
        }
        Ok(())
    }

    /// `V`: columns are the normalized symmetric states in product coordinates.
    pub fn isometry(&self) -> Result<CMat> {
        self.check_dense()?;
        let mut v = CMat::zeros(self.full_dim(), self.sym_dim());
        for k in 0..self.sym_dim() {
            let coef = self.coefficient(k);
            for a in self.arrangements(k) {
                v[(self.flat_index(&a), k)] = c(coef, 0.0);
            }
        }
        Ok(v)
    }

    pub fn projector(&self) -> Result<CMat> {
        let v = self.isometry()?;
        Ok(&v * v.adjoint())
    }

    /// `V^dagger X V`.
    pub fn compress(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.full_dim() || x.ncols() != self.full_dim() {
            return Err(RoofError::DimensionMismatch(format!(
                "operator is {}x{}, expected {}",
                x.nrows(),
                x.ncols(),
                self.full_dim()
            )));
        }
        let v = self.isometry()?;
        Ok(v.adjoint() * x * &v)
    }

    /// `V Y V^dagger`.
    pub fn embed(&self, y: &CMat) -> Result<CMat> {
        if y.nrows() != self.sym_dim() || y.ncols() != self.sym_dim() {
            return Err(RoofError::DimensionMismatch(format!(
                "operator is {}x{}, expected {}",
                y.nrows(),
                y.ncols(),
                self.sym_dim()
            )));
        }
        let v = self.isometry()?;
        Ok(&v * y * v.adjoint())
    }

    /// Symmetric-coordinate vector of `psi^{(x) N}`.
    pub fn power_vector(&self, psi: &[Complex64]) -> Vec<Complex64> {
        (0..self.sym_dim())
            .map(|k| {
                let s = &self.states[k];
                let prod = s.iter().fold(c(1.0, 0.0), |acc, &a| acc * psi[a]);
                prod * (self.arrangement_count(k) as f64).sqrt()
            })
            .collect()
    }
}

pub fn build_sym_isometry(d: usize, n: usize) -> Result<SymBasis> {
    SymBasis::new(d, n)
}

pub fn flip_matrix(d: usize) -> CMat {
    let mut f = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = c(1.0, 0.0);
        }
    }
    f
}

pub fn flip_operator(d: usize) -> HermitianOp {
    let d = d.max(1);
    HermitianOp::new(ProductSpace::bipartite(d, d), flip_matrix(d)).expect("flip is Hermitian")
}

/// `1 - F`, twice the projector onto the antisymmetric subspace.
pub fn antisym_projector_pair(d: usize) -> HermitianOp {
    let d = d.max(1);
    let m = CMat::identity(d * d, d * d) - flip_matrix(d);
    HermitianOp::new(ProductSpace::bipartite(d, d), m).expect("1 - F is Hermitian")
}

/// Copy-permutation operator `P|a_1..a_k> = |a_{p^{-1}(1)}..>`: copy `j` moves to slot `p[j]`.
pub fn copy_permutation(d: usize, perm: &[usize]) -> CMat {
    let k = perm.len();
    let n = d.pow(k as u32);
    let space = ProductSpace::new(vec![d; k]).expect("valid space");
    let mut m = CMat::zeros(n, n);
    for col in 0..n {
        let digits = space.digits(col);
        let mut out = vec![0; k];
        for j in 0..k {
            out[perm[j]] = digits[j];
        }
        let row = out.iter().fold(0, |acc, &a| acc * d + a);
        m[(row, col)] = c(1.0, 0.0);
    }
    m
}

/// Orthogonal projector onto the antisymmetric subspace of `k` copies.
pub fn antisymmetrizer(d: usize, k: usize) -> HermitianOp {
    let d = d.max(1);
    let k = k.max(1);
    let n = d.pow(k as u32);
    let mut m = CMat::zeros(n, n);
    if k <= d {
        for (p, sign) in permutations(k) {
            m += copy_permutation(d, &p) * c(sign, 0.0);
        }
        m /= c(factorial(k), 0.0);
    }
    HermitianOp::new(ProductSpace::new(vec![d; k]).expect("valid space"), m).expect("antisymmetrizer is Hermitian")
}

/// Average of `P op P^dagger` over all copy permutations.
pub fn symmetrize_copies(op: &CMat, d: usize, k: usize) -> CMat {
    let perms = permutations(k);
    let mut out = CMat::zeros(op.nrows(), op.ncols());
    for (p, _) in &perms {
        let pm = copy_permutation(d, p);
        out += &pm * op * pm.adjoint();
    }
    out / c(perms.len() as f64, 0.0)
}
