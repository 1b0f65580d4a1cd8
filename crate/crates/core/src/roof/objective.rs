//! Multi-copy objective operators as sums of product terms and rank-one terms.

use num_complex::Complex64;

use crate::error::{Result, RoofError};
use crate::roof::frame::Frame;
use crate::symmetric::{factorial, permutations, symmetrize_copies, SymBasis};
use crate::tensor::{c, kron_all, CMat, CVec, HermitianOp, ProductSpace};

#[derive(Debug, Clone)]
pub enum CopyTerm {
    /// `coeff * F_1 (x) ... (x) F_k (x) 1 ...`; missing trailing factors are identities.
    Product { coeff: f64, factors: Vec<CMat> },
    /// `coeff * |v><v|` on all copies.
    Projector { coeff: f64, vector: CVec },
}

/// Hermitian operator on `copies` copies of a `local_dim`-dimensional space.
/// Only its compression to the symmetric subspace is ever used.
#[derive(Debug, Clone)]
pub struct MultiCopyOp {
    pub local_dim: usize,
    pub copies: usize,
    pub terms: Vec<CopyTerm>,
}

pub const DENSE_CAP: usize = 4096;

impl MultiCopyOp {
    pub fn new(local_dim: usize, copies: usize) -> Self {
        Self { local_dim, copies, terms: Vec::new() }
    }

    pub fn push_product(&mut self, coeff: f64, factors: Vec<CMat>) {
        debug_assert!(factors.len() <= self.copies);
        self.terms.push(CopyTerm::Product { coeff, factors });
    }

    pub fn push_projector(&mut self, coeff: f64, vector: CVec) {
        debug_assert_eq!(vector.len(), self.local_dim.pow(self.copies as u32));
        self.terms.push(CopyTerm::Projector { coeff, vector });
    }

    pub fn push_identity(&mut self, coeff: f64) {
        self.push_product(coeff, Vec::new());
    }

    pub fn scaled(&self, s: f64) -> MultiCopyOp {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                CopyTerm::Product { coeff, factors } => CopyTerm::Product { coeff: coeff * s, factors: factors.clone() },
                CopyTerm::Projector { coeff, vector } => CopyTerm::Projector { coeff: coeff * s, vector: vector.clone() },
            })
            .collect();
        MultiCopyOp { local_dim: self.local_dim, copies: self.copies, terms }
    }

    pub fn plus(mut self, other: &MultiCopyOp) -> Result<MultiCopyOp> {
        if self.local_dim != other.local_dim || self.copies != other.copies {
            return Err(RoofError::DimensionMismatch("objective terms on different spaces".into()));
        }
        self.terms.extend(other.terms.iter().cloned());
        Ok(self)
    }

    /// Same operator on more copies, acting trivially on the extra ones.
    pub fn padded(&self, copies: usize) -> Result<MultiCopyOp> {
        if copies < self.copies {
            return Err(RoofError::InvalidInput("cannot pad to fewer copies".into()));
        }
        if copies > self.copies && self.terms.iter().any(|t| matches!(t, CopyTerm::Projector { .. })) {
            return Err(RoofError::InvalidInput("rank-one objective terms cannot be padded".into()));
        }
        Ok(MultiCopyOp { local_dim: self.local_dim, copies, terms: self.terms.clone() })
    }

    /// Expresses every factor in frame coordinates.
    pub fn reduced(&self, frame: &Frame) -> MultiCopyOp {
        let r = frame.dim();
        let wd = frame.basis.adjoint();
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                CopyTerm::Product { coeff, factors } => {
                    CopyTerm::Product { coeff: *coeff, factors: factors.iter().map(|f| frame.reduce(f)).collect() }
                }
                CopyTerm::Projector { coeff, vector } => {
                    let mut v = vector.clone();
                    let mut dims = vec![self.local_dim; self.copies];
                    for k in 0..self.copies {
                        v = apply_mode(&v, &dims, k, &wd);
                        dims[k] = r;
                    }
                    CopyTerm::Projector { coeff: *coeff, vector: v }
                }
            })
            .collect();
        MultiCopyOp { local_dim: r, copies: self.copies, terms }
    }

    /// Dense operator on the full `local_dim^copies` space.
    pub fn dense(&self) -> Result<CMat> {
        let n = self.local_dim.pow(self.copies as u32);
        if n > DENSE_CAP {
            return Err(RoofError::DimensionCap(format!("dense multi-copy operator of dimension {n}")));
        }
        let id = CMat::identity(self.local_dim, self.local_dim);
        let mut out = CMat::zeros(n, n);
        for t in &self.terms {
            match t {
                CopyTerm::Product { coeff, factors } => {
                    let refs: Vec<&CMat> = (0..self.copies).map(|k| factors.get(k).unwrap_or(&id)).collect();
                    out += kron_all(&refs) * c(*coeff, 0.0);
                }
                CopyTerm::Projector { coeff, vector } => out += vector * vector.adjoint() * c(*coeff, 0.0),
            }
        }
        Ok(out)
    }

    /// Dense operator averaged over copy permutations.
    pub fn dense_symmetrized(&self) -> Result<CMat> {
        Ok(symmetrize_copies(&self.dense()?, self.local_dim, self.copies))
    }

    pub fn to_hermitian(&self, space: &ProductSpace) -> Result<HermitianOp> {
        HermitianOp::from_hermitian_part(space.copies(self.copies), &self.dense_symmetrized()?)
    }

    /// `<psi|^{(x) N} L |psi>^{(x) N}`.
    pub fn power_expectation(&self, psi: &[Complex64]) -> f64 {
        let mut total = 0.0;
        for t in &self.terms {
            match t {
                CopyTerm::Product { coeff, factors } => {
                    let v = CVec::from_column_slice(psi);
                    let mut prod = c(1.0, 0.0);
                    for f in factors {
                        prod *= (v.adjoint() * f * &v)[(0, 0)];
                    }
                    let norm2 = v.norm_squared();
                    total += coeff * prod.re * norm2.powi((self.copies - factors.len()) as i32);
                }
                CopyTerm::Projector { coeff, vector } => {
                    let mut p = CVec::from_column_slice(psi);
                    for _ in 1..self.copies {
                        p = p.kronecker(&CVec::from_column_slice(psi));
                    }
                    total += coeff * vector.dotc(&p).norm_sqr();
                }
            }
        }
        total
    }

    /// Compression `<s_p| L |s_q>` onto the symmetric subspace of `basis`.
    pub fn sym_matrix(&self, basis: &SymBasis) -> CMat {
        let s = basis.sym_dim();
        let n = basis.copies();
        let mut out = CMat::zeros(s, s);
        let arr: Vec<Vec<Vec<usize>>> = (0..s).map(|k| basis.arrangements(k)).collect();
        let coef: Vec<f64> = (0..s).map(|k| basis.coefficient(k)).collect();
        let products: Vec<(f64, &Vec<CMat>)> = self
            .terms
            .iter()
            .filter_map(|t| match t {
                CopyTerm::Product { coeff, factors } => Some((*coeff, factors)),
                _ => None,
            })
            .collect();
        if !products.is_empty() {
            for p in 0..s {
                for q in p..s {
                    let mut acc = c(0.0, 0.0);
                    for a in &arr[p] {
                        for b in &arr[q] {
                            for (coeff, factors) in &products {
                                let mut prod = c(*coeff, 0.0);
                                for k in 0..n {
                                    let f = match factors.get(k) {
                                        Some(f) => f[(a[k], b[k])],
                                        None if a[k] == b[k] => c(1.0, 0.0),
                                        None => c(0.0, 0.0),
                                    };
                                    if f == c(0.0, 0.0) {
                                        prod = f;
                                        break;
                                    }
                                    prod *= f;
                                }
                                acc += prod;
                            }
                        }
                    }
                    acc *= coef[p] * coef[q];
                    out[(p, q)] = acc;
                    if p != q {
                        out[(q, p)] = acc.conj();
                    } else {
                        out[(p, p)] = c(acc.re, 0.0);
                    }
                }
            }
        }
        for t in &self.terms {
            if let CopyTerm::Projector { coeff, vector } = t {
                let h: Vec<Complex64> = (0..s)
                    .map(|k| arr[k].iter().map(|a| vector[basis.flat_index(a)]).sum::<Complex64>() * coef[k])
                    .collect();
                for p in 0..s {
                    for q in 0..s {
                        out[(p, q)] += h[p] * h[q].conj() * *coeff;
                    }
                }
            }
        }
        out
    }
}

/// Applies `m` (`r x d`) to tensor mode `k` of a vector with mode sizes `dims`.
pub fn apply_mode(v: &CVec, dims: &[usize], k: usize, m: &CMat) -> CVec {
    let outer: usize = dims[..k].iter().product();
    let inner: usize = dims[k + 1..].iter().product();
    let (r, d) = (m.nrows(), dims[k]);
    let mut out = CVec::zeros(outer * r * inner);
    for o in 0..outer {
        for i in 0..inner {
            for a in 0..r {
                let mut s = c(0.0, 0.0);
                for b in 0..d {
                    s += m[(a, b)] * v[(o * d + b) * inner + i];
                }
                out[(o * r + a) * inner + i] = s;
            }
        }
    }
    out
}

/// Single-copy factor pairs whose sum is the flip of `parties` between two copies:
/// `sum |x><y| (x) 1 on copy 1, |y><x| (x) 1 on copy 2`.
pub fn flip_factor_pairs(space: &ProductSpace, parties: &[usize]) -> Vec<(CMat, CMat)> {
    let sub: usize = parties.iter().map(|&p| space.party_dims()[p]).product();
    let mut out = Vec::with_capacity(sub * sub);
    for x in 0..sub {
        for y in 0..sub {
            out.push((local_unit(space, parties, x, y), local_unit(space, parties, y, x)));
        }
    }
    out
}

/// `|x><y|` on the joint index of `parties`, identity elsewhere.
pub fn local_unit(space: &ProductSpace, parties: &[usize], x: usize, y: usize) -> CMat {
    let dims = space.party_dims();
    let sub_dims: Vec<usize> = parties.iter().map(|&p| dims[p]).collect();
    let split = |mut idx: usize| {
        let mut d = vec![0; parties.len()];
        for k in (0..parties.len()).rev() {
            d[k] = idx % sub_dims[k];
            idx /= sub_dims[k];
        }
        d
    };
    let (dx, dy) = (split(x), split(y));
    let n = space.total_dim();
    let mut m = CMat::zeros(n, n);
    for col in 0..n {
        let digits = space.digits(col);
        if parties.iter().zip(&dy).all(|(&p, &v)| digits[p] == v) {
            let mut rd = digits.clone();
            for (&p, &v) in parties.iter().zip(&dx) {
                rd[p] = v;
            }
            let row = rd.iter().zip(dims).fold(0, |acc, (&a, &d)| acc * d + a);
            m[(row, col)] = c(1.0, 0.0);
        }
    }
    m
}

/// Two-copy `A (x) 1 = (1 - F) (x) 1` with the flip acting on `parties`:
/// expectation `1 - tr(rho_parties^2)` on `psi (x) psi`.
pub fn linear_entropy_objective(space: &ProductSpace, parties: &[usize]) -> MultiCopyOp {
    let mut op = MultiCopyOp::new(space.total_dim(), 2);
    op.push_identity(1.0);
    for (a, b) in flip_factor_pairs(space, parties) {
        op.push_product(-1.0, vec![a, b]);
    }
    op
}

/// Antisymmetrizer of `parties` over `k` copies, identity on the rest:
/// expectation `e_k` of the reduced spectrum on `psi^{(x) k}`.
pub fn antisymmetrizer_objective(space: &ProductSpace, parties: &[usize], k: usize) -> MultiCopyOp {
    let sub: usize = parties.iter().map(|&p| space.party_dims()[p]).product();
    let mut op = MultiCopyOp::new(space.total_dim(), k);
    if k > sub {
        return op;
    }
    let norm = 1.0 / factorial(k);
    let tuples = sub.pow(k as u32);
    let units: Vec<Vec<CMat>> = (0..sub).map(|x| (0..sub).map(|y| local_unit(space, parties, x, y)).collect()).collect();
    for (perm, sign) in permutations(k) {
        for t in 0..tuples {
            let mut a = vec![0; k];
            let mut rest = t;
            for j in (0..k).rev() {
                a[j] = rest % sub;
                rest /= sub;
            }
            // Copy j's value moves to slot perm[j].
            let mut out = vec![0; k];
            for j in 0..k {
                out[perm[j]] = a[j];
            }
            let factors = (0..k).map(|j| units[out[j]][a[j]].clone()).collect();
            op.push_product(sign * norm, factors);
        }
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::{antisymmetrizer, flip_matrix};
    use crate::tensor::{kron_mat, max_abs, random_haar_ket};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flip_pairs_sum_to_subsystem_flip() {
        let space = ProductSpace::bipartite(2, 3);
        let op = linear_entropy_objective(&space, &[0]);
        let dense = op.dense().unwrap();
        let fa = flip_matrix(2);
        let id3 = CMat::identity(3, 3);
        // Reorder (A B A' B') -> (A A' B B') and compare.
        let mut expect = CMat::zeros(36, 36);
        for i in 0..36 {
            for j in 0..36 {
                let di = [i / 18, (i / 6) % 3, (i / 3) % 2, i % 3];
                let dj = [j / 18, (j / 6) % 3, (j / 3) % 2, j % 3];
                let a = fa[(di[0] * 2 + di[2], dj[0] * 2 + dj[2])];
                let b = kron_mat(&id3, &id3)[(di[1] * 3 + di[3], dj[1] * 3 + dj[3])];
                expect[(i, j)] = a * b;
            }
        }
        assert!(max_abs(&(dense - (CMat::identity(36, 36) - expect))) < 1e-14);
    }

    #[test]
    fn sym_matrix_matches_dense_compression() {
        let space = ProductSpace::bipartite(2, 2);
        let op = linear_entropy_objective(&space, &[1]);
        let basis = SymBasis::new(4, 2).unwrap();
        let a = op.sym_matrix(&basis);
        let b = basis.compress(&op.dense().unwrap()).unwrap();
        assert!(max_abs(&(a - b)) < 1e-13);
    }

    #[test]
    fn antisymmetrizer_objective_matches_projector() {
        let space = ProductSpace::new(vec![3]).unwrap();
        let op = antisymmetrizer_objective(&space, &[0], 3);
        assert!(max_abs(&(op.dense().unwrap() - antisymmetrizer(3, 3).matrix())) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_haar_ket(&ProductSpace::bipartite(3, 3), &mut rng);
        let sp = ProductSpace::bipartite(3, 3);
        let r3 = antisymmetrizer_objective(&sp, &[0], 3);
        let basis = SymBasis::new(9, 3).unwrap();
        let sym = r3.sym_matrix(&basis);
        let v = basis.power_vector(psi.amplitudes().as_slice());
        let vv = CVec::from_vec(v);
        let via_sym = (vv.adjoint() * &sym * &vv)[(0, 0)].re;
        assert!((via_sym - r3.power_expectation(psi.amplitudes().as_slice())).abs() < 1e-12);
    }

    #[test]
    fn reduced_projector_term_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = CVec::from_fn(9, |_, _| crate::tensor::complex_gaussian(&mut rng));
        let mut op = MultiCopyOp::new(3, 2);
        op.push_projector(2.0, v);
        let frame = Frame {
            space: ProductSpace::new(vec![3]).unwrap(),
            basis: crate::tensor::random_unitary(3, &mut rng).columns(0, 2).into_owned(),
            charges: vec![vec![], vec![]],
        };
        let red = op.reduced(&frame);
        let w2 = kron_mat(&frame.basis, &frame.basis);
        let expect = w2.adjoint() * op.dense().unwrap() * &w2;
        assert!(max_abs(&(red.dense().unwrap() - expect)) < 1e-12);
    }
}
