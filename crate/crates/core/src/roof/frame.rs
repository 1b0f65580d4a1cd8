//! Single-copy coordinate frames for the multi-copy programs.
//!
//! A frame is an isometry `W` from reduced coordinates into the single-copy
//! space whose columns carry integer charges under a torus of local diagonal
//! phases leaving every data operator invariant. Program variables are then
//! block diagonal by total charge.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use crate::tensor::{c, eig_hermitian_mat, CMat, ProductSpace};

pub const RANGE_THRESHOLD: f64 = 1e-10;
const SUPPORT_TOL: f64 = 1e-12;

pub type Charge = Vec<i64>;

#[derive(Debug, Clone)]
pub struct Frame {
    pub space: ProductSpace,
    /// `D x r` isometry.
    pub basis: CMat,
    /// Charge of each column.
    pub charges: Vec<Charge>,
}

impl Frame {
    pub fn identity(space: &ProductSpace, charges: Vec<Charge>) -> Self {
        let d = space.total_dim();
        Self { space: space.clone(), basis: CMat::identity(d, d), charges }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn full_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_real(&self) -> bool {
        self.basis.iter().all(|z| z.im == 0.0)
    }

    pub fn is_identity(&self) -> bool {
        self.dim() == self.full_dim()
            && (0..self.dim()).all(|j| (0..self.dim()).all(|i| self.basis[(i, j)] == c(if i == j { 1.0 } else { 0.0 }, 0.0)))
    }

    /// `W^dagger O W`.
    pub fn reduce(&self, o: &CMat) -> CMat {
        self.basis.adjoint() * o * &self.basis
    }

    /// `W X W^dagger`.
    pub fn lift(&self, x: &CMat) -> CMat {
        &self.basis * x * self.basis.adjoint()
    }

    pub fn charge_width(&self) -> usize {
        self.charges.first().map_or(0, |q| q.len())
    }

    pub fn without_charges(&self) -> Frame {
        Frame { space: self.space.clone(), basis: self.basis.clone(), charges: vec![vec![]; self.dim()] }
    }

    /// Column groups of equal charge, in order of first appearance.
    pub fn sectors(&self) -> Vec<Vec<usize>> {
        group_by_charge(&self.charges)
    }
}

pub fn group_by_charge(charges: &[Charge]) -> Vec<Vec<usize>> {
    let mut order: Vec<&Charge> = Vec::new();
    let mut groups: BTreeMap<&Charge, Vec<usize>> = BTreeMap::new();
    for (i, q) in charges.iter().enumerate() {
        groups.entry(q).or_insert_with(|| {
            order.push(q);
            Vec::new()
        });
        groups.get_mut(q).expect("inserted").push(i);
    }
    order.iter().map(|q| groups[q].clone()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frac {
    n: i128,
    d: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Frac {
    fn int(n: i128) -> Self {
        Frac { n, d: 1 }
    }
    fn norm(n: i128, d: i128) -> Self {
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Frac { n: s * n / g, d: s * d / g }
    }
    fn is_zero(self) -> bool {
        self.n == 0
    }
    fn sub(self, o: Frac) -> Frac {
        Frac::norm(self.n * o.d - o.n * self.d, self.d * o.d)
    }
    fn mul(self, o: Frac) -> Frac {
        Frac::norm(self.n * o.n, self.d * o.d)
    }
    fn div(self, o: Frac) -> Frac {
        Frac::norm(self.n * o.d, self.d * o.n)
    }
}

/// Integer basis of the null space of an integer matrix, by exact elimination.
fn integer_null_space(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<Frac>> = rows.iter().map(|r| r.iter().map(|&v| Frac::int(v as i128)).collect()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let pv = m[r][col];
        for v in m[r].iter_mut() {
            *v = v.div(pv);
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col];
                for k in 0..ncols {
                    let t = m[r][k].mul(f);
                    m[i][k] = m[i][k].sub(t);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Frac::int(0); ncols];
            v[f] = Frac::int(1);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = Frac::int(0).sub(m[i][f]);
            }
            let l = v.iter().fold(1i128, |acc, x| acc / gcd(acc, x.d) * x.d);
            v.iter().map(|x| (x.n * (l / x.d)) as i64).collect()
        })
        .collect()
}

/// Charges of the standard basis under the largest torus of local diagonal
/// phases that leaves every operator in `ops` invariant. Charges are relative
/// to basis state 0; generators acting trivially are dropped.
pub fn local_phase_charges(space: &ProductSpace, ops: &[&CMat]) -> Vec<Charge> {
    let dims = space.party_dims();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let nunk: usize = dims.iter().sum();
    let n = space.total_dim();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| space.digits(i)).collect();
    let mut rows: BTreeSet<Vec<i64>> = BTreeSet::new();
    for o in ops {
        for j in 0..n {
            for i in 0..j {
                if o[(i, j)].norm() > SUPPORT_TOL || o[(j, i)].norm() > SUPPORT_TOL {
                    let mut row = vec![0i64; nunk];
                    for p in 0..dims.len() {
                        row[offsets[p] + digits[i][p]] += 1;
                        row[offsets[p] + digits[j][p]] -= 1;
                    }
                    if row.iter().any(|&v| v != 0) {
                        rows.insert(row);
                    }
                }
            }
        }
    }
    let rows: Vec<Vec<i64>> = rows.into_iter().collect();
    let gens = integer_null_space(&rows, nunk);
    let raw: Vec<Vec<i64>> = (0..n)
        .map(|i| gens.iter().map(|g| (0..dims.len()).map(|p| g[offsets[p] + digits[i][p]]).sum()).collect())
        .collect();
    let base = raw[0].clone();
    let rel: Vec<Vec<i64>> = raw.iter().map(|q| q.iter().zip(&base).map(|(a, b)| a - b).collect()).collect();
    let keep: Vec<usize> = (0..gens.len()).filter(|&g| rel.iter().any(|q| q[g] != 0)).collect();
    rel.iter().map(|q| keep.iter().map(|&g| q[g]).collect()).collect()
}

/// Splits an operator that is block diagonal in `frame` charges and
/// diagonalizes each block. Returns `(eigenvalue, charge, column in frame coords)`.
fn sector_eigen(frame: &Frame, o_reduced: &CMat) -> Vec<(f64, Charge, Vec<(usize, num_complex::Complex64)>)> {
    let mut out = Vec::new();
    for sector in frame.sectors() {
        let k = sector.len();
        let sub = CMat::from_fn(k, k, |i, j| o_reduced[(sector[i], sector[j])]);
        let (vals, vecs) = eig_hermitian_mat(&sub);
        for (col, &val) in vals.iter().enumerate() {
            let v = (0..k).map(|i| (sector[i], vecs[(i, col)])).collect();
            out.push((val, frame.charges[sector[0]].clone(), v));
        }
    }
    out
}

fn frame_from_columns(frame: &Frame, cols: Vec<(Charge, Vec<(usize, num_complex::Complex64)>)>) -> Frame {
    let r = cols.len();
    let mut w = CMat::zeros(frame.dim(), r);
    let mut charges = Vec::with_capacity(r);
    for (j, (q, col)) in cols.into_iter().enumerate() {
        for (i, v) in col {
            w[(i, j)] = v;
        }
        charges.push(q);
    }
    Frame { space: frame.space.clone(), basis: &frame.basis * w, charges }
}

/// Restricts `frame` to the eigenvectors of the (reduced) operator with
/// eigenvalue above `threshold`. Columns are ordered by decreasing eigenvalue.
pub fn range_frame(frame: &Frame, rho_reduced: &CMat, threshold: f64) -> (Frame, Vec<f64>) {
    let mut cols: Vec<(f64, Charge, Vec<(usize, num_complex::Complex64)>)> =
        sector_eigen(frame, rho_reduced).into_iter().filter(|(l, _, _)| *l > threshold).collect();
    cols.sort_by(|a, b| b.0.total_cmp(&a.0));
    let vals = cols.iter().map(|x| x.0).collect();
    (frame_from_columns(frame, cols.into_iter().map(|(_, q, v)| (q, v)).collect()), vals)
}

/// Restricts `frame` to the eigenspace of the reduced operator with eigenvalue
/// within `tol` of `value`.
pub fn eigenspace_frame(frame: &Frame, o_reduced: &CMat, value: f64, tol: f64) -> Frame {
    let cols = sector_eigen(frame, o_reduced)
        .into_iter()
        .filter(|(l, _, _)| (l - value).abs() <= tol)
        .map(|(_, q, v)| (q, v))
        .collect();
    frame_from_columns(frame, cols)
}

/// Maximum deviation from block diagonality of `o` (in frame coordinates)
/// with respect to the frame charges.
pub fn charge_leakage(frame: &Frame, o_reduced: &CMat) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..frame.dim() {
        for j in 0..frame.dim() {
            if frame.charges[i] != frame.charges[j] {
                dev = dev.max(o_reduced[(i, j)].norm());
            }
        }
    }
    dev
}

pub fn real_matrix(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Rounds negligible imaginary parts away so real data stay exactly real.
pub fn clean_real(m: &CMat, tol: f64) -> CMat {
    if m.iter().all(|z| z.im.abs() <= tol) {
        m.map(|z| c(z.re, 0.0))
    } else {
        m.clone()
    }
}

pub fn real_part(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}
