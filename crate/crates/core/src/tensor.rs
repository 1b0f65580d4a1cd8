//! Dense complex linear algebra over labeled tensor-product spaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RoofError};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ProductSpace {
    party_dims: Vec<usize>,
}

impl TryFrom<Vec<usize>> for ProductSpace {
    type Error = RoofError;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        ProductSpace::new(dims)
    }
}

impl From<ProductSpace> for Vec<usize> {
    fn from(s: ProductSpace) -> Self {
        s.party_dims
    }
}

impl ProductSpace {
    pub fn new(party_dims: Vec<usize>) -> Result<Self> {
        if party_dims.is_empty() {
            return Err(RoofError::InvalidInput("product space needs at least one party".into()));
        }
        if party_dims.contains(&0) {
            return Err(RoofError::InvalidInput("party dimensions must be positive".into()));
        }
        Ok(Self { party_dims })
    }

    pub fn qubits(n: usize) -> Self {
        Self { party_dims: vec![2; n.max(1)] }
    }

    pub fn bipartite(da: usize, db: usize) -> Self {
        Self { party_dims: vec![da.max(1), db.max(1)] }
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn parties(&self) -> usize {
        self.party_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.party_dims.iter().product()
    }

    pub fn concat(&self, other: &ProductSpace) -> ProductSpace {
        let mut d = self.party_dims.clone();
        d.extend_from_slice(&other.party_dims);
        ProductSpace { party_dims: d }
    }

    /// `n` copies of this space, ordered copy-major.
    pub fn copies(&self, n: usize) -> ProductSpace {
        let mut d = Vec::with_capacity(self.parties() * n);
        for _ in 0..n {
            d.extend_from_slice(&self.party_dims);
        }
        ProductSpace { party_dims: d }
    }

    /// Row-major strides: party 0 is the most significant digit.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.parties()];
        for p in (0..self.parties().saturating_sub(1)).rev() {
            s[p] = s[p + 1] * self.party_dims[p + 1];
        }
        s
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.parties()];
        for p in (0..self.parties()).rev() {
            out[p] = index % self.party_dims[p];
            index /= self.party_dims[p];
        }
        out
    }

    pub fn sub(&self, parties: &[usize]) -> Result<ProductSpace> {
        check_parties(self, parties)?;
        ProductSpace::new(parties.iter().map(|&p| self.party_dims[p]).collect())
    }
}

fn check_parties(space: &ProductSpace, parties: &[usize]) -> Result<()> {
    for &p in parties {
        if p >= space.parties() {
            return Err(RoofError::InvalidInput(format!(
                "party index {p} out of range for {} parties",
                space.parties()
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    space: ProductSpace,
    amplitudes: CVec,
}

impl Ket {
    pub fn new(space: ProductSpace, amplitudes: CVec) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(RoofError::DimensionMismatch(format!(
                "ket has {} amplitudes, space has dimension {}",
                amplitudes.len(),
                space.total_dim()
            )));
        }
        let n = amplitudes.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(RoofError::InvalidInput(format!("ket norm {n} is not 1")));
        }
        Ok(Self { space, amplitudes })
    }

    pub fn normalized(space: ProductSpace, amplitudes: CVec) -> Result<Self> {
        let n = amplitudes.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(RoofError::InvalidInput("cannot normalize a zero vector".into()));
        }
        Self::new(space, amplitudes / c(n, 0.0))
    }

    pub fn from_real(space: ProductSpace, amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(space, CVec::from_iterator(amplitudes.len(), amplitudes.iter().map(|&a| c(a, 0.0))))
    }

    pub fn basis(space: ProductSpace, index: usize) -> Result<Self> {
        let mut v = CVec::zeros(space.total_dim());
        if index >= v.len() {
            return Err(RoofError::InvalidInput(format!("basis index {index} out of range")));
        }
        v[index] = c(1.0, 0.0);
        Self::new(space, v)
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn kron(&self, other: &Ket) -> Ket {
        let v = kron_vec(&self.amplitudes, &other.amplitudes);
        Ket { space: self.space.concat(&other.space), amplitudes: v }
    }

    pub fn projector(&self) -> CMat {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn density(&self) -> DensityOp {
        DensityOp { op: HermitianOp { space: self.space.clone(), entries: self.projector() } }
    }

    pub fn expectation(&self, op: &CMat) -> f64 {
        (self.amplitudes.adjoint() * op * &self.amplitudes)[(0, 0)].re
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp {
    space: ProductSpace,
    entries: CMat,
}

impl HermitianOp {
    pub fn new(space: ProductSpace, entries: CMat) -> Result<Self> {
        let n = space.total_dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(RoofError::DimensionMismatch(format!(
                "operator is {}x{}, space has dimension {n}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let dev = hermitian_deviation(&entries);
        if dev > HERMITIAN_TOL {
            return Err(RoofError::NotHermitian(dev));
        }
        Ok(Self { space, entries: hermitian_part(&entries) })
    }

    /// Accepts any square matrix and keeps its Hermitian part.
    pub fn from_hermitian_part(space: ProductSpace, entries: &CMat) -> Result<Self> {
        Self::new(space, hermitian_part(entries))
    }

    pub fn from_real(space: ProductSpace, entries: &DMatrix<f64>) -> Result<Self> {
        Self::new(space, entries.map(|x| c(x, 0.0)))
    }

    pub fn identity(space: ProductSpace) -> Self {
        let n = space.total_dim();
        Self { space, entries: CMat::identity(n, n) }
    }

    pub fn zeros(space: ProductSpace) -> Self {
        let n = space.total_dim();
        Self { space, entries: CMat::zeros(n, n) }
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `Re tr(self * other)`.
    pub fn inner(&self, other: &CMat) -> f64 {
        herm_inner(&self.entries, other)
    }

    pub fn scale(&self, s: f64) -> HermitianOp {
        Self { space: self.space.clone(), entries: &self.entries * c(s, 0.0) }
    }

    pub fn add(&self, other: &HermitianOp) -> Result<HermitianOp> {
        if self.space != other.space {
            return Err(RoofError::DimensionMismatch("operators live on different spaces".into()));
        }
        Ok(Self { space: self.space.clone(), entries: &self.entries + &other.entries })
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn operator_norm(&self) -> f64 {
        let (ev, _) = eig_hermitian_mat(&self.entries);
        ev.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MatrixJson::from_matrix(self.space.party_dims(), &self.entries))
            .expect("matrix serialization")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let m: MatrixJson = serde_json::from_value(v.clone())?;
        let (space, entries) = m.into_matrix()?;
        Self::new(space, entries)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    op: HermitianOp,
}

impl DensityOp {
    pub fn new(space: ProductSpace, entries: CMat) -> Result<Self> {
        Self::from_op(HermitianOp::new(space, entries)?)
    }

    pub fn from_op(op: HermitianOp) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(RoofError::NotDensity(format!("trace {tr} is not 1")));
        }
        let lmin = eig_hermitian_mat(op.matrix()).0[0];
        if lmin < -PSD_TOL {
            return Err(RoofError::NotDensity(format!("minimum eigenvalue {lmin:.3e} is negative")));
        }
        Ok(Self { op })
    }

    pub fn maximally_mixed(space: ProductSpace) -> Self {
        let n = space.total_dim();
        let m = CMat::identity(n, n) * c(1.0 / n as f64, 0.0);
        Self { op: HermitianOp { space, entries: m } }
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &DensityOp, lambda: f64) -> Result<DensityOp> {
        if self.space() != other.space() {
            return Err(RoofError::DimensionMismatch("states live on different spaces".into()));
        }
        let m = self.matrix() * c(lambda, 0.0) + other.matrix() * c(1.0 - lambda, 0.0);
        DensityOp::new(self.space().clone(), m)
    }

    pub fn op(&self) -> &HermitianOp {
        &self.op
    }

    pub fn space(&self) -> &ProductSpace {
        &self.op.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.op.entries
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn expectation(&self, o: &CMat) -> f64 {
        herm_inner(o, self.matrix())
    }

    pub fn purity(&self) -> f64 {
        herm_inner(self.matrix(), self.matrix())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian_mat(self.matrix()).0
    }

    /// Number of eigenvalues above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > threshold).count()
    }

    pub fn is_real(&self) -> bool {
        self.op.is_real()
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.op.to_json()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        Self::from_op(HermitianOp::from_json(v)?)
    }
}

/// Matrix JSON exchange format, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(dims: &[usize], m: &CMat) -> Self {
        let re = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect();
        Self { dims: dims.to_vec(), re, im }
    }

    pub fn into_matrix(self) -> Result<(ProductSpace, CMat)> {
        let space = ProductSpace::new(self.dims)?;
        let n = space.total_dim();
        let bad = || RoofError::DimensionMismatch(format!("matrix JSON must be {n}x{n}"));
        if self.re.len() != n || self.re.iter().any(|r| r.len() != n) {
            return Err(bad());
        }
        let im_ok = self.im.is_empty() || (self.im.len() == n && self.im.iter().all(|r| r.len() == n));
        if !im_ok {
            return Err(bad());
        }
        let m = CMat::from_fn(n, n, |i, j| {
            let im = if self.im.is_empty() { 0.0 } else { self.im[i][j] };
            c(self.re[i][j], im)
        });
        Ok((space, m))
    }
}

pub fn hermitian_deviation(m: &CMat) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// `Re tr(a * b)` for Hermitian `a`, `b`.
pub fn herm_inner(a: &CMat, b: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

pub fn kron_mat(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

pub fn kron(a: &HermitianOp, b: &HermitianOp) -> HermitianOp {
    HermitianOp { space: a.space.concat(&b.space), entries: kron_mat(&a.entries, &b.entries) }
}

pub fn kron_all(ops: &[&CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for o in ops {
        out = kron_mat(&out, o);
    }
    out
}

/// Partial trace of a raw matrix over `traced` parties of `space`.
pub fn partial_trace_mat(m: &CMat, space: &ProductSpace, traced: &[usize]) -> Result<(ProductSpace, CMat)> {
    check_parties(space, traced)?;
    let keep: Vec<usize> = (0..space.parties()).filter(|p| !traced.contains(p)).collect();
    if keep.is_empty() {
        return Err(RoofError::InvalidInput("cannot trace out every party".into()));
    }
    let strides = space.strides();
    let offsets = |parties: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &p in parties {
            let mut next = Vec::with_capacity(offs.len() * space.party_dims()[p]);
            for &o in &offs {
                for a in 0..space.party_dims()[p] {
                    next.push(o + a * strides[p]);
                }
            }
            offs = next;
        }
        offs
    };
    let traced_sorted: Vec<usize> = (0..space.parties()).filter(|p| traced.contains(p)).collect();
    let ok = offsets(&keep);
    let ot = offsets(&traced_sorted);
    let n = ok.len();
    let mut out = CMat::zeros(n, n);
    for (j, &cj) in ok.iter().enumerate() {
        for (i, &ci) in ok.iter().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for &t in &ot {
                s += m[(ci + t, cj + t)];
            }
            out[(i, j)] = s;
        }
    }
    Ok((space.sub(&keep)?, out))
}

pub fn partial_trace(x: &HermitianOp, traced_parties: &[usize]) -> Result<HermitianOp> {
    let (space, m) = partial_trace_mat(&x.entries, &x.space, traced_parties)?;
    Ok(HermitianOp { space, entries: m })
}

/// Partial transpose of a raw matrix on `parties` of `space`.
pub fn partial_transpose_mat(m: &CMat, space: &ProductSpace, parties: &[usize]) -> Result<CMat> {
    check_parties(space, parties)?;
    let n = space.total_dim();
    let strides = space.strides();
    let part: Vec<usize> = (0..n)
        .map(|i| {
            let d = space.digits(i);
            parties.iter().map(|&p| d[p] * strides[p]).sum()
        })
        .collect();
    let mut out = CMat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let i2 = i - part[i] + part[j];
            let j2 = j - part[j] + part[i];
            out[(i2, j2)] = m[(i, j)];
        }
    }
    Ok(out)
}

pub fn partial_transpose(x: &HermitianOp, parties: &[usize]) -> Result<HermitianOp> {
    let m = partial_transpose_mat(&x.entries, &x.space, parties)?;
    Ok(HermitianOp { space: x.space.clone(), entries: m })
}

/// Eigenvalues ascending with matching eigenvector columns. Real input is
/// diagonalized in real arithmetic so eigenvectors come out real.
pub fn eig_hermitian_mat(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (vec![], CMat::zeros(0, 0));
    }
    let (vals, vecs): (Vec<f64>, CMat) = if m.iter().all(|z| z.im == 0.0) {
        let r = m.map(|z| z.re);
        let e = nalgebra::SymmetricEigen::new(r);
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors.map(|x| c(x, 0.0)))
    } else {
        let e = nalgebra::SymmetricEigen::new(hermitian_part(m));
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&k| vals[k]).collect();
    let sorted_vecs = CMat::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    (sorted_vals, sorted_vecs)
}

pub fn eig_hermitian(x: &HermitianOp) -> Result<(Vec<f64>, CMat)> {
    let dev = hermitian_deviation(&x.entries);
    if dev > HERMITIAN_TOL {
        return Err(RoofError::NotHermitian(dev));
    }
    Ok(eig_hermitian_mat(&x.entries))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_haar_ket<R: Rng + ?Sized>(space: &ProductSpace, rng: &mut R) -> Ket {
    loop {
        let v = CVec::from_fn(space.total_dim(), |_, _| complex_gaussian(rng));
        if let Ok(k) = Ket::normalized(space.clone(), v) {
            return k;
        }
    }
}

/// Induced-measure random state: `G G^dagger / tr` for a Ginibre `d x rank` matrix.
pub fn random_density<R: Rng + ?Sized>(space: &ProductSpace, rank: usize, rng: &mut R) -> Result<DensityOp> {
    let d = space.total_dim();
    if rank == 0 || rank > d {
        return Err(RoofError::InvalidInput(format!("rank {rank} invalid for dimension {d}")));
    }
    let g = CMat::from_fn(d, rank, |_, _| complex_gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOp::new(space.clone(), hermitian_part(&(m / c(tr, 0.0))))
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let ph = r[(j, j)] / r[(j, j)].norm();
        for i in 0..d {
            u[(i, j)] *= ph;
        }
    }
    u
}

/// Orthonormal Hermitian basis of `d x d` matrices: normalized diagonal units,
/// then symmetric and antisymmetric off-diagonal pairs. `sum_m G_m (x) G_m` is the flip.
pub fn hermitian_basis(d: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMat::zeros(d, d);
        m[(i, i)] = c(1.0, 0.0);
        out.push(m);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            let mut m = CMat::zeros(d, d);
            m[(i, j)] = c(s, 0.0);
            m[(j, i)] = c(s, 0.0);
            out.push(m);
            let mut m = CMat::zeros(d, d);
            m[(i, j)] = c(0.0, -s);
            m[(j, i)] = c(0.0, s);
            out.push(m);
        }
    }
    out
}

/// Generalized Gell-Mann basis: traceless, Hermitian, orthonormal in Hilbert-Schmidt.
pub fn gell_mann_basis(d: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(d * d - 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            let mut m = CMat::zeros(d, d);
            m[(i, j)] = c(s, 0.0);
            m[(j, i)] = c(s, 0.0);
            out.push(m);
            let mut m = CMat::zeros(d, d);
            m[(i, j)] = c(0.0, -s);
            m[(j, i)] = c(0.0, s);
            out.push(m);
        }
    }
    for k in 1..d {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut m = CMat::zeros(d, d);
        for i in 0..k {
            m[(i, i)] = c(norm, 0.0);
        }
        m[(k, k)] = c(-(k as f64) * norm, 0.0);
        out.push(m);
    }
    out
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// `op` acting on party `site` of `space`, identity elsewhere.
pub fn embed_local(op: &CMat, space: &ProductSpace, site: usize) -> CMat {
    let mut out = CMat::identity(1, 1);
    for (p, &d) in space.party_dims().iter().enumerate() {
        if p == site {
            out = kron_mat(&out, op);
        } else {
            out = kron_mat(&out, &CMat::identity(d, d));
        }
    }
    out
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_herm(d: usize, rng: &mut ChaCha8Rng) -> CMat {
        let g = CMat::from_fn(d, d, |_, _| complex_gaussian(rng));
        hermitian_part(&g)
    }

    #[test]
    fn kron_identity_and_spectrum() {
        let i2 = HermitianOp::identity(ProductSpace::qubits(1));
        let k = kron(&i2, &i2);
        assert_eq!(k.matrix(), &CMat::identity(4, 4));
        assert_eq!(k.space().party_dims(), &[2, 2]);
        let z = HermitianOp::new(ProductSpace::qubits(1), pauli_z()).unwrap();
        let (ev, _) = eig_hermitian(&kron(&z, &z)).unwrap();
        assert_eq!(ev.iter().map(|x| x.round() as i32).collect::<Vec<_>>(), vec![-1, -1, 1, 1]);
    }

    #[test]
    fn kron_trace_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = HermitianOp::new(ProductSpace::bipartite(2, 1), random_herm(2, &mut rng)).unwrap();
            let y = HermitianOp::new(ProductSpace::bipartite(3, 1), random_herm(3, &mut rng)).unwrap();
            let k = kron(&x, &y);
            assert!((k.trace() - x.trace() * y.trace()).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_marginal_is_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Ket::from_real(ProductSpace::qubits(2), &[s, 0.0, 0.0, s]).unwrap();
        let r = partial_trace(bell.density().op(), &[1]).unwrap();
        assert!(max_abs(&(r.matrix() - CMat::identity(2, 2) * c(0.5, 0.0))) < 1e-15);
        let pt = partial_transpose(bell.density().op(), &[1]).unwrap();
        let (ev, _) = eig_hermitian(&pt).unwrap();
        assert!((ev[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_density(&ProductSpace::bipartite(3, 1), 3, &mut rng).unwrap();
        let b = random_density(&ProductSpace::bipartite(2, 1), 2, &mut rng).unwrap();
        let sa = ProductSpace::new(vec![3]).unwrap();
        let sb = ProductSpace::new(vec![2]).unwrap();
        let ab = kron(
            &HermitianOp::new(sa, a.matrix().clone()).unwrap(),
            &HermitianOp::new(sb, b.matrix().clone()).unwrap(),
        );
        let ra = partial_trace(&ab, &[1]).unwrap();
        assert!(max_abs(&(ra.matrix() - a.matrix())) < 1e-12);
        let rb = partial_trace(&ab, &[0]).unwrap();
        assert!(max_abs(&(rb.matrix() - b.matrix())) < 1e-12);
    }

    #[test]
    fn partial_transpose_is_involution_and_commutes_with_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let space = ProductSpace::new(vec![2, 3, 2]).unwrap();
        let x = HermitianOp::new(space, random_herm(12, &mut rng)).unwrap();
        let t = partial_transpose(&partial_transpose(&x, &[0, 2]).unwrap(), &[0, 2]).unwrap();
        assert!(max_abs(&(t.matrix() - x.matrix())) < 1e-15);
        let a = partial_trace(&partial_transpose(&x, &[0]).unwrap(), &[1]).unwrap();
        let b = partial_transpose(&partial_trace(&x, &[1]).unwrap(), &[0]).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_index() {
        let x = HermitianOp::identity(ProductSpace::qubits(2));
        assert!(partial_trace(&x, &[2]).is_err());
        assert!(partial_transpose(&x, &[5]).is_err());
    }

    #[test]
    fn eig_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_herm(9, &mut rng);
        let x = HermitianOp::new(ProductSpace::bipartite(3, 3), m.clone()).unwrap();
        let (ev, v) = eig_hermitian(&x).unwrap();
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let d = CMat::from_diagonal(&CVec::from_iterator(9, ev.iter().map(|&l| c(l, 0.0))));
        assert!(max_abs(&(&v * d * v.adjoint() - &m)) < 1e-10);
        let sum: f64 = ev.iter().sum();
        assert!((sum - x.trace()).abs() <= 1e-10 * x.trace().abs().max(1.0));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(HermitianOp::new(ProductSpace::qubits(1), m).is_err());
    }

    #[test]
    fn random_states_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sp = ProductSpace::qubits(1);
        let mut avg = CMat::zeros(2, 2);
        for _ in 0..10_000 {
            let k = random_haar_ket(&sp, &mut rng);
            assert!((k.amplitudes().norm() - 1.0).abs() < 1e-12);
            avg += k.projector();
        }
        avg /= c(10_000.0, 0.0);
        assert!(max_abs(&(avg - CMat::identity(2, 2) * c(0.5, 0.0))) < 0.02);
        let r1 = random_density(&ProductSpace::bipartite(3, 3), 1, &mut rng).unwrap();
        assert!((r1.purity() - 1.0).abs() < 1e-10);
        assert!(random_density(&sp, 3, &mut rng).is_err());
    }

    #[test]
    fn bases_are_orthonormal() {
        for d in 1..5 {
            for basis in [hermitian_basis(d), gell_mann_basis(d)] {
                for (i, a) in basis.iter().enumerate() {
                    for (j, b) in basis.iter().enumerate() {
                        let ip = herm_inner(a, b);
                        assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
                    }
                }
            }
            let flip: CMat = hermitian_basis(d).iter().map(|g| kron_mat(g, g)).fold(CMat::zeros(d * d, d * d), |a, b| a + b);
            for i in 0..d {
                for j in 0..d {
                    assert!((flip[(i * d + j, j * d + i)] - c(1.0, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn matrix_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_density(&ProductSpace::bipartite(2, 2), 4, &mut rng).unwrap();
        let v = rho.to_json();
        assert_eq!(v["dims"], serde_json::json!([2, 2]));
        let back = DensityOp::from_json(&v).unwrap();
        assert!(max_abs(&(back.matrix() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn density_rejects_invalid() {
        let sp = ProductSpace::qubits(1);
        assert!(DensityOp::new(sp.clone(), CMat::identity(2, 2)).is_err());
        let neg = CMat::from_diagonal(&CVec::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(DensityOp::new(sp, neg).is_err());
    }
}
