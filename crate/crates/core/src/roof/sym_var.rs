//! A Hermitian variable on the symmetric subspace of `N` copies, block
//! diagonal by total charge, parametrized by real numbers.

use std::collections::HashMap;

use convexroof_sdp::{AffineProgram, SparseHerm};
use num_complex::Complex64;

use crate::roof::frame::{group_by_charge, Charge};
use crate::symmetric::SymBasis;
use crate::tensor::{c, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Diag,
    Re,
    Im,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub sector: usize,
    pub p: usize,
    pub q: usize,
    pub kind: ParamKind,
}

pub type SparseMap = HashMap<(usize, usize), Complex64>;

#[derive(Debug, Clone)]
pub struct PtCut {
    /// Number of leading copies transposed.
    pub t: usize,
    pub left: SymBasis,
    pub right: SymBasis,
    /// Sectors of the product basis `(a, b) -> a * right.sym_dim() + b`.
    pub sectors: Vec<Vec<usize>>,
    /// Position of each product index inside its sector.
    pub position: Vec<(usize, usize)>,
    /// Affine block index of each sector.
    pub blocks: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SymVariable {
    pub basis: SymBasis,
    pub local_charges: Vec<Charge>,
    pub state_charges: Vec<Charge>,
    pub sectors: Vec<Vec<usize>>,
    pub position: Vec<(usize, usize)>,
    pub real: bool,
    pub offset: usize,
    pub params: Vec<Param>,
    pub sym_blocks: Vec<usize>,
    pub cuts: Vec<PtCut>,
}

fn add_charges(parts: &[usize], charges: &[Charge], width: usize) -> Charge {
    let mut q = vec![0i64; width];
    for &a in parts {
        for (k, v) in charges[a].iter().enumerate() {
            q[k] += v;
        }
    }
    q
}

fn positions(sectors: &[Vec<usize>], n: usize) -> Vec<(usize, usize)> {
    let mut pos = vec![(0, 0); n];
    for (s, members) in sectors.iter().enumerate() {
        for (i, &m) in members.iter().enumerate() {
            pos[m] = (s, i);
        }
    }
    pos
}

/// Upper-triangle entries of the Hermitian image of a parameter, given the
/// image `t` of the matrix unit `|p><q|` under a Hermiticity-preserving map.
pub fn hermitian_image(t: &SparseMap, kind: ParamKind) -> SparseMap {
    let mut out: SparseMap = HashMap::new();
    let mut add = |i: usize, j: usize, v: Complex64| {
        if i <= j {
            *out.entry((i, j)).or_insert(c(0.0, 0.0)) += v;
        }
    };
    for (&(i, j), &v) in t {
        match kind {
            ParamKind::Diag => add(i, j, v),
            ParamKind::Re => {
                add(i, j, v);
                add(j, i, v.conj());
            }
            ParamKind::Im => {
                add(i, j, c(0.0, 1.0) * v);
                add(j, i, c(0.0, -1.0) * v.conj());
            }
        }
    }
    out.retain(|_, v| v.norm() > 1e-15);
    out
}

impl SymVariable {
    pub fn new(basis: SymBasis, local_charges: &[Charge], real: bool, offset: usize) -> Self {
        let width = local_charges.first().map_or(0, |q| q.len());
        let s = basis.sym_dim();
        let state_charges: Vec<Charge> = (0..s).map(|k| add_charges(basis.state(k), local_charges, width)).collect();
        let sectors = group_by_charge(&state_charges);
        let position = positions(&sectors, s);
        let mut params = Vec::new();
        for (sec, members) in sectors.iter().enumerate() {
            for (i, &p) in members.iter().enumerate() {
                params.push(Param { sector: sec, p, q: p, kind: ParamKind::Diag });
                for &q in &members[i + 1..] {
                    params.push(Param { sector: sec, p, q, kind: ParamKind::Re });
                    if !real {
                        params.push(Param { sector: sec, p, q, kind: ParamKind::Im });
                    }
                }
            }
        }
        Self {
            basis,
            local_charges: local_charges.to_vec(),
            state_charges,
            sectors,
            position,
            real,
            offset,
            params,
            sym_blocks: Vec::new(),
            cuts: Vec::new(),
        }
    }

    pub fn nparams(&self) -> usize {
        self.params.len()
    }

    pub fn sym_dim(&self) -> usize {
        self.basis.sym_dim()
    }

    /// Coefficients of `tr(G omega)` for Hermitian `G` in symmetric coordinates.
    pub fn linear_form(&self, g: &CMat) -> Vec<(usize, f64)> {
        self.params
            .iter()
            .enumerate()
            .filter_map(|(k, pr)| {
                let v = match pr.kind {
                    ParamKind::Diag => g[(pr.p, pr.p)].re,
                    ParamKind::Re => 2.0 * g[(pr.p, pr.q)].re,
                    ParamKind::Im => 2.0 * g[(pr.p, pr.q)].im,
                };
                (v != 0.0).then_some((self.offset + k, v))
            })
            .collect()
    }

    /// Adds one PSD block per charge sector.
    pub fn add_psd_blocks(&mut self, prog: &mut AffineProgram) {
        self.sym_blocks = self.sectors.iter().map(|m| prog.add_block(m.len())).collect();
        for (k, pr) in self.params.iter().enumerate() {
            let (_, i) = self.position[pr.p];
            let (_, j) = self.position[pr.q];
            let v = match pr.kind {
                ParamKind::Diag | ParamKind::Re => c(1.0, 0.0),
                ParamKind::Im => c(0.0, 1.0),
            };
            let m = SparseHerm::from_triplets(self.sectors[pr.sector].len(), [(i, j, v)]);
            prog.add_block_term(self.sym_blocks[pr.sector], self.offset + k, m);
        }
    }

    /// Image of `|s_p><s_q|` under the partial transpose of the first `t`
    /// copies, in product coordinates of `Sym^t (x) Sym^(N-t)`.
    fn pt_unit(&self, left: &SymBasis, right: &SymBasis, t: usize, p: usize, q: usize) -> SparseMap {
        let n = self.basis.copies();
        let sr = right.sym_dim();
        let cpq = self.basis.coefficient(p) * self.basis.coefficient(q);
        let mut out: SparseMap = HashMap::new();
        let arr_p = self.basis.arrangements(p);
        let arr_q = self.basis.arrangements(q);
        let mut ket = vec![0; n];
        let mut bra = vec![0; n];
        for a in &arr_p {
            for b in &arr_q {
                ket[..t].copy_from_slice(&b[..t]);
                ket[t..].copy_from_slice(&a[t..]);
                bra[..t].copy_from_slice(&a[..t]);
                bra[t..].copy_from_slice(&b[t..]);
                let (kl, kr) = (left.index_of_tuple(&ket[..t]), right.index_of_tuple(&ket[t..]));
                let (bl, br) = (left.index_of_tuple(&bra[..t]), right.index_of_tuple(&bra[t..]));
                let w = cpq * left.coefficient(kl) * right.coefficient(kr) * left.coefficient(bl) * right.coefficient(br);
                *out.entry((kl * sr + kr, bl * sr + br)).or_insert(c(0.0, 0.0)) += c(w, 0.0);
            }
        }
        out
    }

    /// Adds PSD blocks for the partial transpose of the first `t` copies.
    pub fn add_pt_blocks(&mut self, prog: &mut AffineProgram, t: usize) {
        let n = self.basis.copies();
        let r = self.basis.local_dim();
        let left = SymBasis::new(r, t).expect("cut basis within cap");
        let right = SymBasis::new(r, n - t).expect("cut basis within cap");
        let width = self.local_charges.first().map_or(0, |q| q.len());
        let (sl, sr) = (left.sym_dim(), right.sym_dim());
        let mut charges = Vec::with_capacity(sl * sr);
        for a in 0..sl {
            let qa = add_charges(left.state(a), &self.local_charges, width);
            for b in 0..sr {
                let qb = add_charges(right.state(b), &self.local_charges, width);
                charges.push(qb.iter().zip(&qa).map(|(x, y)| x - y).collect::<Charge>());
            }
        }
        let sectors = group_by_charge(&charges);
        let position = positions(&sectors, sl * sr);
        let blocks: Vec<usize> = sectors.iter().map(|m| prog.add_block(m.len())).collect();
        let mut cache: HashMap<(usize, usize), SparseMap> = HashMap::new();
        for (k, pr) in self.params.iter().enumerate() {
            let unit = cache.entry((pr.p, pr.q)).or_insert_with(|| self.pt_unit(&left, &right, t, pr.p, pr.q));
            let img = hermitian_image(unit, pr.kind);
            let mut per_block: HashMap<usize, Vec<(usize, usize, Complex64)>> = HashMap::new();
            for (&(i, j), &v) in &img {
                let (si, li) = position[i];
                let (sj, lj) = position[j];
                debug_assert_eq!(si, sj, "partial transpose image crosses charge sectors");
                per_block.entry(si).or_default().push((li, lj, v));
            }
            for (sec, trip) in per_block {
                let m = SparseHerm::from_triplets(sectors[sec].len(), trip);
                prog.add_block_term(blocks[sec], self.offset + k, m);
            }
        }
        self.cuts.push(PtCut { t, left, right, sectors, position, blocks });
    }

    /// Image of `|s_p><s_q|` under the trace over copies `2..N`, on the local space.
    fn marginal_unit(&self, p: usize, q: usize) -> SparseMap {
        let cpq = self.basis.coefficient(p) * self.basis.coefficient(q);
        let mut out: SparseMap = HashMap::new();
        let arr_q = self.basis.arrangements(q);
        for a in self.basis.arrangements(p) {
            for b in &arr_q {
                if a[1..] == b[1..] {
                    *out.entry((a[0], b[0])).or_insert(c(0.0, 0.0)) += c(cpq, 0.0);
                }
            }
        }
        out
    }

    /// Single-copy marginal of every parameter's basis matrix (upper triangle).
    pub fn marginal_images(&self) -> Vec<SparseMap> {
        let mut cache: HashMap<(usize, usize), SparseMap> = HashMap::new();
        self.params
            .iter()
            .map(|pr| {
                let unit = cache.entry((pr.p, pr.q)).or_insert_with(|| self.marginal_unit(pr.p, pr.q));
                hermitian_image(unit, pr.kind)
            })
            .collect()
    }

    /// Dense symmetric-coordinate matrix at parameter vector `x` (global indexing).
    pub fn assemble(&self, x: &[f64]) -> CMat {
        let s = self.sym_dim();
        let mut m = CMat::zeros(s, s);
        for (k, pr) in self.params.iter().enumerate() {
            let v = x[self.offset + k];
            match pr.kind {
                ParamKind::Diag => m[(pr.p, pr.p)] += c(v, 0.0),
                ParamKind::Re => {
                    m[(pr.p, pr.q)] += c(v, 0.0);
                    m[(pr.q, pr.p)] += c(v, 0.0);
                }
                ParamKind::Im => {
                    m[(pr.p, pr.q)] += c(0.0, v);
                    m[(pr.q, pr.p)] += c(0.0, -v);
                }
            }
        }
        m
    }

    /// Assembles per-sector block matrices into one symmetric-coordinate matrix.
    pub fn assemble_blocks(&self, blocks: &[CMat]) -> CMat {
        let s = self.sym_dim();
        let mut m = CMat::zeros(s, s);
        for (sec, members) in self.sectors.iter().enumerate() {
            let b = &blocks[self.sym_blocks[sec]];
            for (i, &p) in members.iter().enumerate() {
                for (j, &q) in members.iter().enumerate() {
                    m[(p, q)] = b[(i, j)];
                }
            }
        }
        m
    }

    /// Dense matrix on the product basis of a cut assembled from its sector blocks.
    pub fn assemble_cut(&self, cut: usize, blocks: &[CMat]) -> CMat {
        let cutd = &self.cuts[cut];
        let n = cutd.left.sym_dim() * cutd.right.sym_dim();
        let mut m = CMat::zeros(n, n);
        for (sec, members) in cutd.sectors.iter().enumerate() {
            let b = &blocks[cutd.blocks[sec]];
            for (i, &p) in members.iter().enumerate() {
                for (j, &q) in members.iter().enumerate() {
                    m[(p, q)] = b[(i, j)];
                }
            }
        }
        m
    }

    /// Largest entry of `g` connecting different charge sectors, or imaginary
    /// when the variable is real.
    pub fn leakage(&self, g: &CMat) -> f64 {
        let s = self.sym_dim();
        let mut dev = 0.0f64;
        for p in 0..s {
            for q in 0..s {
                let z = g[(p, q)];
                if self.position[p].0 != self.position[q].0 {
                    dev = dev.max(z.norm());
                } else if self.real {
                    dev = dev.max(z.im.abs());
                }
            }
        }
        dev
    }
}
