//! Truncated lowest-weight Virasoro modules in the PBW basis
//! L_{−μ₁}⋯L_{−μ_k}v, μ₁ ≥ … ≥ μ_k.

mod beta;
mod exact;
mod qei;
pub mod reduce;
mod stress;

pub use beta::{beta_cocycle, beta_cocycle_detail, beta_cocycle_restricted, transformed_generator, BetaValue, TransformedGenerator};
pub use exact::{det_exact, gram_det, gram_matrix_exact, kac_row, rationalize, KacRow};
pub use qei::{exact_block_min_eigenvalue, qei_bound, qei_bound_with, qei_check, series_of_field, OrthonormalFrame, QeiReport, SmearingPicture};
pub use stress::{
    apply_stress, bracket_field, commutator_check, commutator_check_with, gf_cocycle, stress_matrix, vir_cocycle, Cocycle,
    CommutatorReport, StressMatrix,
};

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use reduce::{partitions, Reducer, Word};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

/// Central charge, lowest weight and truncation level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleParams {
    pub c: f64,
    pub h: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl ModuleParams {
    pub fn new(c: f64, h: f64, n: usize) -> Result<Self> {
        if !c.is_finite() || !h.is_finite() {
            return Err(Error::Domain(format!("non-finite module parameters c = {c}, h = {h}")));
        }
        Ok(Self { c, h, n })
    }
}

/// Columns of a sparse real operator: `cols[j]` lists (row, value).
#[derive(Clone, Debug, Default)]
pub(crate) struct SparseOp {
    pub(crate) cols: Vec<Vec<(usize, f64)>>,
}

/// Amplitudes over the PBW basis of a [`VermaLevelSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleVector {
    pub amps: Vec<Complex64>,
    /// Set when an operator pushed nonzero components above level N.
    pub truncated: bool,
}

impl ModuleVector {
    pub fn zeros(dim: usize) -> Self {
        Self { amps: vec![Complex64::new(0.0, 0.0); dim], truncated: false }
    }

    pub fn add_scaled(&mut self, a: Complex64, other: &ModuleVector) {
        for (x, y) in self.amps.iter_mut().zip(&other.amps) {
            *x += a * y;
        }
        self.truncated |= other.truncated;
    }

    pub fn max_abs_diff(&self, other: &ModuleVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Levels 0..=N of the Verma module with the L_n matrices for |n| ≤ N and
/// the Gram blocks of every level. Immutable after construction.
#[derive(Clone, Debug)]
pub struct VermaLevelSpace {
    params: ModuleParams,
    basis: Vec<Word>,
    offsets: Vec<usize>,
    index: HashMap<Word, usize>,
    ops: Vec<SparseOp>,
    grams: Vec<DMatrix<f64>>,
}

impl VermaLevelSpace {
    pub fn new(params: ModuleParams) -> Result<Self> {
        let params = ModuleParams::new(params.c, params.h, params.n)?;
        let n = params.n;
        let mut basis = vec![];
        let mut offsets = vec![0];
        for l in 0..=n {
            basis.extend(partitions(l as u32));
            offsets.push(basis.len());
        }
        let index: HashMap<Word, usize> = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut red = Reducer::new(params.c, params.h, n as u32);
        let mut ops = Vec::with_capacity(2 * n + 1);
        for k in -(n as i32)..=(n as i32) {
            let mut op = SparseOp::default();
            for w in &basis {
                let col = red
                    .apply(k, w)
                    .into_iter()
                    .map(|(x, v)| (index[&x], v))
                    .collect::<Vec<_>>();
                op.cols.push(col);
            }
            ops.push(op);
        }
        let mut space = Self { params, basis, offsets, index, ops, grams: vec![] };
        space.grams = space.build_grams();
        Ok(space)
    }

    /// Gram blocks by G_ℓ[μ, ν] = Σ_w G_{ℓ−μ₁}[μ′, w] ⟨w| L_{μ₁} |ν⟩.
    fn build_grams(&self) -> Vec<DMatrix<f64>> {
        let mut grams: Vec<DMatrix<f64>> = vec![DMatrix::from_element(1, 1, 1.0)];
        for l in 1..=self.params.n {
            let r = self.level_range(l);
            let d = r.len();
            let mut g = DMatrix::zeros(d, d);
            for (a, i) in r.clone().enumerate() {
                let mu = &self.basis[i];
                let m1 = mu[0] as usize;
                let lower = l - m1;
                let prime = self.index[&mu[1..].to_vec()] - self.offsets[lower];
                let glow = &grams[lower];
                let op = &self.ops[self.op_slot(m1 as i64)];
                for (b, j) in r.clone().enumerate() {
                    let mut acc = 0.0;
                    for &(w, v) in &op.cols[j] {
                        acc += glow[(prime, w - self.offsets[lower])] * v;
                    }
                    g[(a, b)] = acc;
                }
            }
            grams.push(g);
        }
        grams
    }

    fn op_slot(&self, n: i64) -> usize {
        (n + self.params.n as i64) as usize
    }

    pub(crate) fn op(&self, n: i64) -> &SparseOp {
        &self.ops[self.op_slot(n)]
    }

    pub fn params(&self) -> ModuleParams {
        self.params
    }

    pub fn max_level(&self) -> usize {
        self.params.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    /// Basis indices of level ℓ.
    pub fn level_range(&self, level: usize) -> Range<usize> {
        self.offsets[level]..self.offsets[level + 1]
    }

    /// Number of basis vectors at levels ≤ ℓ.
    pub fn dim_through(&self, level: usize) -> usize {
        self.offsets[level.min(self.params.n) + 1]
    }

    pub fn level_of(&self, idx: usize) -> usize {
        self.offsets.partition_point(|&o| o <= idx) - 1
    }

    pub fn index_of(&self, word: &[u32]) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn gram(&self, level: usize) -> &DMatrix<f64> {
        &self.grams[level]
    }

    /// Block-diagonal Gram matrix over all levels ≤ N.
    pub fn gram_full(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut g = DMatrix::zeros(d, d);
        for l in 0..=self.params.n {
            let o = self.offsets[l];
            g.view_mut((o, o), self.grams[l].shape()).copy_from(&self.grams[l]);
        }
        g
    }

    /// Dense real matrix of L_n on the ≤ N block.
    pub fn ln_matrix(&self, n: i64) -> Result<DMatrix<f64>> {
        self.check_mode(n)?;
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (j, col) in self.op(n).cols.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] += v;
            }
        }
        Ok(m)
    }

    fn check_mode(&self, n: i64) -> Result<()> {
        if n.unsigned_abs() as usize > self.params.n {
            return Err(Error::OutOfRange(format!("L_{n} needs |n| ≤ N = {}", self.params.n)));
        }
        Ok(())
    }

    pub fn lowest_weight_vector(&self) -> ModuleVector {
        self.basis_vector(0)
    }

    pub fn basis_vector(&self, idx: usize) -> ModuleVector {
        let mut v = ModuleVector::zeros(self.dim());
        v.amps[idx] = Complex64::new(1.0, 0.0);
        v
    }

    /// L_n v by normal-ordered reduction; components above level N are
    /// dropped and flagged.
    pub fn apply_ln(&self, n: i64, v: &ModuleVector) -> Result<ModuleVector> {
        self.check_mode(n)?;
        if v.amps.len() != self.dim() {
            return Err(Error::Domain(format!("vector has {} amplitudes, space has {}", v.amps.len(), self.dim())));
        }
        let mut out = ModuleVector::zeros(self.dim());
        out.truncated = v.truncated;
        let op = self.op(n);
        for (j, a) in v.amps.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            if n < 0 && self.level_of(j) + n.unsigned_abs() as usize > self.params.n {
                out.truncated = true;
                continue;
            }
            for &(i, x) in &op.cols[j] {
                out.amps[i] += a * x;
            }
        }
        Ok(out)
    }

    /// ⟨u, w⟩, antilinear in u.
    pub fn pairing(&self, u: &ModuleVector, w: &ModuleVector) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..=self.params.n {
            let r = self.level_range(l);
            let g = &self.grams[l];
            for (a, i) in r.clone().enumerate() {
                let ui = u.amps[i].conj();
                if ui.norm() == 0.0 {
                    continue;
                }
                for (b, j) in r.clone().enumerate() {
                    acc += ui * g[(a, b)] * w.amps[j];
                }
            }
        }
        acc
    }

    pub fn norm_sqr(&self, v: &ModuleVector) -> f64 {
        self.pairing(v, v).re
    }
}

/// Shapovalov matrix at one level by direct reduction of ⟨L_{−μ}v, L_{−ν}v⟩.
pub fn gram_matrix(params: &ModuleParams, level: usize) -> Result<DMatrix<f64>> {
    if level > params.n {
        return Err(Error::OutOfRange(format!("level {level} exceeds N = {}", params.n)));
    }
    let basis = partitions(level as u32);
    let mut red = Reducer::new(params.c, params.h, level as u32);
    let d = basis.len();
    let mut g = DMatrix::zeros(d, d);
    for (a, mu) in basis.iter().enumerate() {
        for (b, nu) in basis.iter().enumerate() {
            g[(a, b)] = red.pairing(mu, nu);
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(g: &DMatrix<f64>) -> f64 {
    g.clone().symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Outcome of the unitarity classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Unitarity {
    Continuous,
    Discrete { m: u32, p: u32, q: u32 },
    NonUnitary,
}

impl fmt::Display for Unitarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unitarity::Continuous => write!(f, "continuous"),
            Unitarity::Discrete { m, p, q } => write!(f, "discrete({m},{p},{q})"),
            Unitarity::NonUnitary => write!(f, "none"),
        }
    }
}

const CLASSIFY_TOL: f64 = 1e-9;

/// c(m) = 1 − 6/((m+2)(m+3)).
pub fn discrete_c(m: u32) -> f64 {
    let m = m as f64;
    1.0 - 6.0 / ((m + 2.0) * (m + 3.0))
}

/// h_{p,q}(m) = ((p(m+1) − qm)² − 1)/(4m(m+1)).
pub fn discrete_h(m: u32, p: u32, q: u32) -> f64 {
    let (m, p, q) = (m as f64, p as f64, q as f64);
    ((p * (m + 1.0) - q * m).powi(2) - 1.0) / (4.0 * m * (m + 1.0))
}

/// Continuous series c ≥ 1, h ≥ 0; discrete series m ≥ 3, 1 ≤ q ≤ p ≤ m − 1.
pub fn unitarity_classify(c: f64, h: f64) -> Unitarity {
    if !c.is_finite() || !h.is_finite() {
        return Unitarity::NonUnitary;
    }
    if c >= 1.0 - CLASSIFY_TOL {
        return if h >= -CLASSIFY_TOL { Unitarity::Continuous } else { Unitarity::NonUnitary };
    }
    if c < discrete_c(3) - CLASSIFY_TOL {
        return Unitarity::NonUnitary;
    }
    // (m+2)(m+3) = 6/(1−c)
    let x = 6.0 / (1.0 - c);
    let approx = ((-5.0 + (1.0 + 4.0 * x).sqrt()) / 2.0).round();
    let lo = (approx as i64 - 1).max(3) as u32;
    for m in lo..=lo + 2 {
        if (discrete_c(m) - c).abs() > CLASSIFY_TOL {
            continue;
        }
        for p in 1..m {
            for q in 1..=p {
                if (discrete_h(m, p, q) - h).abs() <= CLASSIFY_TOL {
                    return Unitarity::Discrete { m, p, q };
                }
            }
        }
    }
    Unitarity::NonUnitary
}
