//! The U(1)-current one-particle space H₁, the operators V(γ) and
//! A = ½J[V(γ), J], Hilbert–Schmidt sweeps and the truncated Fock layer.

mod fock;

pub use fock::{
    covariance_residual, functoriality_residual, random_unitary, second_quantize, weyl_amplitudes, weyl_check, weyl_matrix,
    weyl_relation_residual, TruncatedFock, WeylReport,
};

use crate::circle_diffeo::CircleMap;
use crate::error::{Error, Result};
use crate::fourier_sobolev::{FourierSeries, LambdaBatch, DEFAULT_PANEL_PHASE};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const REAL_TOL: f64 = 1e-12;

/// Fourier modes f̂_k for 1 ≤ |k| ≤ K; the constant mode is quotiented out.
#[derive(Clone, Debug, PartialEq)]
pub struct OneParticleVector {
    k_max: usize,
    /// `pos[k-1]` = f̂_k, `neg[k-1]` = f̂_{−k}.
    pos: Vec<Complex64>,
    neg: Vec<Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl OneParticleVector {
    pub fn zero(k_max: usize) -> Self {
        Self { k_max, pos: vec![zero(); k_max], neg: vec![zero(); k_max] }
    }

    /// Drops f̂₀.
    pub fn from_series(f: &FourierSeries) -> Self {
        let k_max = f.k_max();
        let mut v = Self::zero(k_max);
        for k in 1..=k_max {
            v.pos[k - 1] = f.coeff(k as i64);
            v.neg[k - 1] = f.coeff(-(k as i64));
        }
        v
    }

    /// Σ cos[k] cos kθ + Σ sin[k−1] sin kθ, constant term ignored.
    pub fn from_trig(cos: &[f64], sin: &[f64]) -> Self {
        Self::from_series(&FourierSeries::from_trig(cos, sin))
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let a = k.unsigned_abs() as usize;
        if k == 0 || a > self.k_max {
            zero()
        } else if k > 0 {
            self.pos[a - 1]
        } else {
            self.neg[a - 1]
        }
    }

    pub fn set(&mut self, k: i64, v: Complex64) {
        let a = k.unsigned_abs() as usize;
        assert!(k != 0 && a <= self.k_max, "mode {k} outside 1 ≤ |k| ≤ {}", self.k_max);
        if k > 0 {
            self.pos[a - 1] = v;
        } else {
            self.neg[a - 1] = v;
        }
    }

    /// f̂_{−k} = conj f̂_k within 1e−12.
    pub fn is_real(&self) -> bool {
        let scale = self.pos.iter().chain(&self.neg).fold(1.0f64, |m, z| m.max(z.norm()));
        self.pos.iter().zip(&self.neg).all(|(p, n)| (p - n.conj()).norm() <= REAL_TOL * scale)
    }

    pub fn to_series(&self) -> FourierSeries {
        let k = self.k_max as i64;
        FourierSeries::new((-k..=k).map(|j| self.coeff(j)).collect()).expect("odd length")
    }

    pub fn add(&self, other: &Self) -> Self {
        let k_max = self.k_max.max(other.k_max);
        let mut out = Self::zero(k_max);
        for k in 1..=k_max as i64 {
            out.set(k, self.coeff(k) + other.coeff(k));
            out.set(-k, self.coeff(-k) + other.coeff(-k));
        }
        out
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            k_max: self.k_max,
            pos: self.pos.iter().map(|z| z * a).collect(),
            neg: self.neg.iter().map(|z| z * a).collect(),
        }
    }

    /// Coordinates in the orthonormal basis e_k/√|k|, ordered k = 1..K then
    /// k = −1..−K.
    pub fn orthonormal_coords(&self) -> Vec<Complex64> {
        let p = self.pos.iter().enumerate().map(|(i, z)| z * ((i + 1) as f64).sqrt());
        let n = self.neg.iter().enumerate().map(|(i, z)| z * ((i + 1) as f64).sqrt());
        p.chain(n).collect()
    }

    pub fn from_orthonormal_coords(k_max: usize, x: &[Complex64]) -> Self {
        assert_eq!(x.len(), 2 * k_max);
        let mut v = Self::zero(k_max);
        for k in 1..=k_max {
            let s = (k as f64).sqrt();
            v.pos[k - 1] = x[k - 1] / s;
            v.neg[k - 1] = x[k_max + k - 1] / s;
        }
        v
    }
}

/// Multiplication by i on positive modes and by −i on negative modes.
pub fn complex_structure(v: &OneParticleVector) -> OneParticleVector {
    let i = Complex64::i();
    OneParticleVector {
        k_max: v.k_max,
        pos: v.pos.iter().map(|z| i * z).collect(),
        neg: v.neg.iter().map(|z| -i * z).collect(),
    }
}

/// ⟨f, g⟩ = Σ_{k≥1} k f̂_k conj(ĝ_k); its real part is the symmetric form
/// ½Σ k (conj f̂_k ĝ_k + f̂_k conj ĝ_k) and its imaginary part is σ(f, g).
pub fn inner_product(f: &OneParticleVector, g: &OneParticleVector) -> Complex64 {
    let k_max = f.k_max.max(g.k_max) as i64;
    (1..=k_max).map(|k| k as f64 * f.coeff(k) * g.coeff(k).conj()).sum()
}

/// Σ_{k≥1} k |f̂_k|².
pub fn seminorm_sq(f: &OneParticleVector) -> f64 {
    f.pos.iter().enumerate().map(|(i, z)| (i + 1) as f64 * z.norm_sqr()).sum()
}

/// σ(f, g) = (1/4π)∫ f g′ dθ = ½ Σ_k ik f̂_{−k} ĝ_k for real f, g.
pub fn symplectic_form(f: &OneParticleVector, g: &OneParticleVector) -> Result<f64> {
    if !f.is_real() || !g.is_real() {
        return Err(Error::Domain("the symplectic form takes real vectors".into()));
    }
    let k_max = f.k_max.max(g.k_max) as i64;
    let mut acc = zero();
    for k in (-k_max..=k_max).filter(|&k| k != 0) {
        acc += Complex64::new(0.0, k as f64) * f.coeff(-k) * g.coeff(k);
    }
    Ok(0.5 * acc.re)
}

/// A complex-linear operator on the complexified one-particle space in the
/// basis e_k/√|k|, split by the signs of the output and input modes.
#[derive(Clone, Debug, PartialEq)]
pub struct RealLinearOp {
    pub k_max: usize,
    /// (k > 0) → (k > 0); entry (m−1, n−1).
    pub pp: DMatrix<Complex64>,
    /// (k < 0) → (k > 0); entry (m−1, |n|−1).
    pub np: DMatrix<Complex64>,
    /// (k > 0) → (k < 0); entry (|m|−1, n−1).
    pub pn: DMatrix<Complex64>,
    /// (k < 0) → (k < 0).
    pub nn: DMatrix<Complex64>,
}

impl RealLinearOp {
    pub fn zeros(k_max: usize) -> Self {
        let z = DMatrix::from_element(k_max, k_max, zero());
        Self { k_max, pp: z.clone(), np: z.clone(), pn: z.clone(), nn: z }
    }

    pub fn identity(k_max: usize) -> Self {
        let mut op = Self::zeros(k_max);
        op.pp.fill_with_identity();
        op.nn.fill_with_identity();
        op
    }

    /// Full 2K × 2K matrix, positive modes first.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let k = self.k_max;
        let mut m = DMatrix::from_element(2 * k, 2 * k, zero());
        m.view_mut((0, 0), (k, k)).copy_from(&self.pp);
        m.view_mut((0, k), (k, k)).copy_from(&self.np);
        m.view_mut((k, 0), (k, k)).copy_from(&self.pn);
        m.view_mut((k, k), (k, k)).copy_from(&self.nn);
        m
    }

    pub fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        let k = m.nrows() / 2;
        Self {
            k_max: k,
            pp: m.view((0, 0), (k, k)).into_owned(),
            np: m.view((0, k), (k, k)).into_owned(),
            pn: m.view((k, 0), (k, k)).into_owned(),
            nn: m.view((k, k), (k, k)).into_owned(),
        }
    }

    pub fn apply(&self, v: &OneParticleVector) -> OneParticleVector {
        let mut w = OneParticleVector::zero(self.k_max);
        for k in 1..=v.k_max.min(self.k_max) as i64 {
            w.set(k, v.coeff(k));
            w.set(-k, v.coeff(-k));
        }
        let x = nalgebra::DVector::from_vec(w.orthonormal_coords());
        let y = self.to_matrix() * x;
        OneParticleVector::from_orthonormal_coords(self.k_max, y.as_slice())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix(&(self.to_matrix() * other.to_matrix()))
    }

    /// Largest entry modulus among the (k>0→k>0) and (k<0→k<0) blocks.
    pub fn same_sign_max(&self) -> f64 {
        self.pp.iter().chain(self.nn.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn hs_norm(&self) -> f64 {
        [&self.pp, &self.np, &self.pn, &self.nn].iter().flat_map(|b| b.iter()).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// J as a matrix on the complexified space.
pub fn j_operator(k_max: usize) -> RealLinearOp {
    let mut op = RealLinearOp::zeros(k_max);
    for k in 0..k_max {
        op.pp[(k, k)] = Complex64::i();
        op.nn[(k, k)] = -Complex64::i();
    }
    op
}

fn signed_modes(k_max: usize) -> (Vec<i64>, Vec<i64>) {
    let pos: Vec<i64> = (1..=k_max as i64).collect();
    let neg: Vec<i64> = pos.iter().map(|k| -k).collect();
    (pos, neg)
}

/// V(γ)[f] = [f ∘ γ⁻¹]: entry (m, n) = √(|m|/|n|) λ_{m,n}(γ⁻¹).
pub fn v_gamma(g: &CircleMap, k_max: usize) -> Result<RealLinearOp> {
    if k_max == 0 {
        return Err(Error::Domain("cutoff K must be positive".into()));
    }
    if g.is_identity() {
        return Ok(RealLinearOp::identity(k_max));
    }
    let probe = LambdaBatch::new(g, 64.0, DEFAULT_PANEL_PHASE)?;
    let omega = k_max as f64 * (probe.max_slope() + 1.0);
    let batch = LambdaBatch::new(g, omega, DEFAULT_PANEL_PHASE)?;
    let (pos, neg) = signed_modes(k_max);
    let mut all = pos.clone();
    all.extend(&neg);
    let lam = batch.matrix(&all, &all, true);
    let d = 2 * k_max;
    let full = DMatrix::from_fn(d, d, |i, j| {
        let (m, n) = (all[i], all[j]);
        lam[i * d + j] * (m.unsigned_abs() as f64 / n.unsigned_abs() as f64).sqrt()
    });
    Ok(RealLinearOp::from_matrix(&full))
}

/// ½J[V, J] = ½(JVJ + V).
pub fn a_from_v(v: &RealLinearOp) -> RealLinearOp {
    let j = j_operator(v.k_max).to_matrix();
    let vm = v.to_matrix();
    let a = (&j * &vm * &j + &vm) * Complex64::new(0.5, 0.0);
    RealLinearOp::from_matrix(&a)
}

pub fn a_operator(g: &CircleMap, k_max: usize) -> Result<RealLinearOp> {
    Ok(a_from_v(&v_gamma(g, k_max)?))
}

/// max |AJ + JA|.
pub fn antilinearity_residual(a: &RealLinearOp) -> f64 {
    let j = j_operator(a.k_max).to_matrix();
    let am = a.to_matrix();
    (&am * &j + &j * &am).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Three-valued implementability reading of a Hilbert–Schmidt sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Diverging,
    Inconclusive,
}

/// Thresholds for [`Verdict`]: a last-step increase below `tail` means
/// converged, a last-step relative growth above `growth` means diverging.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictThresholds {
    pub tail: f64,
    pub growth: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        Self { tail: 1e-6, growth: 0.10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsSweep {
    pub cutoffs: Vec<usize>,
    pub hs: Vec<f64>,
    pub verdict: Verdict,
    /// hs(K_last) − hs(K_prev).
    pub tail: f64,
    /// hs(K_last)/hs(K_prev) − 1.
    pub growth: f64,
}

pub fn classify_sweep(hs: &[f64], th: VerdictThresholds) -> (Verdict, f64, f64) {
    if hs.len() < 2 {
        return (Verdict::Inconclusive, f64::NAN, f64::NAN);
    }
    let (a, b) = (hs[hs.len() - 2], hs[hs.len() - 1]);
    let tail = b - a;
    let growth = if a > 0.0 { b / a - 1.0 } else if b > 0.0 { f64::INFINITY } else { 0.0 };
    let verdict = if tail.abs() < th.tail {
        Verdict::Converged
    } else if growth > th.growth {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    };
    (verdict, tail, growth)
}

/// ‖A‖_HS at each cutoff from one set of λ values at the largest cutoff.
/// Partial sums are nested in a fixed order, so the sequence is
/// non-decreasing.
pub fn hs_norm_sweep(g: &CircleMap, cutoffs: &[usize]) -> Result<HsSweep> {
    hs_norm_sweep_with(g, cutoffs, VerdictThresholds::default())
}

pub fn hs_norm_sweep_with(g: &CircleMap, cutoffs: &[usize], th: VerdictThresholds) -> Result<HsSweep> {
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[0] >= w[1]) || cutoffs[0] == 0 {
        return Err(Error::Domain("cutoffs must be positive and strictly increasing".into()));
    }
    let kmax = *cutoffs.last().unwrap();
    let weights = if g.is_identity() || g.as_rotation().is_some() {
        vec![0.0; kmax * kmax]
    } else {
        let probe = LambdaBatch::new(g, 64.0, DEFAULT_PANEL_PHASE)?;
        let omega = kmax as f64 * (probe.max_slope() + 1.0);
        let batch = LambdaBatch::new(g, omega, DEFAULT_PANEL_PHASE)?;
        let (pos, neg) = signed_modes(kmax);
        let lam = batch.matrix(&pos, &neg, true);
        // |A_{m,n}|² on m > 0 > n; the m < 0 < n block is its conjugate
        let mut w = vec![0.0; kmax * kmax];
        for m in 1..=kmax {
            for n in 1..=kmax {
                w[(m - 1) * kmax + n - 1] = m as f64 / n as f64 * lam[(m - 1) * kmax + n - 1].norm_sqr();
            }
        }
        w
    };
    let mut hs = vec![];
    let mut acc = 0.0;
    let mut done = 0;
    for &k in cutoffs {
        // shell by shell: new rows and columns between the previous cutoff and k
        for m in 1..=k {
            let start = if m <= done { done + 1 } else { 1 };
            for n in start..=k {
                acc += 2.0 * weights[(m - 1) * kmax + n - 1];
            }
        }
        done = k;
        hs.push(acc.sqrt());
    }
    let (verdict, tail, growth) = classify_sweep(&hs, th);
    Ok(HsSweep { cutoffs: cutoffs.to_vec(), hs, verdict, tail, growth })
}

/// Σ_{p=2}^{pmax} C²(p−1)(2 + log p)/p^{2(s−1)}.
pub fn hs_series_bound(s: f64, c: f64, pmax: usize) -> Result<f64> {
    if !(s > 1.5) {
        return Err(Error::Domain(format!("s = {s} must exceed 3/2")));
    }
    let mut acc = 0.0;
    for p in 2..=pmax {
        let pf = p as f64;
        acc += (pf - 1.0) * (2.0 + pf.ln()) / pf.powf(2.0 * (s - 1.0));
    }
    Ok(c * c * acc)
}
