//! Fourier analysis on the circle: coefficients, Sobolev norms, the
//! oscillatory integrals λ_{m,n} and the translation-generator families.

mod families;
mod lambda;

pub use families::{half_cutoffs, third_derivative_l1, translation_family, translation_one, HalfCutoffs};
pub use lambda::{
    ds_membership, ds_sweep, lambda_decay_report, lambda_matrix, lambda_mn, DecayReport, LambdaBatch,
    DEFAULT_PANEL_PHASE,
};

use crate::circle_diffeo::VectorField;
use crate::error::{Error, Result};
use crate::quadrature::periodic_rule;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Truncated Fourier coefficients f̂_k, k ∈ [−K, K].
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    k_max: usize,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl FourierSeries {
    /// Coefficients listed from k = −K to K. The reality flag is set when
    /// f̂_{−k} = conj f̂_k holds to 1e−12.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::Domain("coefficient list must have odd length 2K + 1".into()));
        }
        let k_max = coeffs.len() / 2;
        let scale = coeffs.iter().fold(1.0f64, |m, c| m.max(c.norm()));
        let real = (0..=k_max).all(|k| (coeffs[k_max + k] - coeffs[k_max - k].conj()).norm() <= 1e-12 * scale);
        Ok(Self { k_max, coeffs, real })
    }

    pub fn zero(k_max: usize) -> Self {
        Self { k_max, coeffs: vec![Complex64::new(0.0, 0.0); 2 * k_max + 1], real: true }
    }

    /// The single mode e_k(θ) = e^{ikθ}.
    pub fn mode(k: i64, k_max: usize) -> Self {
        let mut s = Self::zero(k_max.max(k.unsigned_abs() as usize));
        s.set(k, Complex64::new(1.0, 0.0));
        s.real = k == 0;
        s
    }

    /// Σ cos[k] cos kθ + Σ sin[k−1] sin kθ.
    pub fn from_trig(cos: &[f64], sin: &[f64]) -> Self {
        let k_max = cos.len().saturating_sub(1).max(sin.len());
        let mut s = Self::zero(k_max);
        for (k, &a) in cos.iter().enumerate() {
            if k == 0 {
                s.set(0, Complex64::new(a, 0.0));
            } else {
                s.add(k as i64, Complex64::new(a / 2.0, 0.0));
                s.add(-(k as i64), Complex64::new(a / 2.0, 0.0));
            }
        }
        for (j, &b) in sin.iter().enumerate() {
            let k = (j + 1) as i64;
            s.add(k, Complex64::new(0.0, -b / 2.0));
            s.add(-k, Complex64::new(0.0, b / 2.0));
        }
        s
    }

    /// Equispaced samples at θ_j = 2πj/n; needs n ≥ 2K + 1.
    pub fn from_samples(samples: &[Complex64], k_max: usize) -> Result<Self> {
        let n = samples.len();
        if n < 2 * k_max + 1 {
            return Err(Error::Resolution { needed: 2 * k_max + 1, got: n });
        }
        let mut out = Vec::with_capacity(2 * k_max + 1);
        for k in -(k_max as i64)..=(k_max as i64) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in samples.iter().enumerate() {
                let th = 2.0 * PI * ((k * j as i64).rem_euclid(n as i64)) as f64 / n as f64;
                acc += v * Complex64::from_polar(1.0, -th);
            }
            out.push(acc / n as f64);
        }
        Self::new(out)
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.k_max as i64) as usize]
        }
    }

    fn set(&mut self, k: i64, v: Complex64) {
        let i = (k + self.k_max as i64) as usize;
        self.coeffs[i] = v;
    }

    fn add(&mut self, k: i64, v: Complex64) {
        let i = (k + self.k_max as i64) as usize;
        self.coeffs[i] += v;
    }

    /// Largest |k| with a nonzero coefficient.
    pub fn max_mode(&self) -> usize {
        (0..=self.k_max)
            .rev()
            .find(|&k| self.coeff(k as i64).norm() > 0.0 || self.coeff(-(k as i64)).norm() > 0.0)
            .unwrap_or(0)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -(self.k_max as i64)..=(self.k_max as i64) {
            acc += self.coeff(k) * Complex64::from_polar(1.0, k as f64 * theta);
        }
        acc
    }

    /// Values at θ_j = 2πj/n.
    pub fn synthesize(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|j| self.eval(2.0 * PI * j as f64 / n as f64)).collect()
    }

    /// The θ-derivative.
    pub fn derivative(&self) -> Self {
        let mut out = self.clone();
        for k in -(self.k_max as i64)..=(self.k_max as i64) {
            out.set(k, self.coeff(k) * Complex64::new(0.0, k as f64));
        }
        out
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= a);
        out
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let k_max = self.k_max.max(other.k_max);
        let mut out = Self::zero(k_max);
        for k in -(k_max as i64)..=(k_max as i64) {
            out.set(k, self.coeff(k) + other.coeff(k));
        }
        out.real = self.real && other.real;
        out
    }

    /// Pointwise product; the cutoff is the sum of the two cutoffs.
    pub fn product(&self, other: &Self) -> Self {
        let k_max = self.k_max + other.k_max;
        let mut out = Self::zero(k_max);
        for a in -(self.k_max as i64)..=(self.k_max as i64) {
            let ca = self.coeff(a);
            if ca.norm() == 0.0 {
                continue;
            }
            for b in -(other.k_max as i64)..=(other.k_max as i64) {
                out.add(a + b, ca * other.coeff(b));
            }
        }
        out.real = self.real && other.real;
        out
    }

    /// Real trig coefficients (cos[0..=K], sin[1..=K]) of a real series.
    pub fn to_trig(&self) -> (Vec<f64>, Vec<f64>) {
        let mut cos = vec![self.coeff(0).re];
        let mut sin = vec![];
        for k in 1..=self.k_max as i64 {
            let (p, m) = (self.coeff(k), self.coeff(-k));
            cos.push((p + m).re);
            sin.push((Complex64::i() * (p - m)).re);
        }
        (cos, sin)
    }

    /// (Σ (1 + k²)^s |f̂_k|²)^{1/2}.
    pub fn h_s_norm(&self, s: f64) -> f64 {
        h_s_norm(self, s)
    }

    /// Σ |f̂_k| (1 + |k|^{3/2}).
    pub fn norm_3_2(&self) -> f64 {
        norm_3_2(self)
    }
}

/// Sobolev norm over the stored modes.
pub fn h_s_norm(f: &FourierSeries, s: f64) -> f64 {
    let mut acc = 0.0;
    for k in -(f.k_max as i64)..=(f.k_max as i64) {
        let c = f.coeff(k).norm_sqr();
        if c > 0.0 {
            acc += (1.0 + (k * k) as f64).powf(s) * c;
        }
    }
    acc.sqrt()
}

/// The ‖·‖_{3/2} norm Σ |f̂_k| (1 + |k|^{3/2}).
pub fn norm_3_2(f: &FourierSeries) -> f64 {
    let mut acc = 0.0;
    for k in -(f.k_max as i64)..=(f.k_max as i64) {
        acc += f.coeff(k).norm() * (1.0 + (k.unsigned_abs() as f64).powf(1.5));
    }
    acc
}

/// Constant with ‖f‖_{3/2} ≤ C ‖f‖_{H^s} for s > 2, by Cauchy–Schwarz:
/// C² = Σ_k (1 + |k|^{3/2})² (1 + k²)^{−s}. The tail beyond `terms` is
/// bounded by an integral.
pub fn embedding_constant(s: f64, terms: usize) -> Result<f64> {
    if s <= 2.0 {
        return Err(Error::Domain(format!("the ‖·‖_3/2 embedding needs s > 2, got {s}")));
    }
    let mut acc = 1.0;
    for k in 1..=terms {
        let kf = k as f64;
        acc += 2.0 * (1.0 + kf.powf(1.5)).powi(2) / (1.0 + kf * kf).powf(s);
    }
    // (1 + k^{3/2})² ≤ 4 k³ and (1 + k²)^{−s} ≤ k^{−2s} for k ≥ 1.
    let kt = terms as f64;
    acc += 2.0 * 4.0 * kt.powf(4.0 - 2.0 * s) / (2.0 * s - 4.0);
    Ok(acc.sqrt())
}

/// f̂_k from `samples` equispaced values of a callable; `samples` must be
/// at least 4K (and at least 1).
pub fn fourier_coeffs(f: impl Fn(f64) -> Complex64, k_max: usize, samples: usize) -> Result<FourierSeries> {
    let needed = (4 * k_max).max(2 * k_max + 1);
    if samples < needed {
        return Err(Error::Resolution { needed, got: samples });
    }
    let vals: Vec<Complex64> = (0..samples).map(|j| f(2.0 * PI * j as f64 / samples as f64)).collect();
    FourierSeries::from_samples(&vals, k_max)
}

/// f̂_k of a real piecewise smooth function by Gauss panels split at
/// `breaks`.
pub fn fourier_coeffs_piecewise(f: impl Fn(f64) -> f64, k_max: usize, breaks: &[f64]) -> FourierSeries {
    let width = (6.0 / (k_max.max(1) as f64)).min(PI / 8.0);
    let rule = periodic_rule(breaks, width, 16);
    let vals: Vec<f64> = rule.nodes.iter().map(|&t| f(t)).collect();
    let mut pos = vec![Complex64::new(0.0, 0.0); k_max + 1];
    for ((&t, &w), &v) in rule.nodes.iter().zip(&rule.weights).zip(&vals) {
        let step = Complex64::from_polar(1.0, -t);
        let mut ph = Complex64::new(w * v, 0.0);
        for (k, slot) in pos.iter_mut().enumerate() {
            if k % 64 == 0 && k > 0 {
                ph = Complex64::from_polar(w * v, -(k as f64) * t);
            }
            *slot += ph;
            ph *= step;
        }
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
    for k in 0..=k_max {
        let c = pos[k] / (2.0 * PI);
        coeffs[k_max + k] = c;
        coeffs[k_max - k] = c.conj();
    }
    FourierSeries { k_max, coeffs, real: true }
}

/// Coefficients of a vector field: exact for trig polynomials, panel
/// quadrature otherwise.
pub fn field_coeffs(f: &VectorField, k_max: usize) -> FourierSeries {
    if let VectorField::Trig { cos, sin } = f {
        let full = FourierSeries::from_trig(cos, sin);
        let mut out = FourierSeries::zero(k_max);
        for k in -(k_max as i64)..=(k_max as i64) {
            out.set(k, full.coeff(k));
        }
        return out;
    }
    if let VectorField::Scaled(a, inner) = f {
        return field_coeffs(inner, k_max).scale(*a);
    }
    fourier_coeffs_piecewise(|t| f.eval(t), k_max, &f.breakpoints())
}
