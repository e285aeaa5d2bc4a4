//! Truncated symmetric Fock space over finitely many modes.

use super::OneParticleVector;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

const MAX_DIM: usize = 1 << 14;

/// Occupation-number basis over `modes` with at most `n_max` quanta per
/// mode. Tuples are ordered lexicographically, first mode most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFock {
    modes: Vec<usize>,
    n_max: usize,
    basis: Vec<Vec<usize>>,
}

impl TruncatedFock {
    pub fn new(modes: Vec<usize>, n_max: usize) -> Result<Self> {
        if modes.is_empty() || modes.contains(&0) {
            return Err(Error::Domain("modes must be a nonempty list of positive integers".into()));
        }
        let mut sorted = modes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != modes.len() {
            return Err(Error::Domain("modes must be distinct".into()));
        }
        let dim = (n_max + 1).checked_pow(modes.len() as u32).filter(|&d| d <= MAX_DIM);
        let Some(dim) = dim else {
            return Err(Error::Domain(format!("Fock dimension exceeds {MAX_DIM}")));
        };
        let m = modes.len();
        let basis = (0..dim)
            .map(|mut i| {
                let mut occ = vec![0; m];
                for slot in occ.iter_mut().rev() {
                    *slot = i % (n_max + 1);
                    i /= n_max + 1;
                }
                occ
            })
            .collect();
        Ok(Self { modes, n_max, basis })
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    pub fn index_of(&self, occ: &[usize]) -> Option<usize> {
        if occ.len() != self.modes.len() || occ.iter().any(|&n| n > self.n_max) {
            return None;
        }
        Some(occ.iter().fold(0, |acc, &n| acc * (self.n_max + 1) + n))
    }

    /// Basis states with total occupation ≤ n_max/2.
    pub fn safe_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].iter().sum::<usize>() <= self.n_max / 2).collect()
    }

    /// Largest column 2-norm of a − b over the safe sector.
    pub fn sector_residual(&self, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        self.safe_indices()
            .into_iter()
            .map(|j| (a.column(j) - b.column(j)).norm())
            .fold(0.0, f64::max)
    }

    /// Positive-mode coordinates √k f̂_k on the Fock modes.
    fn alpha(&self, f: &OneParticleVector) -> Result<Vec<Complex64>> {
        for k in 1..=f.k_max() {
            if !self.modes.contains(&k) && f.coeff(k as i64).norm() > 0.0 {
                return Err(Error::Domain(format!("vector has mode {k}, which is not among the Fock modes")));
            }
        }
        Ok(self.modes.iter().map(|&k| f.coeff(k as i64) * (k as f64).sqrt()).collect())
    }

    /// Applies a unitary on the mode coordinates √k f̂_k and returns the
    /// real vector with those positive modes.
    pub fn transform(&self, u: &DMatrix<Complex64>, f: &OneParticleVector) -> Result<OneParticleVector> {
        let a = nalgebra::DVector::from_vec(self.alpha(f)?);
        let b = u * a;
        let k_max = *self.modes.iter().max().unwrap();
        let mut out = OneParticleVector::zero(k_max);
        for (i, &k) in self.modes.iter().enumerate() {
            let c = b[i] / (k as f64).sqrt();
            out.set(k as i64, c);
            out.set(-(k as i64), c.conj());
        }
        Ok(out)
    }
}

/// Displacement amplitudes z_k = i conj(√k f̂_k)/√2, chosen so that
/// W(f)W(g) = e^{−i Im⟨f,g⟩/2} W(f+g).
pub fn weyl_amplitudes(fock: &TruncatedFock, f: &OneParticleVector) -> Result<Vec<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(fock.alpha(f)?.into_iter().map(|a| Complex64::i() * a.conj() * s).collect())
}

/// exp(−iH) for Hermitian H.
fn exp_minus_i(h: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = h.symmetric_eigen();
    let u = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l)));
    u * d * u.adjoint()
}

fn single_mode_displacement(z: Complex64, n_max: usize) -> DMatrix<Complex64> {
    let d = n_max + 1;
    // H = i(z a† − z̄ a), so exp(−iH) = exp(z a† − z̄ a)
    let mut h = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for n in 0..n_max {
        let s = ((n + 1) as f64).sqrt();
        h[(n + 1, n)] = Complex64::i() * z * s;
        h[(n, n + 1)] = -Complex64::i() * z.conj() * s;
    }
    exp_minus_i(h)
}

/// W(f) = ⊗_k exp(z_k a_k† − z̄_k a_k).
pub fn weyl_matrix(fock: &TruncatedFock, f: &OneParticleVector) -> Result<DMatrix<Complex64>> {
    let z = weyl_amplitudes(fock, f)?;
    let mut w = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for zk in z {
        w = w.kronecker(&single_mode_displacement(zk, fock.n_max));
    }
    Ok(w)
}

fn factorial_sqrt(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).sqrt()).product()
}

/// Γ₊(u) for a unitary u on the mode coordinates. Weyl amplitudes carry
/// conj(√k f̂_k), so the Fock operator is built from conj(u); this makes
/// Γ₊(u) W(f) Γ₊(u)† = W(uf).
pub fn second_quantize(fock: &TruncatedFock, u: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let m = fock.modes.len();
    if u.shape() != (m, m) {
        return Err(Error::Domain(format!("unitary must be {m}×{m}")));
    }
    let defect = (u.adjoint() * u - DMatrix::identity(m, m)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > 1e-10 {
        return Err(Error::Domain(format!("matrix is not unitary (defect {defect:e})")));
    }
    let v = u.map(|z| z.conj());
    let d = fock.dim();
    let mut out = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for (j, occ) in fock.basis.iter().enumerate() {
        // polynomial in creation operators: monomial exponents → coefficient
        let mut poly: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        poly.insert(vec![0; m], Complex64::new(1.0, 0.0));
        for (k, &nk) in occ.iter().enumerate() {
            for _ in 0..nk {
                let mut next = BTreeMap::new();
                for (mono, c) in &poly {
                    for i in 0..m {
                        let a = v[(i, k)];
                        if a.norm() == 0.0 {
                            continue;
                        }
                        let mut e = mono.clone();
                        e[i] += 1;
                        *next.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c * a;
                    }
                }
                poly = next;
            }
        }
        let norm: f64 = occ.iter().map(|&n| factorial_sqrt(n)).product();
        for (mono, c) in poly {
            if let Some(i) = fock.index_of(&mono) {
                let amp: f64 = mono.iter().map(|&n| factorial_sqrt(n)).product();
                out[(i, j)] += c * amp / norm;
            }
        }
    }
    Ok(out)
}

/// A Haar-distributed m×m unitary from a seeded complex Gaussian matrix.
pub fn random_unitary(m: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = DMatrix::from_fn(m, m, |_, _| {
        Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Safe-sector residual of W(f)W(g) = e^{−i Im⟨f,g⟩/2} W(f+g).
pub fn weyl_relation_residual(fock: &TruncatedFock, f: &OneParticleVector, g: &OneParticleVector) -> Result<f64> {
    let wf = weyl_matrix(fock, f)?;
    let wg = weyl_matrix(fock, g)?;
    let wfg = weyl_matrix(fock, &f.add(g))?;
    let phase = Complex64::from_polar(1.0, -super::inner_product(f, g).im / 2.0);
    Ok(fock.sector_residual(&(wf * wg), &(wfg * phase)))
}

/// Safe-sector residual of Γ₊(u)W(f)Γ₊(u)† = W(uf).
pub fn covariance_residual(fock: &TruncatedFock, u: &DMatrix<Complex64>, f: &OneParticleVector) -> Result<f64> {
    let gam = second_quantize(fock, u)?;
    let lhs = &gam * weyl_matrix(fock, f)? * gam.adjoint();
    let rhs = weyl_matrix(fock, &fock.transform(u, f)?)?;
    Ok(fock.sector_residual(&lhs, &rhs))
}

/// Safe-sector residual of Γ₊(uv) = Γ₊(u)Γ₊(v). Γ₊ preserves the total
/// occupation, which the per-mode cutoff only represents up to n_max.
pub fn functoriality_residual(fock: &TruncatedFock, u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> Result<f64> {
    let lhs = second_quantize(fock, &(u * v))?;
    let rhs = second_quantize(fock, u)? * second_quantize(fock, v)?;
    Ok(fock.sector_residual(&lhs, &rhs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub modes: Vec<usize>,
    pub n_max: usize,
    pub weyl_relation: f64,
    pub weyl_unitarity: f64,
    pub covariance: f64,
    pub functoriality: f64,
    pub seed: u64,
}

/// Weyl relation for (f, g), unitarity of W(f), and covariance and
/// functoriality of Γ₊ for seeded random unitaries.
pub fn weyl_check(fock: &TruncatedFock, f: &OneParticleVector, g: &OneParticleVector, seed: u64) -> Result<WeylReport> {
    let m = fock.modes().len();
    let (u, v) = (random_unitary(m, seed), random_unitary(m, seed.wrapping_add(1)));
    let wf = weyl_matrix(fock, f)?;
    let id = DMatrix::identity(fock.dim(), fock.dim());
    Ok(WeylReport {
        modes: fock.modes().to_vec(),
        n_max: fock.n_max(),
        weyl_relation: weyl_relation_residual(fock, f, g)?,
        weyl_unitarity: fock.sector_residual(&(wf.adjoint() * &wf), &id),
        covariance: covariance_residual(fock, &u, f)?,
        functoriality: functoriality_residual(fock, &u, &v)?,
        seed,
    })
}
