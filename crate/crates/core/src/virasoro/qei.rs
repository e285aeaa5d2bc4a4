//! Quantum energy inequality bound and its check on exact-block states.

use super::stress::stress_matrix;
use super::VermaLevelSpace;
use crate::circle_diffeo::{Side, VectorField};
use crate::error::{Error, Result};
use crate::fourier_sobolev::FourierSeries;
use crate::quadrature::periodic_rule;
use crate::taylor::{Real, Taylor};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How a circle field f is carried to the line function ρ = C_*f.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmearingPicture {
    /// ρ(t) = f(θ) · 2/(1 + t²), so f ≡ 1 gives 2/(1 + t²).
    #[default]
    Density,
    /// ρ(t) = f(θ) · (1 + t²)/2, the pushforward of f ∂_θ.
    VectorField,
}

const TAIL: f64 = 1e-14;

/// −(c/12π)∫_ℝ (d/dt √ρ)² dt in the density picture.
pub fn qei_bound(f: &VectorField, c: f64) -> Result<f64> {
    qei_bound_with(f, c, SmearingPicture::Density)
}

fn integrate(f: &VectorField, picture: SmearingPicture, width: f64) -> Result<f64> {
    let rule = periodic_rule(&f.breakpoints(), width, 16);
    let mut acc = 0.0;
    for (&th, &w) in rule.nodes.iter().zip(&rule.weights) {
        let x = Taylor::<2>::variable(th);
        let half = (x * 0.5).cos();
        // 1 + cos θ = 2cos²(θ/2) without cancellation near π
        let one_plus_cos = half * half * 2.0;
        let fv = f.eval_t(x, Side::Above);
        let rho = match picture {
            SmearingPicture::Density => fv * one_plus_cos,
            SmearingPicture::VectorField => fv / one_plus_cos,
        };
        let r = rho.deriv(0);
        if !r.is_finite() {
            continue;
        }
        if r < -TAIL {
            return Err(Error::Precondition(format!("C_*f is negative ({r:e}) at θ = {th}")));
        }
        if r < TAIL {
            continue;
        }
        let dr = rho.deriv(1);
        // (dρ/dt)² dt / 4ρ with dθ/dt = 1 + cos θ
        acc += w * dr * dr * one_plus_cos.deriv(0) / (4.0 * r);
    }
    Ok(acc)
}

pub fn qei_bound_with(f: &VectorField, c: f64, picture: SmearingPicture) -> Result<f64> {
    for k in 0..4096 {
        let th = -PI + 2.0 * PI * (k as f64 + 0.5) / 4096.0;
        let v = f.eval(th);
        if v < -TAIL {
            return Err(Error::Precondition(format!("field is negative ({v:e}) at θ = {th}")));
        }
    }
    let mut width = 0.1;
    let mut prev = integrate(f, picture, width)?;
    for _ in 0..5 {
        width /= 2.0;
        let next = integrate(f, picture, width)?;
        let done = (next - prev).abs() <= 1e-13 * next.abs().max(1e-300);
        prev = next;
        if done {
            break;
        }
    }
    Ok(-c / (12.0 * PI) * prev)
}

/// Exact Fourier series of a trigonometric-polynomial field.
pub fn series_of_field(f: &VectorField) -> Option<FourierSeries> {
    match f {
        VectorField::Trig { cos, sin } => Some(FourierSeries::from_trig(cos, sin)),
        VectorField::Scaled(a, g) => Some(series_of_field(g)?.scale(*a)),
        VectorField::Sum(items) => {
            let mut acc = FourierSeries::zero(0);
            for g in items {
                acc = acc.add_series(&series_of_field(g)?);
            }
            Some(acc)
        }
        _ => None,
    }
}

/// Per-level orthonormal coordinates for the Shapovalov form; null
/// directions are discarded.
#[derive(Clone, Debug)]
pub struct OrthonormalFrame {
    /// Frame vectors as PBW columns, Gram-orthonormal.
    pub embed: DMatrix<f64>,
    /// Coordinates map: x = coords · v for v in PBW coordinates.
    pub coords: DMatrix<f64>,
    pub levels: usize,
}

impl OrthonormalFrame {
    /// Frame for levels ≤ `levels`; fails when a Gram block has a negative
    /// eigenvalue below −1e−9 relative to its scale.
    pub fn new(space: &VermaLevelSpace, levels: usize) -> Result<Self> {
        let d = space.dim_through(levels);
        let mut cols: Vec<(usize, Vec<f64>, f64)> = vec![];
        for l in 0..=levels.min(space.max_level()) {
            let r = space.level_range(l);
            let eig = space.gram(l).clone().symmetric_eigen();
            let scale = eig.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            for (k, &lam) in eig.eigenvalues.iter().enumerate() {
                if lam < -1e-9 * scale {
                    return Err(Error::Precondition(format!(
                        "Gram block at level {l} has eigenvalue {lam:e}; the module is not unitary"
                    )));
                }
                if lam > 1e-10 * scale {
                    let mut v = vec![0.0; d];
                    for (a, i) in r.clone().enumerate() {
                        v[i] = eig.eigenvectors[(a, k)];
                    }
                    cols.push((l, v, lam));
                }
            }
        }
        let k = cols.len();
        let mut embed = DMatrix::zeros(d, k);
        let mut coords = DMatrix::zeros(k, d);
        for (j, (_, v, lam)) in cols.iter().enumerate() {
            for i in 0..d {
                embed[(i, j)] = v[i] / lam.sqrt();
                coords[(j, i)] = v[i] * lam.sqrt();
            }
        }
        Ok(Self { embed, coords, levels })
    }

    pub fn dim(&self) -> usize {
        self.embed.ncols()
    }
}

/// T(f) in an orthonormal frame of the exact block, Hermitian for real f.
fn frame_operator(space: &VermaLevelSpace, series: &FourierSeries) -> Result<(DMatrix<Complex64>, OrthonormalFrame)> {
    let t = stress_matrix(space, series)?;
    let frame = OrthonormalFrame::new(space, t.exact_level)?;
    let d = space.dim_through(t.exact_level);
    let block = t.matrix.view((0, 0), (d, d)).into_owned();
    let e = frame.embed.map(|x| Complex64::new(x, 0.0));
    // ⟨Ex, G T E y⟩ = x† (E†G) T E y and E†G = coords on the block
    let dmat = frame.coords.map(|x| Complex64::new(x, 0.0));
    let op = dmat * block * e;
    let op = (&op + op.adjoint()) * Complex64::new(0.5, 0.0);
    Ok((op, frame))
}

fn field_series(space: &VermaLevelSpace, f: &VectorField) -> Result<FourierSeries> {
    let series = series_of_field(f)
        .ok_or_else(|| Error::Domain("stress-tensor checks need a trigonometric polynomial field".into()))?;
    let m = series.max_mode();
    if 2 * m > space.max_level() {
        return Err(Error::Truncation(format!("max mode {m} exceeds N/2 = {}", space.max_level() / 2)));
    }
    Ok(series)
}

/// Smallest eigenvalue of T(f) on the exact block, orthonormal frame.
pub fn exact_block_min_eigenvalue(space: &VermaLevelSpace, f: &FourierSeries) -> Result<f64> {
    let (op, _) = frame_operator(space, f)?;
    let eig = op.symmetric_eigen();
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QeiReport {
    pub bound: f64,
    pub min_expectation: f64,
    pub min_gap: f64,
    pub frame_dim: usize,
    pub trials: usize,
    pub seed: u64,
}

/// min over seeded random unit states ψ on the exact block of
/// ⟨ψ, T(f)ψ⟩ − qei_bound(f, c).
pub fn qei_check(space: &VermaLevelSpace, f: &VectorField, c: f64, trials: usize, seed: u64) -> Result<QeiReport> {
    let series = field_series(space, f)?;
    let bound = qei_bound(f, c)?;
    let (op, frame) = frame_operator(space, &series)?;
    let k = frame.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_e = f64::INFINITY;
    for _ in 0..trials {
        let x: Vec<Complex64> = (0..k)
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let x = nalgebra::DVector::from_iterator(k, x.into_iter().map(|z| z / norm));
        let e = (x.adjoint() * &op * &x)[(0, 0)].re;
        min_e = min_e.min(e);
    }
    Ok(QeiReport { bound, min_expectation: min_e, min_gap: min_e - bound, frame_dim: k, trials, seed })
}
