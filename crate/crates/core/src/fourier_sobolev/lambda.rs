use super::{fourier_coeffs_piecewise, h_s_norm};
use crate::circle_diffeo::{CircleMap, Side};
use crate::error::{Error, Result};
use crate::quadrature::periodic_rule;
use crate::taylor::Taylor;
use matrixmultiply::{zgemm, CGemmOption};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest phase change ω·h allowed across one 16-point Gauss panel.
pub const DEFAULT_PANEL_PHASE: f64 = 8.0;

const PANEL_ORDER: usize = 16;
const CHUNK: usize = 2048;

/// Samples of a lift on a breakpoint-aware Gauss rule over one period,
/// reusable for many (m, n) pairs.
#[derive(Clone, Debug)]
pub struct LambdaBatch {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    rotation: Option<f64>,
}

impl LambdaBatch {
    /// Samples γ on panels fine enough for frequencies up to `omega`.
    pub fn new(g: &CircleMap, omega: f64, panel_phase: f64) -> Result<Self> {
        if let Some(a) = g.as_rotation() {
            return Ok(Self { nodes: vec![], weights: vec![], values: vec![], slopes: vec![], rotation: Some(a) });
        }
        let width = (panel_phase / omega.max(1.0)).min(PI / 4.0);
        let rule = periodic_rule(g.breakpoints(), width, PANEL_ORDER);
        let samples: Vec<(f64, f64)> = rule
            .nodes
            .par_iter()
            .map(|&t| {
                let v = g.lift_t(Taylor::<2>::variable(t), Side::Above);
                (v.c[0], v.c[1])
            })
            .collect();
        if samples.iter().any(|(v, d)| !v.is_finite() || !(*d > 0.0)) {
            return Err(Error::Numeric("lift samples are not finite and increasing".into()));
        }
        let (values, slopes) = samples.into_iter().unzip();
        Ok(Self { nodes: rule.nodes, weights: rule.weights, values, slopes, rotation: None })
    }

    /// Largest sampled derivative of the lift.
    pub fn max_slope(&self) -> f64 {
        self.slopes.iter().fold(1.0f64, |m, &d| m.max(d))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// λ_{m,n}(γ) = (1/2π)∫ e^{−imθ} e^{inγ̃(θ)} dθ for all row/column pairs,
    /// row-major. With `inverse`, returns λ_{m,n}(γ⁻¹) through the
    /// substitution θ = γ̃(φ).
    pub fn matrix(&self, rows: &[i64], cols: &[i64], inverse: bool) -> Vec<Complex64> {
        let (mr, nc) = (rows.len(), cols.len());
        let mut out = vec![Complex64::new(0.0, 0.0); mr * nc];
        if let Some(alpha) = self.rotation {
            let a = if inverse { -alpha } else { alpha };
            for (i, &m) in rows.iter().enumerate() {
                for (j, &n) in cols.iter().enumerate() {
                    if m == n {
                        out[i * nc + j] = Complex64::from_polar(1.0, n as f64 * a);
                    }
                }
            }
            return out;
        }
        let mut a = vec![Complex64::new(0.0, 0.0); mr * CHUNK];
        let mut b = vec![Complex64::new(0.0, 0.0); CHUNK * nc];
        for start in (0..self.nodes.len()).step_by(CHUNK) {
            let len = CHUNK.min(self.nodes.len() - start);
            for q in 0..len {
                let j = start + q;
                let (row_phase, col_phase, w) = if inverse {
                    (self.values[j], self.nodes[j], self.weights[j] * self.slopes[j])
                } else {
                    (self.nodes[j], self.values[j], self.weights[j])
                };
                for (i, &m) in rows.iter().enumerate() {
                    a[i * len + q] = Complex64::from_polar(w, -(m as f64) * row_phase);
                }
                for (k, &n) in cols.iter().enumerate() {
                    b[q * nc + k] = Complex64::from_polar(1.0, n as f64 * col_phase);
                }
            }
            // SAFETY: a is mr×len row-major, b is len×nc row-major, out is
            // mr×nc row-major; all buffers are large enough.
            unsafe {
                zgemm(
                    CGemmOption::Standard,
                    CGemmOption::Standard,
                    mr,
                    len,
                    nc,
                    [1.0, 0.0],
                    a.as_ptr() as *const [f64; 2],
                    len as isize,
                    1,
                    b.as_ptr() as *const [f64; 2],
                    nc as isize,
                    1,
                    [1.0, 0.0],
                    out.as_mut_ptr() as *mut [f64; 2],
                    nc as isize,
                    1,
                );
            }
        }
        let norm = 1.0 / (2.0 * PI);
        out.iter_mut().for_each(|v| *v *= norm);
        out
    }
}

/// λ_{m,n}(γ) with `quad_points` nodes; needs quad_points ≥ 8(|m| + |n|).
pub fn lambda_mn(g: &CircleMap, m: i64, n: i64, quad_points: usize) -> Result<Complex64> {
    let p = (m.unsigned_abs() + n.unsigned_abs()) as usize;
    if quad_points < 8 * p {
        return Err(Error::Resolution { needed: 8 * p, got: quad_points });
    }
    let omega = quad_points as f64 * DEFAULT_PANEL_PHASE / (2.0 * PI * PANEL_ORDER as f64);
    let batch = LambdaBatch::new(g, omega, DEFAULT_PANEL_PHASE)?;
    Ok(batch.matrix(&[m], &[n], false)[0])
}

/// λ_{m,n} for all row/column pairs with panels resolved for the largest
/// frequency, row-major.
pub fn lambda_matrix(g: &CircleMap, rows: &[i64], cols: &[i64], inverse: bool) -> Result<Vec<Complex64>> {
    let mmax = rows.iter().map(|m| m.unsigned_abs()).max().unwrap_or(0) as f64;
    let nmax = cols.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0) as f64;
    let probe = LambdaBatch::new(g, 64.0, DEFAULT_PANEL_PHASE)?;
    let slope = probe.max_slope();
    let omega = if inverse { mmax * slope + nmax } else { mmax + nmax * slope };
    Ok(LambdaBatch::new(g, omega, DEFAULT_PANEL_PHASE)?.matrix(rows, cols, inverse))
}

/// |λ_{m,n}| on the antidiagonals m > 0 > n, 2 ≤ |m| + |n| ≤ pmax.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayReport {
    pub s: f64,
    pub grid: Vec<(i64, i64)>,
    pub values: Vec<f64>,
    pub sup_weighted: f64,
    pub fitted_constant: f64,
    pub fitted_exponent: f64,
    /// Largest change of any value when the quadrature is refined twofold.
    pub self_check: f64,
    /// True when fewer than two antidiagonals rise above the noise floor.
    pub degenerate: bool,
}

/// Values below this are treated as quadrature noise in the fit.
const FIT_FLOOR: f64 = 1e-14;

pub fn lambda_decay_report(g: &CircleMap, s: f64, pmax: usize) -> Result<DecayReport> {
    if pmax < 2 {
        return Err(Error::Domain("pmax must be at least 2".into()));
    }
    let rows: Vec<i64> = (1..pmax as i64).collect();
    let cols: Vec<i64> = (1..pmax as i64).map(|n| -n).collect();
    let probe = LambdaBatch::new(g, 64.0, DEFAULT_PANEL_PHASE)?;
    let omega = (pmax as f64) * probe.max_slope();
    let coarse = LambdaBatch::new(g, omega, DEFAULT_PANEL_PHASE)?.matrix(&rows, &cols, false);
    let fine = LambdaBatch::new(g, 2.0 * omega, DEFAULT_PANEL_PHASE)?.matrix(&rows, &cols, false);
    let nc = cols.len();
    let mut grid = vec![];
    let mut values = vec![];
    let mut self_check = 0.0f64;
    let mut per_p = vec![0.0f64; pmax + 1];
    let mut sup_weighted = 0.0f64;
    for (i, &m) in rows.iter().enumerate() {
        for (j, &n) in cols.iter().enumerate() {
            let p = (m - n) as usize;
            if p > pmax {
                continue;
            }
            let v = fine[i * nc + j];
            self_check = self_check.max((v - coarse[i * nc + j]).norm());
            let a = v.norm();
            grid.push((m, n));
            values.push(a);
            per_p[p] = per_p[p].max(a);
            sup_weighted = sup_weighted.max(a * (p as f64).powf(s - 1.0));
        }
    }
    let pts: Vec<(f64, f64)> = (2..=pmax)
        .filter(|&p| per_p[p] > FIT_FLOOR)
        .map(|p| ((p as f64).ln(), per_p[p].ln()))
        .collect();
    let (fitted_constant, fitted_exponent, degenerate) = if pts.len() < 2 {
        (0.0, f64::INFINITY, true)
    } else {
        let nf = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        ((my - slope * mx).exp(), -slope, false)
    };
    Ok(DecayReport { s, grid, values, sup_weighted, fitted_constant, fitted_exponent, self_check, degenerate })
}

/// H^s norm of the periodic function γ̃(θ) − θ over modes |k| ≤ K.
pub fn ds_membership(g: &CircleMap, s: f64, k_max: usize) -> f64 {
    if let Some(a) = g.as_rotation() {
        return a.abs();
    }
    let f = fourier_coeffs_piecewise(|t| g.lift(t) - t, k_max, g.breakpoints());
    h_s_norm(&f, s)
}

/// ds_membership across several cutoffs.
pub fn ds_sweep(g: &CircleMap, s: f64, cutoffs: &[usize]) -> Vec<(usize, f64)> {
    cutoffs.iter().map(|&k| (k, ds_membership(g, s, k))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_diffeo::{exp_field, psi_t, MobiusElement, VectorField};

    #[test]
    fn rotations_are_diagonal() {
        let r = CircleMap::rotation(0.4);
        let m = lambda_matrix(&r, &[-2, 3], &[-2, 3], false).unwrap();
        assert!((m[0] - Complex64::from_polar(1.0, -0.8)).norm() < 1e-15);
        assert_eq!(m[1].norm(), 0.0);
        assert!((m[3] - Complex64::from_polar(1.0, 1.2)).norm() < 1e-15);
    }

    #[test]
    fn mobius_lambda_matches_dense_trapezoid() {
        // Smooth periodic integrands: the trapezoid rule is spectrally exact.
        let g = CircleMap::mobius(MobiusElement::new(1.2, 0.4, 0.1, 0.87).unwrap());
        let n_pts = 4096;
        for (m, n) in [(3i64, -2i64), (1, 1), (-4, 5)] {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n_pts {
                let t = 2.0 * PI * j as f64 / n_pts as f64;
                acc += Complex64::from_polar(1.0, -(m as f64) * t + n as f64 * g.lift(t));
            }
            acc /= n_pts as f64;
            let q = lambda_mn(&g, m, n, 512).unwrap();
            assert!((q - acc).norm() < 1e-13);
        }
        assert!(lambda_mn(&g, 10, -10, 100).is_err());
    }

    #[test]
    fn inverse_substitution_agrees() {
        let g = exp_field(&VectorField::trig(vec![], vec![0.3]), 1.0, 1e-13).unwrap();
        let gi = crate::circle_diffeo::invert(&g).unwrap();
        let a = lambda_matrix(&g, &[2, -3], &[-1, 4], true).unwrap();
        let b = lambda_matrix(&gi, &[2, -3], &[-1, 4], false).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn psi_sobolev_diagnostics() {
        let g = psi_t(0.5);
        let low: Vec<f64> = ds_sweep(&g, 1.2, &[64, 128, 256]).into_iter().map(|x| x.1).collect();
        let high: Vec<f64> = ds_sweep(&g, 2.4, &[64, 128, 256]).into_iter().map(|x| x.1).collect();
        assert!(low[2] - low[1] < 0.8 * (low[1] - low[0]) && low[2] / low[1] < 1.01);
        assert!(high[2] / high[1] > 1.5 && high[1] / high[0] > 1.5);
        assert!((ds_membership(&CircleMap::rotation(-0.3), 2.0, 16) - 0.3).abs() < 1e-15);
        assert_eq!(ds_membership(&CircleMap::identity(), 2.0, 16), 0.0);
    }
}
