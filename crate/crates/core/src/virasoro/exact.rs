//! Exact rational Gram matrices and determinants at low levels.

use super::reduce::{partitions, Reducer};
use super::{gram_matrix, min_eigenvalue, ModuleParams};
use crate::error::Result;
use num_rational::Ratio;
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

type Q = Ratio<i128>;

/// Highest level at which determinants default to exact arithmetic.
pub const EXACT_MAX_LEVEL: usize = 4;
const MAX_DENOMINATOR: i128 = 1000;

/// Continued-fraction rationalization with denominator ≤ 1000; `None` when
/// no such fraction reproduces x to 1e−13.
pub fn rationalize(x: f64) -> Option<Q> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > MAX_DENOMINATOR {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (p1 as f64 / q1 as f64 - x).abs() <= 1e-13 * x.abs().max(1.0) {
            return Some(Ratio::new(p1, q1));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Shapovalov matrix at one level over the rationals.
pub fn gram_matrix_exact(c: Q, h: Q, level: usize) -> Vec<Vec<Q>> {
    let basis = partitions(level as u32);
    let mut red = Reducer::new(c, h, level as u32);
    basis.iter().map(|mu| basis.iter().map(|nu| red.pairing(mu, nu)).collect()).collect()
}

/// Determinant by Gaussian elimination; `None` on i128 overflow.
pub fn det_exact(m: &[Vec<Q>]) -> Option<Q> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut det = Q::from_integer(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Some(Q::zero());
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det = det.checked_mul(&a[k][k])?;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].checked_div(&a[k][k])?;
            for j in k..n {
                let t = f.checked_mul(&a[k][j])?;
                a[i][j] = a[i][j].checked_sub(&t)?;
            }
        }
    }
    Some(det)
}

/// Level determinant: exact when the level is at most 4 and (c, h) are
/// small-denominator rationals, LU otherwise. The flag reports which.
pub fn gram_det(params: &ModuleParams, level: usize) -> Result<(f64, bool)> {
    let g = gram_matrix(params, level)?;
    if level <= EXACT_MAX_LEVEL {
        if let (Some(c), Some(h)) = (rationalize(params.c), rationalize(params.h)) {
            if let Some(d) = det_exact(&gram_matrix_exact(c, h, level)) {
                return Ok((d.to_f64().unwrap_or(f64::NAN), true));
            }
        }
    }
    Ok((g.determinant(), false))
}

/// One row of the Gram determinant table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KacRow {
    pub level: usize,
    pub c: f64,
    pub h: f64,
    pub det: f64,
    pub min_eigenvalue: f64,
    pub exact: bool,
}

pub fn kac_row(params: &ModuleParams, level: usize) -> Result<KacRow> {
    let (det, exact) = gram_det(params, level)?;
    let g = gram_matrix(params, level)?;
    Ok(KacRow { level, c: params.c, h: params.h, det, min_eigenvalue: min_eigenvalue(&g), exact })
}
