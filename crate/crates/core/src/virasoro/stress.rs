//! Smeared stress tensor T(f) = Σ f̂_n L_n, the two central cocycles and
//! the commutator check.

use super::{ModuleVector, VermaLevelSpace};
use crate::error::{Error, Result};
use crate::fourier_sobolev::FourierSeries;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Matrix of T(f) on the ≤ N block. Columns at levels ≤ `exact_level`
/// are free of truncation effects.
#[derive(Clone, Debug)]
pub struct StressMatrix {
    pub f: FourierSeries,
    pub matrix: DMatrix<Complex64>,
    pub exact_level: usize,
}

fn check_modes(space: &VermaLevelSpace, f: &FourierSeries) -> Result<usize> {
    let m = f.max_mode();
    if m > space.max_level() {
        return Err(Error::Truncation(format!("max mode {m} exceeds N = {}", space.max_level())));
    }
    Ok(m)
}

pub fn stress_matrix(space: &VermaLevelSpace, f: &FourierSeries) -> Result<StressMatrix> {
    let m = check_modes(space, f)?;
    let d = space.dim();
    let mut mat = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for n in -(m as i64)..=(m as i64) {
        let a = f.coeff(n);
        if a.norm() == 0.0 {
            continue;
        }
        for (j, col) in space.op(n).cols.iter().enumerate() {
            for &(i, v) in col {
                mat[(i, j)] += a * v;
            }
        }
    }
    Ok(StressMatrix { f: f.clone(), matrix: mat, exact_level: space.max_level() - m })
}

impl StressMatrix {
    pub fn exact_dim(&self, space: &VermaLevelSpace) -> usize {
        space.dim_through(self.exact_level)
    }

    /// max |H − H†| / max(1, max |H|) for H = G·T on the exact block, G the
    /// Gram matrix. Zero exactly when T is symmetric for the Shapovalov form.
    pub fn hermiticity_residual(&self, space: &VermaLevelSpace) -> f64 {
        let k = self.exact_dim(space);
        let g = space.gram_full().map(|x| Complex64::new(x, 0.0));
        let h = g * &self.matrix;
        let h = h.view((0, 0), (k, k));
        let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut r: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                r = r.max((h[(i, j)] - h[(j, i)].conj()).norm());
            }
        }
        r / scale
    }

    pub fn apply(&self, v: &ModuleVector) -> ModuleVector {
        let x = nalgebra::DVector::from_column_slice(&v.amps);
        let y = &self.matrix * x;
        ModuleVector { amps: y.iter().copied().collect(), truncated: v.truncated }
    }
}

/// T(f)v through repeated `apply_ln`.
pub fn apply_stress(space: &VermaLevelSpace, f: &FourierSeries, v: &ModuleVector) -> Result<ModuleVector> {
    let m = check_modes(space, f)?;
    let mut out = ModuleVector::zeros(space.dim());
    for n in -(m as i64)..=(m as i64) {
        let a = f.coeff(n);
        if a.norm() == 0.0 {
            continue;
        }
        out.add_scaled(a, &space.apply_ln(n, v)?);
    }
    Ok(out)
}

/// [f, g] = f′g − fg′.
pub fn bracket_field(f: &FourierSeries, g: &FourierSeries) -> FourierSeries {
    f.derivative().product(g).add_series(&f.product(&g.derivative()).scale(-1.0))
}

fn weighted_pairing(f: &FourierSeries, g: &FourierSeries, w: impl Fn(f64) -> f64) -> Complex64 {
    let k = f.k_max().max(g.k_max()) as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in -k..=k {
        acc += w(n as f64) * f.coeff(n) * g.coeff(-n);
    }
    acc * Complex64::new(0.0, 1.0 / 12.0)
}

/// ω_GF(f, g) = (1/48π)∫(f g‴ − f‴ g) dθ = (i/12) Σ k³ f̂_k ĝ_{−k}.
pub fn gf_cocycle(f: &FourierSeries, g: &FourierSeries) -> Complex64 {
    weighted_pairing(f, g, |k| k * k * k)
}

/// ω_vir(f, g) = −(1/24π)∫(f‴ + f′) g dθ = (i/12) Σ (k³ − k) f̂_k ĝ_{−k}.
pub fn vir_cocycle(f: &FourierSeries, g: &FourierSeries) -> Complex64 {
    weighted_pairing(f, g, |k| k * k * k - k)
}

/// Which central term the commutator check subtracts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cocycle {
    #[default]
    Virasoro,
    GelfandFuchs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub c: f64,
    pub h: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub exact_block_dim: usize,
    pub residual: f64,
}

fn apply_series(space: &VermaLevelSpace, f: &FourierSeries, x: &[Complex64]) -> Vec<Complex64> {
    let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
    let m = f.max_mode() as i64;
    for n in -m..=m {
        let a = f.coeff(n);
        if a.norm() == 0.0 {
            continue;
        }
        let op = space.op(n);
        for (j, &xj) in x.iter().enumerate() {
            if xj.norm() == 0.0 {
                continue;
            }
            let s = a * xj;
            for &(i, v) in &op.cols[j] {
                y[i] += s * v;
            }
        }
    }
    y
}

/// Max entry of i[T(g),T(f)] − T(g′f − f′g) − c ω_vir(g,f) on the levels
/// ≤ N − 2M, M the larger max mode.
pub fn commutator_check(space: &VermaLevelSpace, f: &FourierSeries, g: &FourierSeries) -> Result<CommutatorReport> {
    commutator_check_with(space, f, g, Cocycle::Virasoro)
}

pub fn commutator_check_with(
    space: &VermaLevelSpace,
    f: &FourierSeries,
    g: &FourierSeries,
    cocycle: Cocycle,
) -> Result<CommutatorReport> {
    let m = f.max_mode().max(g.max_mode());
    let n = space.max_level();
    if 2 * m > n {
        return Err(Error::BlockTooSmall(format!("no exact levels for max mode {m} at N = {n}")));
    }
    let br = bracket_field(g, f);
    let omega = match cocycle {
        Cocycle::Virasoro => vir_cocycle(g, f),
        Cocycle::GelfandFuchs => gf_cocycle(g, f),
    };
    let central = omega * space.params().c;
    let i = Complex64::i();
    let k = space.dim_through(n - 2 * m);
    let mut residual: f64 = 0.0;
    for j in 0..k {
        let mut e = vec![Complex64::new(0.0, 0.0); space.dim()];
        e[j] = Complex64::new(1.0, 0.0);
        let gf = apply_series(space, g, &apply_series(space, f, &e));
        let fg = apply_series(space, f, &apply_series(space, g, &e));
        let b = apply_series(space, &br, &e);
        for r in 0..space.dim() {
            let mut v = i * (gf[r] - fg[r]) - b[r];
            if r == j {
                v -= central;
            }
            residual = residual.max(v.norm());
        }
    }
    let p = space.params();
    Ok(CommutatorReport { c: p.c, h: p.h, n, exact_block_dim: k, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::virasoro::ModuleParams;
    use std::f64::consts::PI;

    fn space(c: f64, h: f64, n: usize) -> VermaLevelSpace {
        VermaLevelSpace::new(ModuleParams::new(c, h, n).unwrap()).unwrap()
    }

    #[test]
    fn cocycle_values() {
        let cos = FourierSeries::from_trig(&[0.0, 1.0], &[]);
        let sin = FourierSeries::from_trig(&[0.0], &[1.0]);
        assert!((gf_cocycle(&cos, &sin) - Complex64::new(-1.0 / 24.0, 0.0)).norm() < 1e-15);
        assert!(vir_cocycle(&cos, &sin).norm() < 1e-15);
        let e3 = FourierSeries::mode(3, 3);
        let em3 = FourierSeries::mode(-3, 3);
        assert!((gf_cocycle(&e3, &em3) - Complex64::new(0.0, 27.0 / 12.0)).norm() < 1e-14);
        assert!((vir_cocycle(&e3, &em3) - Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn gf_matches_real_space_integral() {
        let f = FourierSeries::from_trig(&[0.2, 0.5, -0.3], &[0.1, 0.7]);
        let g = FourierSeries::from_trig(&[0.0, -0.4, 0.2, 0.1], &[0.3]);
        let d3 = |s: &FourierSeries| s.derivative().derivative().derivative();
        let (f3, g3) = (d3(&f), d3(&g));
        let n = 64;
        let mut acc = 0.0;
        for j in 0..n {
            let th = 2.0 * PI * j as f64 / n as f64;
            acc += (f.eval(th) * g3.eval(th) - f3.eval(th) * g.eval(th)).re;
        }
        let direct = acc * (2.0 * PI / n as f64) / (48.0 * PI);
        assert!((gf_cocycle(&f, &g).re - direct).abs() < 1e-13);
    }

    #[test]
    fn trivial_stress() {
        let s = space(0.5, 0.2, 5);
        let t = stress_matrix(&s, &FourierSeries::from_trig(&[1.0], &[])).unwrap();
        for i in 0..s.dim() {
            assert!((t.matrix[(i, i)].re - (0.2 + s.level_of(i) as f64)).abs() < 1e-15);
        }
        assert!(matches!(
            stress_matrix(&s, &FourierSeries::mode(6, 6)),
            Err(Error::Truncation(_))
        ));
    }

    #[test]
    fn stress_paths_agree() {
        let s = space(1.0, 0.0, 8);
        let f = FourierSeries::mode(2, 2).add_series(&FourierSeries::mode(-2, 2));
        let t = stress_matrix(&s, &f).unwrap();
        for j in 0..s.dim() {
            let e = s.basis_vector(j);
            let a = t.apply(&e);
            let b = apply_stress(&s, &f, &e).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn real_stress_is_symmetric() {
        let s = space(0.7, 0.35, 8);
        let f = FourierSeries::from_trig(&[0.3, 0.5, -0.2], &[0.4, 0.1]);
        assert!(stress_matrix(&s, &f).unwrap().hermiticity_residual(&s) < 1e-10);
    }

    #[test]
    fn commutator_small_cases() {
        let s = space(0.5, 0.0, 12);
        let cos = FourierSeries::from_trig(&[0.0, 1.0], &[]);
        let sin = FourierSeries::from_trig(&[0.0], &[1.0]);
        assert!(commutator_check(&s, &cos, &sin).unwrap().residual < 1e-9);
        assert_eq!(commutator_check(&s, &cos, &cos).unwrap().residual, 0.0);
        let s = space(0.5, 0.0, 3);
        assert!(matches!(
            commutator_check(&s, &FourierSeries::mode(2, 2), &cos),
            Err(Error::BlockTooSmall(_))
        ));
    }

    #[test]
    fn gf_is_detected() {
        let s = space(1.0, 0.3, 15);
        let f = FourierSeries::mode(2, 2);
        let g = FourierSeries::mode(-2, 2);
        assert!(commutator_check(&s, &f, &g).unwrap().residual < 1e-9);
        assert!(commutator_check_with(&s, &f, &g, Cocycle::GelfandFuchs).unwrap().residual >= 1e-3);
    }
}
