use super::map::CircleMap;
use super::Side;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Half-width (radians) of the band around breakpoints where Schwarzians
/// are refused.
pub const BREAKPOINT_GUARD: f64 = 1e-3;

fn guard(g: &CircleMap, theta: f64) -> Result<()> {
    let r = theta.rem_euclid(2.0 * PI);
    for &b in g.breakpoints() {
        let d = (r - b).abs();
        if d.min(2.0 * PI - d) < BREAKPOINT_GUARD {
            return Err(Error::Breakpoint(format!("θ = {theta} is within the guard band of breakpoint {b}")));
        }
    }
    Ok(())
}

/// {γ̊, z} at z = e^{iθ}, with γ̊(e^{iθ}) = e^{iγ̃(θ)} and d/dz = −i z̄ d/dθ
/// applied to θ-jets of the lift.
pub fn schwarzian_z(g: &CircleMap, theta: f64) -> Result<Complex64> {
    guard(g, theta)?;
    if g.is_identity() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let j = g.jets(theta, Side::Above, 3);
    let (g1, g2, g3) = (j[1], j[2], j[3]);
    let i = Complex64::i();
    let f = Complex64::from_polar(1.0, j[0]);
    let f1 = i * g1 * f;
    let f2 = (i * g2 - g1 * g1) * f;
    let f3 = (i * g3 - 3.0 * g1 * g2 - i * g1 * g1 * g1) * f;
    let e = Complex64::from_polar(1.0, -theta);
    let d1 = -i * e * f1;
    let d2 = e * e * (i * f1 - f2);
    let d3 = -i * e * e * e * (2.0 * f1 + 3.0 * i * f2 - f3);
    let q = d2 / d1;
    Ok(d3 / d1 - 1.5 * q * q)
}

/// Real form ½(1 − γ̃'²) − {γ̃, θ}; equals e^{2iθ}{γ̊, z}.
pub fn schwarzian_real(g: &CircleMap, theta: f64) -> Result<f64> {
    guard(g, theta)?;
    if g.is_identity() {
        return Ok(0.0);
    }
    let j = g.jets(theta, Side::Above, 3);
    let (g1, g2, g3) = (j[1], j[2], j[3]);
    let s = g3 / g1 - 1.5 * (g2 / g1) * (g2 / g1);
    Ok(0.5 * (1.0 - g1 * g1) - s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_diffeo::{exp_field, MobiusElement, VectorField};

    #[test]
    fn mobius_has_zero_schwarzian() {
        let m = CircleMap::mobius(MobiusElement::new(0.8, 1.1, -0.6, 0.5).unwrap());
        for k in 0..24 {
            let th = -3.0 + 0.25 * k as f64;
            assert!(schwarzian_z(&m, th).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn forms_agree() {
        let g = exp_field(&VectorField::trig(vec![0.0, 0.1, 0.05], vec![0.2]), 1.0, 1e-13).unwrap();
        for k in 0..12 {
            let th = -2.9 + 0.5 * k as f64;
            let z = schwarzian_z(&g, th).unwrap();
            let r = schwarzian_real(&g, th).unwrap();
            let w = z * Complex64::from_polar(1.0, 2.0 * th);
            assert!((w.re - r).abs() < 1e-10 && w.im.abs() < 1e-10);
        }
    }

    #[test]
    fn guard_band() {
        let p = super::super::psi_t(0.5);
        assert!(matches!(schwarzian_z(&p, PI + 1e-4), Err(Error::Breakpoint(_))));
        assert!(schwarzian_z(&p, 1.0).is_ok());
    }
}
