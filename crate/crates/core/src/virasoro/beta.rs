//! The Schwarzian cocycle β(γ, f) = (c/24π)∫{γ̊, z} f e^{2iθ} dθ.

use crate::circle_diffeo::{exp_field, schwarzian_z, CircleMap, Side, VectorField, BREAKPOINT_GUARD, DEFAULT_FLOW_TOL};
use crate::error::{Error, Result};
use crate::fourier_sobolev::half_cutoffs;
use crate::quadrature::{periodic_rule, Rule};
use num_complex::Complex64;
use std::f64::consts::PI;

const PANEL_WIDTH: f64 = 0.05;
const ORDER: usize = 16;
const IMAG_TOL: f64 = 1e-9;

/// Real value of β together with the imaginary residue of the complex
/// integral, which vanishes for real data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaValue {
    pub value: f64,
    pub imaginary: f64,
}

fn near(a: f64, b: f64, eps: f64) -> bool {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d) < eps
}

fn check_breakpoints(g: &CircleMap, f: &VectorField, inside: impl Fn(f64) -> bool) -> Result<()> {
    for &b in g.breakpoints() {
        if !inside(b) {
            continue;
        }
        for k in -16..=16 {
            let th = b + BREAKPOINT_GUARD * k as f64 / 8.0;
            if f.eval(th) != 0.0 {
                return Err(Error::Domain(format!("breakpoint {b} of the map lies in the support of the field")));
            }
        }
    }
    Ok(())
}

/// {γ̊, z} e^{2iθ} from one-sided θ-jets of the lift.
fn schwarzian_phase(g: &CircleMap, theta: f64) -> Complex64 {
    let j = g.jets(theta, Side::Above, 3);
    let (g1, g2, g3) = (j[1], j[2], j[3]);
    let s = g3 / g1 - 1.5 * (g2 / g1) * (g2 / g1);
    Complex64::new(0.5 * (1.0 - g1 * g1) - s, 0.0)
}

fn finish(acc: Complex64, c: f64) -> BetaValue {
    let v = acc * (c / (24.0 * PI));
    if v.im.abs() > IMAG_TOL {
        eprintln!("warning: β has imaginary part {:e}, discarded", v.im);
    }
    BetaValue { value: v.re, imaginary: v.im }
}

/// β over the whole circle. The map must be smooth on supp f.
pub fn beta_cocycle_detail(g: &CircleMap, f: &VectorField, c: f64) -> Result<BetaValue> {
    if g.is_identity() || g.as_mobius().is_some() || g.as_rotation().is_some() {
        return Ok(BetaValue { value: 0.0, imaginary: 0.0 });
    }
    check_breakpoints(g, f, |_| true)?;
    let mut breaks = g.breakpoints().to_vec();
    breaks.extend(f.breakpoints());
    let rule = periodic_rule(&breaks, PANEL_WIDTH, ORDER);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&th, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fv = f.eval(th);
        if fv == 0.0 {
            continue;
        }
        let s = schwarzian_z(g, th).map_err(|e| Error::Domain(e.to_string()))?;
        acc += w * fv * s * Complex64::from_polar(1.0, 2.0 * th);
    }
    Ok(finish(acc, c))
}

pub fn beta_cocycle(g: &CircleMap, f: &VectorField, c: f64) -> Result<f64> {
    Ok(beta_cocycle_detail(g, f, c)?.value)
}

/// β with the integral restricted to the angular interval [a, b]; map
/// breakpoints at the ends are allowed, interior ones must avoid supp f.
pub fn beta_cocycle_restricted(g: &CircleMap, f: &VectorField, c: f64, interval: (f64, f64)) -> Result<f64> {
    let (a, b) = interval;
    if !(b > a) || b - a > 2.0 * PI + 1e-12 {
        return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
    }
    if g.is_identity() || g.as_mobius().is_some() || g.as_rotation().is_some() {
        return Ok(0.0);
    }
    let interior = |x: f64| {
        let r = a + (x - a).rem_euclid(2.0 * PI);
        r > a && r < b && !near(x, a, BREAKPOINT_GUARD) && !near(x, b, BREAKPOINT_GUARD)
    };
    check_breakpoints(g, f, interior)?;
    let lift = |x: f64| a + (x - a).rem_euclid(2.0 * PI);
    let mut breaks: Vec<f64> = g.breakpoints().iter().chain(f.breakpoints().iter()).map(|&x| lift(x)).collect();
    breaks.retain(|&x| x > a && x < b);
    let rule = Rule::split(a, b, &breaks, PANEL_WIDTH, ORDER);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&th, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fv = f.eval(th);
        if fv == 0.0 {
            continue;
        }
        acc += w * fv * schwarzian_phase(g, th);
    }
    Ok(finish(acc, c).value)
}

/// Exp(t h₋𝔱)_* 𝔱 and β(Exp(t h₋𝔱), 𝔱).
#[derive(Clone, Debug)]
pub struct TransformedGenerator {
    pub map: CircleMap,
    pub field: VectorField,
    pub beta: f64,
    /// max |field − 𝔱| on (−π, −π + 0.2).
    pub agreement: f64,
}

/// Support of h₋𝔱.
pub const MINUS_SUPPORT: (f64, f64) = (-PI, -PI / 8.0);

pub fn transformed_generator(t: f64, c: f64) -> Result<TransformedGenerator> {
    if !t.is_finite() || t.abs() > 2.0 {
        return Err(Error::Domain(format!("|t| = {} exceeds 2", t.abs())));
    }
    let tr = VectorField::translation_generator();
    if t == 0.0 {
        return Ok(TransformedGenerator { map: CircleMap::identity(), field: tr, beta: 0.0, agreement: 0.0 });
    }
    let g = exp_field(&half_cutoffs().h_minus_t, t, DEFAULT_FLOW_TOL)?;
    let field = VectorField::Pushforward { map: g.clone(), field: Box::new(tr.clone()) };
    let beta = beta_cocycle_restricted(&g, &tr, c, MINUS_SUPPORT)?;
    let mut agreement: f64 = 0.0;
    for k in 1..=200 {
        let th = -PI + 0.2 * k as f64 / 201.0;
        agreement = agreement.max((field.eval(th) - tr.eval(th)).abs());
    }
    if agreement > 1e-10 {
        return Err(Error::Consistency(format!("transformed field differs from 𝔱 near −1 by {agreement:e}")));
    }
    Ok(TransformedGenerator { map: g, field, beta, agreement })
}
