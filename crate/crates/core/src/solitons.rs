//! Soliton descriptors built from Diff(S¹, −1) elements, the invariant
//! r(ν), localized smooth extensions, the translation cover and the
//! square-root map.

use crate::circle_diffeo::{
    compose, exp_field, invert, one_sided_data, reduce_angle, CircleMap, Extension, NonsmoothDiffeo, Side,
    DEFAULT_FLOW_TOL,
};
use crate::error::{Error, Result};
use crate::fourier_sobolev::half_cutoffs;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_R_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonKind {
    /// Obtained by composing the vacuum with an element of Diff(S¹, −1).
    Automorphic,
    /// Obtained from a map onto a proper interval of the circle.
    TypeIII,
}

#[derive(Clone, Debug)]
pub struct SolitonDescriptor {
    /// The defining element; absent for the square-root map, which is not a
    /// homeomorphism of the circle.
    pub nu: Option<NonsmoothDiffeo>,
    pub r: f64,
    pub kind: SolitonKind,
    /// Angular range of ν for type III descriptors.
    pub range_interval: Option<(f64, f64)>,
}

pub fn make_soliton(nu: NonsmoothDiffeo) -> Result<SolitonDescriptor> {
    nu.validate(1e-9)?;
    let r = one_sided_data(&nu)?.r;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidElement(format!("r = {r} is not a positive number")));
    }
    Ok(SolitonDescriptor { nu: Some(nu), r, kind: SolitonKind::Automorphic, range_interval: None })
}

/// |r − 1| > DEFAULT_R_TOL. The r-rule is meant for automorphic descriptors.
pub fn is_proper(s: &SolitonDescriptor) -> bool {
    is_proper_with(s, DEFAULT_R_TOL)
}

pub fn is_proper_with(s: &SolitonDescriptor, tol: f64) -> bool {
    (s.r - 1.0).abs() > tol
}

/// |r₁ − r₂| < tol · max(r₁, r₂).
pub fn equivalent(a: &SolitonDescriptor, b: &SolitonDescriptor, tol: f64) -> bool {
    (a.r - b.r).abs() < tol * a.r.max(b.r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierRow {
    pub id: String,
    pub r: f64,
    pub proper: bool,
    pub equivalence_class_representative: String,
}

/// Groups descriptors by r. Each item joins the class of the first earlier
/// representative it is equivalent to, or starts a new class.
pub fn classify(items: &[(String, SolitonDescriptor)], tol: f64) -> Vec<ClassifierRow> {
    let mut reps: Vec<(&str, &SolitonDescriptor)> = vec![];
    items
        .iter()
        .map(|(id, s)| {
            let rep = match reps.iter().find(|(_, r)| equivalent(r, s, tol)) {
                Some((rid, _)) => rid.to_string(),
                None => {
                    reps.push((id, s));
                    id.clone()
                }
            };
            ClassifierRow { id: id.clone(), r: s.r, proper: is_proper_with(s, tol), equivalence_class_representative: rep }
        })
        .collect()
}

fn line_to_angle(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        -PI
    } else if s == f64::INFINITY {
        PI
    } else {
        2.0 * s.atan()
    }
}

/// Angular form [a, b] ⊂ [−π, π] of an interval of the line.
pub fn line_interval_angles(interval: (f64, f64)) -> Result<(f64, f64)> {
    let (s1, s2) = interval;
    if s1.is_nan() || s2.is_nan() || !(s1 < s2) {
        return Err(Error::Domain(format!("invalid interval ({s1}, {s2})")));
    }
    if s1.is_infinite() && s2.is_infinite() {
        return Err(Error::Domain("the interval must not be the whole line".into()));
    }
    Ok((line_to_angle(s1), line_to_angle(s2)))
}

const GRID: usize = 512;

fn angle_grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * (i as f64 + 0.5) / n as f64)
}

/// Largest |g(θ) − h(θ)| over `n` points of [a, b], with the difference
/// taken modulo 2π.
pub fn max_deviation(g: &CircleMap, h: &CircleMap, (a, b): (f64, f64), n: usize) -> f64 {
    angle_grid(a, b, n)
        .map(|th| reduce_angle(g.lift(th) - h.lift(th), Side::Above).abs())
        .fold(0.0, f64::max)
}

/// A smooth circle map ν_I that agrees with ν on the line interval I.
/// Endpoints may be ±∞; I must not be the whole line.
pub fn localized_extension(nu: &NonsmoothDiffeo, interval: (f64, f64)) -> Result<CircleMap> {
    let (a, b) = line_interval_angles(interval)?;
    if nu.map().breakpoints().is_empty() {
        return Ok(nu.map().clone());
    }
    let base = if a >= 0.0 {
        nu.plus_piece().clone()
    } else if b <= 0.0 {
        nu.minus_piece().clone()
    } else {
        // straddles 1: ν must be smooth on I, which rules out reaching −1
        let map = nu.map();
        let blocked = map.breakpoints().iter().any(|&p| {
            let p = reduce_angle(p, Side::Above);
            p == -PI || (p > a - 1e-12 && p < b + 1e-12)
        });
        if blocked || a == -PI || b == PI {
            return Err(Error::Precondition(format!(
                "ν has a breakpoint on the closure of [{a}, {b}]; no jets available for a smooth extension"
            )));
        }
        map.clone()
    };
    let delta = ((2.0 * PI - (b - a)) / 4.0).min(0.5);
    let ext = CircleMap::extension(Extension::new(base, a, b, delta)?);
    let dev = max_deviation(&ext, nu.map(), (a, b), GRID);
    if dev > 1e-9 {
        return Err(Error::Consistency(format!("extension deviates from ν on I by {dev:e}")));
    }
    Ok(ext)
}

/// The three factors Exp(t h₋𝔱), Exp(−t h₋𝔱)∘τ(t)∘Exp(−t h₊𝔱), Exp(t h₊𝔱)
/// whose product is τ(t).
#[derive(Clone, Debug)]
pub struct TranslationCover {
    pub t: f64,
    pub minus: CircleMap,
    pub middle: CircleMap,
    pub plus: CircleMap,
    /// max deviation of the product from τ(t) on a grid.
    pub product_residual: f64,
    /// The middle factor is the identity on (π − ε, π + ε).
    pub epsilon: f64,
}

const EPS_STEP: f64 = 0.01;
const IDENTITY_TOL: f64 = 1e-10;

impl TranslationCover {
    pub fn product(&self) -> Result<CircleMap> {
        compose(&self.minus, &compose(&self.middle, &self.plus)?)
    }
}

pub fn translation_cover(t: f64) -> Result<TranslationCover> {
    if !t.is_finite() || t.abs() > 1.0 {
        return Err(Error::Domain(format!("|t| = {} exceeds 1", t.abs())));
    }
    if t == 0.0 {
        let id = CircleMap::identity();
        return Ok(TranslationCover {
            t,
            minus: id.clone(),
            middle: id.clone(),
            plus: id,
            product_residual: 0.0,
            epsilon: PI,
        });
    }
    let h = half_cutoffs();
    let minus = exp_field(&h.h_minus_t, t, DEFAULT_FLOW_TOL)?;
    let plus = exp_field(&h.h_plus_t, t, DEFAULT_FLOW_TOL)?;
    let minus_inv = exp_field(&h.h_minus_t, -t, DEFAULT_FLOW_TOL)?;
    let plus_inv = exp_field(&h.h_plus_t, -t, DEFAULT_FLOW_TOL)?;
    let tau = CircleMap::translation(t);
    let middle = compose(&minus_inv, &compose(&tau, &plus_inv)?)?;
    let mut cover = TranslationCover { t, minus, middle, plus, product_residual: 0.0, epsilon: 0.0 };
    let product = cover.product()?;
    cover.product_residual = max_deviation(&product, &tau, (-PI, PI), GRID);
    let moved = |th: f64| reduce_angle(cover.middle.lift(th) - th, Side::Above).abs() > IDENTITY_TOL;
    let mut k = 1;
    while (k as f64) * EPS_STEP < PI && !moved(PI - k as f64 * EPS_STEP) && !moved(-PI + k as f64 * EPS_STEP) {
        k += 1;
    }
    cover.epsilon = (k - 1) as f64 * EPS_STEP;
    if cover.product_residual > 1e-8 {
        return Err(Error::Consistency(format!("cover product differs from τ(t) by {:e}", cover.product_residual)));
    }
    if cover.epsilon <= 0.0 {
        return Err(Error::Consistency("middle factor moves points arbitrarily close to −1".into()));
    }
    Ok(cover)
}

/// ν∘γ∘ν⁻¹ for smooth γ fixing −1, certified C¹ at −1.
pub fn conjugated_map(nu: &NonsmoothDiffeo, gamma: &CircleMap) -> Result<CircleMap> {
    if !gamma.breakpoints().is_empty() {
        return Err(Error::Precondition("γ must be smooth".into()));
    }
    if (reduce_angle(gamma.lift(PI), Side::Below) - PI).abs() > 1e-10 {
        return Err(Error::Precondition("γ must fix −1".into()));
    }
    if gamma.is_identity() {
        return Ok(CircleMap::identity());
    }
    let out = compose(nu.map(), &compose(gamma, &invert(nu.map())?)?)?;
    let (l, r) = (out.derivative(PI, Side::Below), out.derivative(PI, Side::Above));
    if (l - r).abs() > 1e-9 * l.abs().max(1.0) {
        return Err(Error::Smoothness(format!("one-sided derivatives at −1 differ: {l} vs {r}")));
    }
    Ok(out)
}

/// e^{iθ} ↦ e^{iθ/2} for θ ∈ [−π, π).
pub fn square_root(theta: f64) -> f64 {
    reduce_angle(theta, Side::Above) / 2.0
}

/// The square-root map as a type III descriptor. Both one-sided
/// derivatives at −1 equal 1/2, so r = 1.
pub fn square_root_soliton() -> SolitonDescriptor {
    SolitonDescriptor { nu: None, r: 1.0, kind: SolitonKind::TypeIII, range_interval: Some((-PI / 2.0, PI / 2.0)) }
}

/// max |√(γ(θ)) − γ̂(√θ)| over a grid of θ ∈ [−π + 0.5, π − 0.5], with
/// γ̂ = CircleMap::cover(γ, 2). γ must move points by less than 0.5.
pub fn square_root_intertwining_residual(gamma: &CircleMap) -> Result<f64> {
    let (a, b) = (-PI + 0.5, PI - 0.5);
    let hat = CircleMap::cover(gamma.clone(), 2);
    let mut res: f64 = 0.0;
    for th in angle_grid(a, b, 256) {
        let g = gamma.lift(th);
        if (g - th).abs() >= 0.5 {
            return Err(Error::Domain("γ is too far from the identity for the local intertwining".into()));
        }
        res = res.max((square_root(g) - hat.lift(square_root(th))).abs());
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_diffeo::VectorField;

    fn bump_map(center: f64) -> CircleMap {
        let f = VectorField::line_bump(center, 0.6, 0.4);
        exp_field(&f, 1.0, DEFAULT_FLOW_TOL).unwrap()
    }

    #[test]
    fn descriptor_r_values() {
        assert_eq!(make_soliton(NonsmoothDiffeo::identity()).unwrap().r, 1.0);
        for t in [0.1, 0.5, 1.0] {
            let s = make_soliton(NonsmoothDiffeo::psi(t).unwrap()).unwrap();
            assert!((s.r - (-t as f64).exp()).abs() < 1e-12);
            assert!(is_proper(&s));
        }
        // one-sided chain rule: δ(s) has derivative e^{−s} at −1
        let (a, b) = (0.3, -0.4);
        let nu = NonsmoothDiffeo::new(CircleMap::dilation(a), CircleMap::dilation(b)).unwrap();
        let dm = CircleMap::dilation(a).derivative(PI, Side::Below);
        let dp = CircleMap::dilation(b).derivative(PI, Side::Above);
        assert!((dm - (-a as f64).exp()).abs() < 1e-12);
        let s = make_soliton(nu).unwrap();
        assert!((s.r - dp / dm).abs() < 1e-12);
        assert!((s.r - (a - b as f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn properness_and_equivalence() {
        let mut s = square_root_soliton();
        s.kind = SolitonKind::Automorphic;
        assert!(!is_proper(&s));
        s.r = 1.0 + 1e-12;
        assert!(!is_proper(&s));
        let a = make_soliton(NonsmoothDiffeo::psi(0.5).unwrap()).unwrap();
        let other = NonsmoothDiffeo::new(CircleMap::dilation(0.2), CircleMap::dilation(0.7)).unwrap();
        let b = make_soliton(other).unwrap();
        let c = make_soliton(NonsmoothDiffeo::psi(0.6).unwrap()).unwrap();
        assert!(equivalent(&a, &a, DEFAULT_R_TOL));
        assert!(equivalent(&a, &b, DEFAULT_R_TOL));
        assert!(!equivalent(&a, &c, DEFAULT_R_TOL));
        let rows = classify(&[("a".into(), a), ("c".into(), c), ("b".into(), b)], DEFAULT_R_TOL);
        assert_eq!(rows[2].equivalence_class_representative, "a");
        assert_eq!(rows[1].equivalence_class_representative, "c");
    }

    #[test]
    fn inner_perturbation_keeps_r() {
        let nu = NonsmoothDiffeo::psi(0.4).unwrap();
        let r0 = make_soliton(nu.clone()).unwrap().r;
        let pert = nu.compose_smooth(&bump_map(0.5), &bump_map(-1.0)).unwrap();
        assert!((make_soliton(pert).unwrap().r - r0).abs() < 1e-10);
    }

    #[test]
    fn extension_agrees_and_is_compatible() {
        let nu = NonsmoothDiffeo::psi(0.7).unwrap();
        let id = localized_extension(&NonsmoothDiffeo::identity(), (0.0, 1.0)).unwrap();
        assert!(id.breakpoints().is_empty());
        assert!(max_deviation(&id, &CircleMap::identity(), (-PI, PI), 64) == 0.0);
        let small = (0.5, 2.0);
        let large = (0.2, f64::INFINITY);
        let e1 = localized_extension(&nu, small).unwrap();
        let e2 = localized_extension(&nu, large).unwrap();
        assert!(e1.breakpoints().is_empty() && e2.breakpoints().is_empty());
        let back = compose(&invert(&e2).unwrap(), &e1).unwrap();
        assert!(max_deviation(&back, &CircleMap::identity(), line_interval_angles(small).unwrap(), 512) < 1e-8);
        let neg = localized_extension(&nu, (f64::NEG_INFINITY, -0.3)).unwrap();
        assert!(max_deviation(&neg, nu.map(), (-PI, 2.0 * (-0.3f64).atan()), 512) < 1e-9);
        assert!(matches!(localized_extension(&nu, (-1.0, 1.0)), Err(Error::Precondition(_))));
    }

    #[test]
    fn cover_certificates() {
        let z = translation_cover(0.0).unwrap();
        assert!(z.minus.is_identity() && z.middle.is_identity() && z.plus.is_identity());
        let c = translation_cover(0.3).unwrap();
        assert!(c.product_residual < 1e-8);
        assert!(c.epsilon >= 0.05, "{}", c.epsilon);
        let dev = max_deviation(&c.plus, &CircleMap::identity(), (-PI, 0.0), 512);
        assert!(dev < 1e-12);
        assert!(matches!(translation_cover(1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn conjugation() {
        // a plus piece with nontrivial second jet at −1: a sin²θ (1 + sin θ)
        let a = 0.2;
        let f = VectorField::trig(vec![a / 2.0, 0.0, -a / 2.0], vec![0.75 * a, 0.0, -0.25 * a]);
        let plus = exp_field(&f, 1.0, DEFAULT_FLOW_TOL).unwrap();
        let nu = NonsmoothDiffeo::new(CircleMap::identity(), plus).unwrap();
        assert!(conjugated_map(&nu, &CircleMap::identity()).unwrap().is_identity());
        let g = CircleMap::dilation(0.3);
        let out = conjugated_map(&nu, &g).unwrap();
        let l = out.jets(PI, Side::Below, 2);
        let r = out.jets(PI, Side::Above, 2);
        assert!((l[1] - r[1]).abs() < 1e-9);
        assert!((l[2] - r[2]).abs() > 1e-3, "{l:?} {r:?}");
        assert!(matches!(conjugated_map(&nu, &CircleMap::rotation(0.2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn square_root_map() {
        let s = square_root_soliton();
        assert_eq!(s.kind, SolitonKind::TypeIII);
        assert_eq!(square_root(0.0), 0.0);
        let (lo, hi) = s.range_interval.unwrap();
        for i in 0..256 {
            let th = -PI + 2.0 * PI * (i as f64 + 0.5) / 256.0;
            let v = square_root(th);
            assert!(v > lo && v < hi);
        }
        assert!(square_root_intertwining_residual(&CircleMap::rotation(0.1)).unwrap() < 1e-9);
        assert!(square_root_intertwining_residual(&exp_field(&VectorField::line_bump(0.0, 0.6, 0.4), 0.3, DEFAULT_FLOW_TOL).unwrap()).unwrap() < 1e-9);
    }
}
