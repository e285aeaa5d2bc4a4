use super::field::VectorField;
use super::jets::{invert_jets, JetAtMinusOne, JetSide, MAX_JET_ORDER};
use super::map::{compose, exp_field, CircleMap, DEFAULT_FLOW_TOL};
use super::{reduce_angle, Side};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Radius of the bumps that carry the glued field's jets.
const BUMP_RADIUS: f64 = 0.5;

/// γ = Exp(g) ∘ γ̲ with g piecewise smooth and γ̲ flat at −1 to the
/// requested order.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub field: VectorField,
    pub smooth: CircleMap,
    pub field_jets: JetAtMinusOne,
}

fn side_jets(g: &CircleMap, side: Side, n: usize) -> Result<Vec<f64>> {
    let mut j = g.jets(PI, side, n);
    if !j.iter().all(|v| v.is_finite()) {
        return Err(Error::Precondition("jets at −1 are unavailable".into()));
    }
    j[0] = reduce_angle(j[0], Side::Below);
    Ok(j)
}

/// Splits a piecewise smooth map with unit derivative at −1 into the
/// exponential of a glued field and a map whose jets at −1 are trivial
/// through order n.
pub fn decompose_psone(g: &CircleMap, n: usize) -> Result<Decomposition> {
    if n > MAX_JET_ORDER {
        return Err(Error::UnsupportedOrder { order: n, max: MAX_JET_ORDER });
    }
    let left = side_jets(g, Side::Above, n)?;
    let right = side_jets(g, Side::Below, n)?;
    for j in [&left, &right] {
        if (j[0] - PI).abs() > 1e-10 {
            return Err(Error::Precondition(format!("map moves −1 to angle {}", j[0])));
        }
        if n >= 1 && (j[1] - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!("derivative at −1 is {}, not 1", j[1])));
        }
    }
    let mut left = left;
    let mut right = right;
    if n >= 1 {
        left[1] = 1.0;
        right[1] = 1.0;
    }
    let gj = invert_jets(&JetAtMinusOne::two_sided(left, right)?)?;
    let bump = |d: &[f64]| VectorField::JetBump { derivs: d.to_vec(), radius: BUMP_RADIUS };
    let field = VectorField::glued(bump(gj.left()), bump(gj.right_values()));
    let back = exp_field(&field, -1.0, DEFAULT_FLOW_TOL)?;
    let smooth = compose(&back, g)?;
    Ok(Decomposition { field, smooth, field_jets: gj })
}

/// Membership in B_n by jets at −1 from both sides: fixed point for n = 0,
/// unit derivative from n = 1, vanishing derivatives 2..n beyond.
pub fn b_n_membership(g: &CircleMap, n: usize, tol: f64) -> bool {
    let order = n.min(MAX_JET_ORDER + 4).max(1);
    for side in [Side::Above, Side::Below] {
        let j = g.jets(PI, side, order);
        if !j.iter().all(|v| v.is_finite()) {
            return false;
        }
        let d = (j[0] - PI).rem_euclid(2.0 * PI);
        if d.min(2.0 * PI - d) > tol {
            return false;
        }
        if n >= 1 && (j[1] - 1.0).abs() > tol {
            return false;
        }
        if j.iter().take(n + 1).skip(2).any(|v| v.abs() > tol) {
            return false;
        }
    }
    true
}

impl Decomposition {
    /// Exp(g) ∘ γ̲, which should reproduce the decomposed map.
    pub fn reconstruct(&self) -> Result<CircleMap> {
        let fwd = exp_field(&self.field, 1.0, DEFAULT_FLOW_TOL)?;
        compose(&fwd, &self.smooth)
    }

    pub fn side(&self, side: JetSide) -> &[f64] {
        match side {
            JetSide::Right => self.field_jets.right_values(),
            _ => self.field_jets.left(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_everywhere() {
        for n in 0..6 {
            assert!(b_n_membership(&CircleMap::identity(), n, 1e-12));
        }
    }

    #[test]
    fn dilation_in_b0_only() {
        let d = CircleMap::dilation(0.4);
        assert!(b_n_membership(&d, 0, 1e-9));
        assert!(!b_n_membership(&d, 1, 1e-9));
        assert!(b_n_membership(&CircleMap::translation(0.4), 1, 1e-9));
    }

    #[test]
    fn smooth_map_needs_no_field() {
        let t = CircleMap::translation(0.3);
        let d = decompose_psone(&t, 4).unwrap();
        for (a, b) in d.field_jets.left().iter().zip(d.field_jets.right_values()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(b_n_membership(&d.smooth, 4, 1e-7));
    }
}
