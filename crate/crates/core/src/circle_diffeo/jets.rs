//! Finite jets at the point −1 (θ = π) and the jet calculus of flows.

use crate::error::{Error, Result};
use crate::ode;
use crate::taylor::Taylor;
use std::f64::consts::PI;

/// Default and maximal supported jet order.
pub const MAX_JET_ORDER: usize = 8;

/// Which side of −1 a jet describes. `Right` is the (0, π) half, reached
/// as θ → π from below; `Left` is the (−π, 0) half.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetSide {
    Left,
    Right,
    TwoSided,
}

/// Derivatives (λ₀, …, λ_n) at −1. For maps λ₀ is the image angle; for
/// fields it is the field value. Two-sided jets keep the right-hand list
/// in `right`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetAtMinusOne {
    pub side: JetSide,
    pub values: Vec<f64>,
    pub right: Option<Vec<f64>>,
}

impl JetAtMinusOne {
    pub fn one_sided(side: JetSide, values: Vec<f64>) -> Self {
        Self { side, values, right: None }
    }

    pub fn two_sided(left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::InvalidElement(format!(
                "two-sided jets need equal orders, got {} and {}",
                left.len().saturating_sub(1),
                right.len().saturating_sub(1)
            )));
        }
        Ok(Self { side: JetSide::TwoSided, values: left, right: Some(right) })
    }

    /// Jets of the identity map: λ₀ = π, λ₁ = 1.
    pub fn identity(order: usize) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = PI;
        if order >= 1 {
            v[1] = 1.0;
        }
        Self::one_sided(JetSide::TwoSided, v)
    }

    /// Zero field jets.
    pub fn zero(order: usize) -> Self {
        Self::one_sided(JetSide::TwoSided, vec![0.0; order + 1])
    }

    pub fn order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn left(&self) -> &[f64] {
        &self.values
    }

    pub fn right_values(&self) -> &[f64] {
        self.right.as_deref().unwrap_or(&self.values)
    }

    /// Checks λ₁ > 0 on every stored side, as required for map jets.
    pub fn validate_map(&self) -> Result<()> {
        for v in [self.left(), self.right_values()] {
            if v.len() < 2 || !(v[1] > 0.0) {
                return Err(Error::InvalidElement("map jets need a positive first derivative".into()));
            }
        }
        Ok(())
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self { side: self.side, values, right: None }
    }
}

fn normalized(d: &[f64]) -> Vec<f64> {
    let mut f = 1.0;
    d.iter()
        .enumerate()
        .map(|(k, v)| {
            if k > 1 {
                f *= k as f64;
            }
            v / f
        })
        .collect()
}

fn denormalized(c: &[f64]) -> Vec<f64> {
    let mut f = 1.0;
    c.iter()
        .enumerate()
        .map(|(k, v)| {
            if k > 1 {
                f *= k as f64;
            }
            v * f
        })
        .collect()
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_JET_ORDER {
        return Err(Error::UnsupportedOrder { order: n, max: MAX_JET_ORDER });
    }
    Ok(())
}

/// Jets of Exp(t f) at −1 from the jets of a field vanishing at −1.
///
/// The displacement δ(ε) = Exp(tf)(π + ε) − π obeys δ̇ = f(π + δ); expanding
/// both sides in ε gives the closed triangular jet system, which is
/// integrated here in truncated power-series arithmetic.
pub fn jet_of_exp(fjets: &JetAtMinusOne, t: f64) -> Result<JetAtMinusOne> {
    let n = fjets.order();
    check_order(n)?;
    if fjets.right.is_some() {
        let l = jet_of_exp(&JetAtMinusOne::one_sided(JetSide::Left, fjets.values.clone()), t)?;
        let r = jet_of_exp(&JetAtMinusOne::one_sided(JetSide::Right, fjets.right_values().to_vec()), t)?;
        return JetAtMinusOne::two_sided(l.values, r.values);
    }
    if fjets.values.first().map_or(false, |v| v.abs() > 1e-14) {
        return Err(Error::Precondition("field jets must vanish at −1".into()));
    }
    let mut fc = normalized(&fjets.values);
    if fc.is_empty() {
        fc.push(0.0);
    }
    fc[0] = 0.0;
    let start = Taylor::<{ MAX_JET_ORDER + 1 }>::variable(0.0);
    let delta = ode::integrate(|d: &Taylor<{ MAX_JET_ORDER + 1 }>| d.compose_series(&fc), start, t, 1e-15)?;
    let mut vals = denormalized(&delta.c[..=n]);
    vals[0] = PI;
    Ok(fjets.with_values(vals))
}

/// Jets of `outer ∘ inner` for two maps fixing −1 (same side).
pub fn compose_jets(outer: &JetAtMinusOne, inner: &JetAtMinusOne) -> Result<JetAtMinusOne> {
    if outer.right.is_some() || inner.right.is_some() {
        let l = compose_one(outer.left(), inner.left())?;
        let r = compose_one(outer.right_values(), inner.right_values())?;
        return JetAtMinusOne::two_sided(l, r);
    }
    Ok(inner.with_values(compose_one(&outer.values, &inner.values)?))
}

fn compose_one(outer: &[f64], inner: &[f64]) -> Result<Vec<f64>> {
    let n = outer.len().min(inner.len()).saturating_sub(1);
    check_order(n)?;
    let mut ci = normalized(&inner[..=n]);
    ci[0] = 0.0;
    let mut co = normalized(&outer[..=n]);
    co[0] = 0.0;
    let mut arr = [0.0; MAX_JET_ORDER + 1];
    arr[..=n].copy_from_slice(&ci);
    let res = Taylor::<{ MAX_JET_ORDER + 1 }>::from_coeffs(arr).compose_series(&co);
    let mut out = denormalized(&res.c[..=n]);
    out[0] = outer[0];
    Ok(out)
}

/// Jets of the inverse map by series reversion.
pub fn inverse_jets(jets: &JetAtMinusOne) -> Result<JetAtMinusOne> {
    jets.validate_map()?;
    if jets.right.is_some() {
        let l = inverse_one(jets.left())?;
        let r = inverse_one(jets.right_values())?;
        return JetAtMinusOne::two_sided(l, r);
    }
    Ok(jets.with_values(inverse_one(&jets.values)?))
}

fn inverse_one(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.len() - 1;
    check_order(n)?;
    let g = normalized(v);
    let mut eps = [0.0; MAX_JET_ORDER + 1];
    if n >= 1 {
        eps[1] = 1.0;
    }
    let x = Taylor::<{ MAX_JET_ORDER + 1 }>::from_coeffs(eps);
    let mut delta = x / g[1];
    for _ in 1..n {
        let mut acc = Taylor::constant(0.0);
        let mut pow = delta;
        for gk in g.iter().skip(2) {
            pow = pow * delta;
            acc = acc + pow * *gk;
        }
        delta = (x - acc) / g[1];
    }
    let mut out = denormalized(&delta.c[..=n]);
    out[0] = v[0];
    Ok(out)
}

/// Field jets g (vanishing to first order) with Exp(g) reproducing a map
/// jet with λ₁ = 1. The map g ↦ jets of Exp(g) is unipotent-triangular, so
/// the correction step below is exact after n − 1 sweeps.
pub fn invert_jets(target: &JetAtMinusOne) -> Result<JetAtMinusOne> {
    if target.right.is_some() {
        let l = invert_jets(&JetAtMinusOne::one_sided(JetSide::Left, target.values.clone()))?;
        let r = invert_jets(&JetAtMinusOne::one_sided(JetSide::Right, target.right_values().to_vec()))?;
        return JetAtMinusOne::two_sided(l.values, r.values);
    }
    let n = target.order();
    check_order(n)?;
    if n >= 1 && (target.values[1] - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "target jets need unit first derivative, got {}",
            target.values[1]
        )));
    }
    let mut g = vec![0.0; n + 1];
    for _ in 0..50 {
        let cur = jet_of_exp(&JetAtMinusOne::one_sided(target.side, g.clone()), 1.0)?;
        let mut worst = 0.0f64;
        for k in 2..=n {
            let r = target.values[k] - cur.values[k];
            worst = worst.max(r.abs() / (1.0 + target.values[k].abs()));
            g[k] += r;
        }
        if worst < 1e-14 {
            return Ok(target.with_values(g));
        }
    }
    Err(Error::Numeric("jet inversion did not converge in 50 steps".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_gives_identity() {
        let j = jet_of_exp(&JetAtMinusOne::zero(6), 1.7).unwrap();
        assert_eq!(j.values, JetAtMinusOne::identity(6).values);
    }

    #[test]
    fn linear_field_scales() {
        let j = jet_of_exp(&JetAtMinusOne::one_sided(JetSide::Left, vec![0.0, 0.4, 0.0]), 1.5).unwrap();
        assert!((j.values[1] - 0.6f64.exp()).abs() < 1e-12);
        assert!(j.values[2].abs() < 1e-14);
    }

    #[test]
    fn quadratic_field_closed_form() {
        // δ̇ = a δ²/2 has δ = ε / (1 − aεt/2): δ'' = a t.
        let a = 0.7;
        let j = jet_of_exp(&JetAtMinusOne::one_sided(JetSide::Left, vec![0.0, 0.0, a]), 0.9).unwrap();
        assert!((j.values[2] - a * 0.9).abs() < 1e-12);
    }

    #[test]
    fn reversion_inverts() {
        let j = JetAtMinusOne::one_sided(JetSide::Right, vec![PI, 1.3, 0.2, -0.5, 0.1]);
        let inv = inverse_jets(&j).unwrap();
        let id = compose_jets(&j, &inv).unwrap();
        assert!((id.values[1] - 1.0).abs() < 1e-14);
        for k in 2..=4 {
            assert!(id.values[k].abs() < 1e-12);
        }
    }

    #[test]
    fn order_limit() {
        assert!(matches!(
            jet_of_exp(&JetAtMinusOne::zero(9), 1.0),
            Err(Error::UnsupportedOrder { .. })
        ));
    }
}
