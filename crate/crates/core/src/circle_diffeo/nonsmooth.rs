use super::jets::{compose_jets, inverse_jets, JetAtMinusOne, MAX_JET_ORDER};
use super::map::{compose, invert, CircleMap};
use super::{reduce_angle, Side};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// An element of Diff(S¹, −1): two smooth pieces meeting at −1, used on
/// the (−π, 0) and (0, π) halves respectively, with their one-sided jets.
#[derive(Clone, Debug)]
pub struct NonsmoothDiffeo {
    minus: CircleMap,
    plus: CircleMap,
    map: CircleMap,
    jets: JetAtMinusOne,
}

/// One-sided first derivatives at −1 and their ratio r = ∂₊ / ∂₋.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneSidedData {
    pub d_minus: f64,
    pub d_plus: f64,
    pub r: f64,
}

fn piece_jets(piece: &CircleMap, order: usize) -> Vec<f64> {
    piece.jets(PI, Side::Above, order)
}

impl NonsmoothDiffeo {
    /// Glues `minus` on [−π, 0) with `plus` on [0, π). Both pieces must be
    /// smooth, fix −1 and agree at 1.
    pub fn new(minus: CircleMap, plus: CircleMap) -> Result<Self> {
        Self::with_order(minus, plus, MAX_JET_ORDER)
    }

    pub fn with_order(minus: CircleMap, plus: CircleMap, order: usize) -> Result<Self> {
        for (name, p) in [("minus", &minus), ("plus", &plus)] {
            if !p.breakpoints().is_empty() {
                return Err(Error::InvalidElement(format!("{name} piece is not smooth")));
            }
            let v = p.lift(PI);
            if (reduce_angle(v, Side::Below) - PI).abs() > 1e-12 {
                return Err(Error::InvalidElement(format!("{name} piece moves −1 to angle {v}")));
            }
        }
        let map = CircleMap::glued(minus.clone(), plus.clone()).map_err(|e| Error::InvalidElement(e.to_string()))?;
        let left = piece_jets(&minus, order);
        let right = piece_jets(&plus, order);
        let jets = JetAtMinusOne::two_sided(left, right)?;
        jets.validate_map()?;
        Ok(Self { minus, plus, map, jets })
    }

    /// ψ_t as an element with identity and dilation pieces.
    pub fn psi(t: f64) -> Result<Self> {
        Self::new(CircleMap::identity(), CircleMap::dilation(t))
    }

    pub fn identity() -> Self {
        Self::new(CircleMap::identity(), CircleMap::identity()).expect("identity is valid")
    }

    pub fn minus_piece(&self) -> &CircleMap {
        &self.minus
    }

    pub fn plus_piece(&self) -> &CircleMap {
        &self.plus
    }

    /// The glued homeomorphism.
    pub fn map(&self) -> &CircleMap {
        &self.map
    }

    pub fn jets(&self) -> &JetAtMinusOne {
        &self.jets
    }

    /// Checks that the pieces still reproduce the stored jets, relative to
    /// the largest jet on each side (high orders of composites cancel).
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.jets.order();
        let l = piece_jets(&self.minus, n);
        let r = piece_jets(&self.plus, n);
        let scale = |v: &[f64]| 1.0 + v.iter().skip(1).fold(0.0f64, |m, x| m.max(x.abs()));
        let (sl, sr) = (scale(self.jets.left()), scale(self.jets.right_values()));
        let pairs = l.iter().zip(self.jets.left()).map(|p| (p, sl)).skip(1);
        let pairs = pairs.chain(r.iter().zip(self.jets.right_values()).map(|p| (p, sr)).skip(1));
        for ((a, b), s) in pairs {
            if (a - b).abs() > tol * s {
                return Err(Error::InvalidElement("pieces disagree with stored jets".into()));
            }
        }
        Ok(())
    }

    /// ν₁ ∘ ν₂. Near −1 each side composes piecewise; the glued map is the
    /// full composite.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            minus: compose(&self.minus, &other.minus)?,
            plus: compose(&self.plus, &other.plus)?,
            map: compose(&self.map, &other.map)?,
            jets: compose_jets(&self.jets, &other.jets)?,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(Self {
            minus: invert(&self.minus)?,
            plus: invert(&self.plus)?,
            map: invert(&self.map)?,
            jets: inverse_jets(&self.jets)?,
        })
    }

    /// Composition with a smooth map on either side; the jets at −1 change
    /// only through the smooth factor's own jets.
    pub fn compose_smooth(&self, left: &CircleMap, right: &CircleMap) -> Result<Self> {
        for g in [left, right] {
            if !g.breakpoints().is_empty() {
                return Err(Error::Smoothness("factor is not smooth".into()));
            }
            if (reduce_angle(g.lift(PI), Side::Below) - PI).abs() > 1e-12 {
                return Err(Error::Precondition("smooth factor must fix −1".into()));
            }
        }
        let n = self.jets.order();
        let lj = JetAtMinusOne::two_sided(piece_jets(left, n), piece_jets(left, n))?;
        let rj = JetAtMinusOne::two_sided(piece_jets(right, n), piece_jets(right, n))?;
        let jets = compose_jets(&lj, &compose_jets(&self.jets, &rj)?)?;
        let wrap = |p: &CircleMap| -> Result<CircleMap> { compose(left, &compose(p, right)?) };
        Ok(Self { minus: wrap(&self.minus)?, plus: wrap(&self.plus)?, map: wrap(&self.map)?, jets })
    }
}

/// ∂±ν(−1) from the stored jets, and r(ν) = ∂₊ν(−1)/∂₋ν(−1).
pub fn one_sided_data(nu: &NonsmoothDiffeo) -> Result<OneSidedData> {
    let d_minus = nu.jets.left().get(1).copied().unwrap_or(0.0);
    let d_plus = nu.jets.right_values().get(1).copied().unwrap_or(0.0);
    if !(d_minus > 0.0 && d_plus > 0.0) {
        return Err(Error::InvalidElement("one-sided derivative at −1 is not positive".into()));
    }
    Ok(OneSidedData { d_minus, d_plus, r: d_plus / d_minus })
}

/// ψ_t: identity on [−π, 0) and the Cayley-conjugated dilation δ(t) on [0, π).
pub fn psi_t(t: f64) -> CircleMap {
    if t == 0.0 {
        return CircleMap::identity();
    }
    CircleMap::glued(CircleMap::identity(), CircleMap::dilation(t)).expect("both pieces fix 1 and −1")
}

/// ν_π = ν ∘ R_π ∘ ν⁻¹ ∘ R_π, for ν normalized to fix 1.
pub fn nu_pi(nu: &NonsmoothDiffeo) -> Result<CircleMap> {
    let v = nu.map.lift(0.0);
    if v.abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "ν must fix 1 (ν(1) is at angle {v}); compose with a smooth map first"
        )));
    }
    let r = CircleMap::rotation(PI);
    let inner = compose(&invert(&nu.map)?, &r)?;
    compose(&nu.map, &compose(&r, &inner)?)
}
