use crate::error::{Error, Result};
use crate::taylor::Real;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// An element of PSL(2, ℝ) acting on the line by s ↦ (as + b)/(cs + d).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MobiusElement {
    /// Normalizes to unit determinant; rejects non-positive determinants.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::InvalidMap(format!("Möbius determinant {det} is not positive")));
        }
        let k = det.sqrt();
        Ok(Self { a: a / k, b: b / k, c: c / k, d: d / k })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// Rotation of the circle by α, written in line coordinates.
    pub fn rotation(alpha: f64) -> Self {
        let (s, c) = (alpha / 2.0).sin_cos();
        Self { a: c, b: s, c: -s, d: c }
    }

    /// Dilation s ↦ e^t s.
    pub fn dilation(t: f64) -> Self {
        let e = (t / 2.0).exp();
        Self { a: e, b: 0.0, c: 0.0, d: 1.0 / e }
    }

    /// Translation s ↦ s + t.
    pub fn translation(t: f64) -> Self {
        Self { a: 1.0, b: t, c: 0.0, d: 1.0 }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Matrix product `self · other`, i.e. the composition self ∘ other.
    pub fn compose(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Action on the line (∞ handled by the caller).
    pub fn apply_line(&self, s: f64) -> f64 {
        (self.a * s + self.b) / (self.c * s + self.d)
    }

    /// SU(1,1) form z ↦ (αz + β)/(β̄z + ᾱ) of the conjugated circle map.
    pub fn su11(&self) -> (Complex64, Complex64) {
        let alpha = Complex64::new(self.a + self.d, self.b - self.c) / 2.0;
        let beta = Complex64::new(self.d - self.a, self.b + self.c) / 2.0;
        (alpha, beta)
    }

    /// Lift θ ↦ θ + 2 arg α + 2 arg(1 + (β/α) e^{−iθ}).
    pub fn lift_t<T: Real>(&self, x: T) -> T {
        let (alpha, beta) = self.su11();
        let q = beta / alpha;
        let (r, phi) = (q.norm(), q.arg());
        let shift = 2.0 * alpha.arg();
        if r == 0.0 {
            return x + shift;
        }
        let (s, c) = (T::cst(phi) - x).sin_cos();
        let re = c * r + 1.0;
        let im = s * r;
        x + shift + (im / re).atan() * 2.0
    }

    /// Does the element fix −1 (s = ∞)?
    pub fn fixes_minus_one(&self) -> bool {
        self.c.abs() < 1e-15
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_diffeo::{cayley, cayley_inv};

    #[test]
    fn lift_is_conjugated_line_action() {
        let m = MobiusElement::new(1.3, -0.4, 0.7, 0.9).unwrap();
        assert!((m.det() - 1.0).abs() < 1e-12);
        for i in 0..40 {
            let th = -3.0 + 0.15 * i as f64;
            let s = cayley(th).unwrap();
            let img = m.apply_line(s);
            let lifted = m.lift_t(th);
            let expect = cayley_inv(img);
            let diff = (lifted - expect).rem_euclid(2.0 * std::f64::consts::PI);
            assert!(diff < 1e-12 || (2.0 * std::f64::consts::PI - diff) < 1e-12);
        }
    }

    #[test]
    fn rotation_lift_is_shift() {
        let m = MobiusElement::rotation(0.8);
        for th in [-2.0, 0.0, 1.5] {
            assert!((m.lift_t(th) - th - 0.8).abs() < 1e-14);
        }
    }

    #[test]
    fn dilations_compose_and_fix_minus_one() {
        let a = MobiusElement::dilation(0.4).compose(&MobiusElement::dilation(-1.1));
        let b = MobiusElement::dilation(-0.7);
        for (x, y) in [(a.a, b.a), (a.b, b.b), (a.c, b.c), (a.d, b.d)] {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(MobiusElement::dilation(0.9).lift_t(std::f64::consts::PI), std::f64::consts::PI);
        assert!(MobiusElement::new(1.0, 2.0, 3.0, 4.0).is_err());
    }
}
