use super::map::{CircleMap, SmoothnessClass};
use super::{reduce_angle, Side};
use crate::taylor::{Real, Taylor};
use std::f64::consts::PI;

/// Septic smoothstep: 0 for x ≤ 0, 1 for x ≥ 1, C³ in between.
pub fn smoothstep7<T: Real>(x: T) -> T {
    let v = x.value();
    if v <= 0.0 {
        return T::cst(0.0);
    }
    if v >= 1.0 {
        return T::cst(1.0);
    }
    let x2 = x * x;
    let x4 = x2 * x2;
    x4 * (((x * -20.0 + 70.0) * x - 84.0) * x + 35.0)
}

/// C^∞ transition: 0 for x ≤ 0, 1 for x ≥ 1.
pub fn smooth_transition<T: Real>(x: T) -> T {
    let v = x.value();
    if v <= 0.0 {
        return T::cst(0.0);
    }
    if v >= 1.0 {
        return T::cst(1.0);
    }
    let a = (-(T::cst(1.0) / x)).exp();
    let b = (-(T::cst(1.0) / (T::cst(1.0) - x))).exp();
    a / (a + b)
}

/// Profiles in the line coordinate s = tan(θ/2).
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// 1 for s ≤ lo, 0 for s ≥ hi.
    StepDown { lo: f64, hi: f64 },
    /// 0 for s ≤ lo, 1 for s ≥ hi.
    StepUp { lo: f64, hi: f64 },
    /// Compactly supported C^∞ bump with peak `height` at `center`.
    Bump { center: f64, width: f64, height: f64 },
}

impl Profile {
    fn eval_t<T: Real>(&self, s: T) -> T {
        match *self {
            Profile::StepDown { lo, hi } => T::cst(1.0) - smoothstep7((s - lo) / (hi - lo)),
            Profile::StepUp { lo, hi } => smoothstep7((s - lo) / (hi - lo)),
            Profile::Bump { center, width, height } => {
                let x = (s - center) / width;
                if x.value().abs() >= 1.0 {
                    T::cst(0.0)
                } else {
                    (T::cst(1.0) - T::cst(1.0) / (T::cst(1.0) - x * x)).exp() * height
                }
            }
        }
    }

    /// Is the profile locally constant at this s, and with which value?
    fn constant_at(&self, s: f64) -> Option<f64> {
        match *self {
            Profile::StepDown { lo, hi } => {
                if s <= lo {
                    Some(1.0)
                } else if s >= hi {
                    Some(0.0)
                } else {
                    None
                }
            }
            Profile::StepUp { lo, hi } => {
                if s <= lo {
                    Some(0.0)
                } else if s >= hi {
                    Some(1.0)
                } else {
                    None
                }
            }
            Profile::Bump { center, width, .. } => {
                if ((s - center) / width).abs() >= 1.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
        }
    }

    fn limits(&self) -> (f64, f64) {
        (self.constant_at(-1e300).unwrap_or(0.0), self.constant_at(1e300).unwrap_or(0.0))
    }
}

/// Which half-circle cutoff h± multiplies a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutoffSide {
    /// h₋: 1 on (−π, −3π/8], 0 on [−π/8, π).
    Minus,
    /// h₊: 0 on [−π, π/8], 1 on [3π/8, π).
    Plus,
}

impl CutoffSide {
    pub fn eval_t<T: Real>(&self, x: T, side: Side) -> T {
        let r = reduce_angle(x.value(), side);
        let local = x + (r - x.value());
        match self {
            CutoffSide::Plus => {
                if r <= 0.0 {
                    T::cst(0.0)
                } else {
                    smooth_transition((local - PI / 8.0) / (PI / 4.0))
                }
            }
            CutoffSide::Minus => {
                if r >= 0.0 {
                    T::cst(0.0)
                } else {
                    smooth_transition((-local - PI / 8.0) / (PI / 4.0))
                }
            }
        }
    }
}

/// Support description of a field.
#[derive(Clone, Debug, PartialEq)]
pub enum Support {
    FullCircle,
    /// Angular interval [a, b] (a may exceed b modulo 2π).
    Angles(f64, f64),
    /// Interval in the line coordinate; infinite ends denote half-lines.
    Line(f64, f64),
}

/// A real vector field on the circle, identified with the function
/// f(θ) in f(e^{iθ}) d/dθ.
#[derive(Clone, Debug)]
pub enum VectorField {
    /// `Σ cos[k] cos kθ + Σ sin[k-1] sin kθ`.
    Trig { cos: Vec<f64>, sin: Vec<f64> },
    /// `(1 + cos θ) · P(tan(θ/2) / scale)`: the pull-back of the line field
    /// P(t/scale) ∂_t.
    Line { profile: Profile, scale: f64 },
    /// Half-circle cutoff h± times a field.
    Cutoff { side: CutoffSide, field: Box<VectorField> },
    Sum(Vec<VectorField>),
    Scaled(f64, Box<VectorField>),
    /// `minus` on [−π, 0) and `plus` on [0, π).
    Glued { minus: Box<VectorField>, plus: Box<VectorField> },
    /// `χ(d) Σ_k derivs[k] d^k / k!` with d = θ − π reduced to [−π, π),
    /// χ a C^∞ cutoff equal to 1 for |d| ≤ radius/2 and 0 for |d| ≥ radius.
    JetBump { derivs: Vec<f64>, radius: f64 },
    /// `γ_* f`, evaluated through γ⁻¹ and the lift derivative.
    Pushforward { map: CircleMap, field: Box<VectorField> },
}

impl VectorField {
    pub fn trig(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        VectorField::Trig { cos, sin }
    }

    pub fn constant(c: f64) -> Self {
        VectorField::Trig { cos: vec![c], sin: vec![] }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// The translation generator 𝔱(e^{iθ}) = 1 + cos θ.
    pub fn translation_generator() -> Self {
        VectorField::Trig { cos: vec![1.0, 1.0], sin: vec![] }
    }

    /// The dilation generator sin θ (line field t ∂_t).
    pub fn dilation_generator() -> Self {
        VectorField::Trig { cos: vec![], sin: vec![1.0] }
    }

    /// Pull-back of a compact line bump through the Cayley transform.
    pub fn line_bump(center: f64, width: f64, height: f64) -> Self {
        VectorField::Line { profile: Profile::Bump { center, width, height }, scale: 1.0 }
    }

    pub fn scaled(self, a: f64) -> Self {
        VectorField::Scaled(a, Box::new(self))
    }

    pub fn plus(self, other: VectorField) -> Self {
        VectorField::Sum(vec![self, other])
    }

    pub fn minus(self, other: VectorField) -> Self {
        VectorField::Sum(vec![self, other.scaled(-1.0)])
    }

    pub fn cutoff(self, side: CutoffSide) -> Self {
        VectorField::Cutoff { side, field: Box::new(self) }
    }

    pub fn glued(minus: VectorField, plus: VectorField) -> Self {
        VectorField::Glued { minus: Box::new(minus), plus: Box::new(plus) }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_t(theta, Side::Above)
    }

    pub fn eval_side(&self, theta: f64, side: Side) -> f64 {
        self.eval_t(theta, side)
    }

    /// Evaluation in Taylor arithmetic; `side` selects the one-sided piece
    /// when the primal value sits exactly on a breakpoint.
    pub fn eval_t<T: Real>(&self, x: T, side: Side) -> T {
        match self {
            VectorField::Trig { cos, sin } => {
                let r = reduce_angle(x.value(), side);
                eval_trig(cos, sin, x + (r - x.value()))
            }
            VectorField::Line { profile, scale } => {
                let r = reduce_angle(x.value(), side);
                let local = x + (r - x.value());
                let one_plus_cos = local.cos() + 1.0;
                let s0 = (r / 2.0).tan() / scale;
                if let Some(c) = profile.constant_at(s0) {
                    return one_plus_cos * c;
                }
                let s = (local / 2.0).tan() / *scale;
                one_plus_cos * profile.eval_t(s)
            }
            VectorField::Cutoff { side: cs, field } => cs.eval_t(x, side) * field.eval_t(x, side),
            VectorField::Sum(items) => {
                let mut acc = T::cst(0.0);
                for it in items {
                    acc = acc + it.eval_t(x, side);
                }
                acc
            }
            VectorField::Scaled(a, f) => f.eval_t(x, side) * *a,
            VectorField::Glued { minus, plus } => {
                if super::on_plus_half(x.value(), side) {
                    plus.eval_t(x, side)
                } else {
                    minus.eval_t(x, side)
                }
            }
            VectorField::JetBump { derivs, radius } => {
                let d0 = reduce_angle(x.value() - PI, Side::Above);
                let d = x + (d0 - x.value());
                if d0.abs() >= *radius {
                    return T::cst(0.0);
                }
                let mut coeffs = Vec::with_capacity(derivs.len());
                let mut fact = 1.0;
                for (k, &g) in derivs.iter().enumerate() {
                    if k > 1 {
                        fact *= k as f64;
                    }
                    coeffs.push(g / fact);
                }
                let p = crate::taylor::poly_in(&coeffs, d);
                if d0.abs() <= radius / 2.0 {
                    p
                } else {
                    let u = if d0 > 0.0 { d } else { -d };
                    let chi = T::cst(1.0) - smooth_transition((u - radius / 2.0) / (radius / 2.0));
                    p * chi
                }
            }
            VectorField::Pushforward { map, field } => {
                let y = map.inverse_t(x, side);
                let dy = map.derivative_t(y, side);
                dy * field.eval_t(y, side)
            }
        }
    }

    /// Derivatives f, f', …, f^(order) at θ from the given side.
    pub fn jets_at(&self, theta: f64, side: Side, order: usize) -> Vec<f64> {
        assert!(order <= 9, "jet order above 9 is not supported");
        let t = self.eval_t(Taylor::<10>::variable(theta), side);
        t.derivs()[..=order].to_vec()
    }

    /// Smoothness class of the field.
    pub fn class(&self) -> SmoothnessClass {
        match self {
            VectorField::Trig { .. } | VectorField::JetBump { .. } => SmoothnessClass::Smooth,
            VectorField::Line { profile, .. } => {
                let (a, b) = profile.limits();
                if a == b {
                    SmoothnessClass::Smooth
                } else {
                    SmoothnessClass::PiecewiseC1
                }
            }
            VectorField::Cutoff { field, .. } => field.class().weakest(SmoothnessClass::PiecewiseC1),
            VectorField::Sum(items) => items
                .iter()
                .fold(SmoothnessClass::Smooth, |c, f| c.weakest(f.class())),
            VectorField::Scaled(_, f) => f.class(),
            VectorField::Glued { minus, plus } => minus
                .class()
                .weakest(plus.class())
                .weakest(SmoothnessClass::PiecewiseC1),
            VectorField::Pushforward { map, field } => field.class().weakest(map.class()),
        }
    }

    /// Angles in [0, 2π) where the field may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let out = match self {
            VectorField::Trig { .. } | VectorField::JetBump { .. } => vec![],
            VectorField::Line { .. } => {
                if self.class() == SmoothnessClass::Smooth {
                    vec![]
                } else {
                    vec![PI]
                }
            }
            VectorField::Cutoff { field, .. } => {
                let mut b = field.breakpoints();
                b.push(PI);
                b
            }
            VectorField::Sum(items) => items.iter().flat_map(|f| f.breakpoints()).collect(),
            VectorField::Scaled(_, f) => f.breakpoints(),
            VectorField::Glued { minus, plus } => {
                let mut b = minus.breakpoints();
                b.extend(plus.breakpoints());
                b.push(PI);
                let jm = minus.jets_at(0.0, Side::Above, 3);
                let jp = plus.jets_at(0.0, Side::Above, 3);
                if jm.iter().zip(&jp).any(|(a, b)| (a - b).abs() > 1e-12) {
                    b.push(0.0);
                }
                b
            }
            VectorField::Pushforward { map, field } => {
                let mut b: Vec<f64> = field.breakpoints().iter().map(|&p| map.lift(p)).collect();
                b.extend(map.breakpoints().iter().copied());
                b
            }
        };
        crate::quadrature::periodic_breaks(&out)
    }

    /// Support description.
    pub fn support(&self) -> Support {
        match self {
            VectorField::Line { profile, scale } => match *profile {
                Profile::StepDown { hi, .. } => Support::Line(f64::NEG_INFINITY, hi * scale),
                Profile::StepUp { lo, .. } => Support::Line(lo * scale, f64::INFINITY),
                Profile::Bump { center, width, .. } => {
                    Support::Line((center - width) * scale, (center + width) * scale)
                }
            },
            VectorField::Cutoff { side: CutoffSide::Plus, .. } => Support::Angles(PI / 8.0, PI),
            VectorField::Cutoff { side: CutoffSide::Minus, .. } => Support::Angles(-PI, -PI / 8.0),
            VectorField::JetBump { radius, .. } => Support::Angles(PI - radius, PI + radius),
            VectorField::Scaled(_, f) => f.support(),
            _ => Support::FullCircle,
        }
    }

    /// Largest Fourier mode of a trig polynomial field.
    pub fn max_mode(&self) -> Option<usize> {
        match self {
            VectorField::Trig { cos, sin } => {
                let c = cos.iter().rposition(|&x| x != 0.0).unwrap_or(0);
                let s = sin.iter().rposition(|&x| x != 0.0).map(|i| i + 1).unwrap_or(0);
                Some(c.max(s))
            }
            VectorField::Scaled(_, f) => f.max_mode(),
            VectorField::Sum(items) => {
                let mut m = 0;
                for f in items {
                    m = m.max(f.max_mode()?);
                }
                Some(m)
            }
            _ => None,
        }
    }
}

fn eval_trig<T: Real>(cos: &[f64], sin: &[f64], x: T) -> T {
    let n = cos.len().max(sin.len() + 1);
    let mut acc = T::cst(cos.first().copied().unwrap_or(0.0));
    if n <= 1 {
        return acc;
    }
    let (s1, c1) = x.sin_cos();
    let two_c = c1 * 2.0;
    let (mut cprev, mut ccur) = (T::cst(1.0), c1);
    let (mut sprev, mut scur) = (T::cst(0.0), s1);
    for k in 1..n {
        if let Some(&a) = cos.get(k) {
            if a != 0.0 {
                acc = acc + ccur * a;
            }
        }
        if let Some(&b) = sin.get(k - 1) {
            if b != 0.0 {
                acc = acc + scur * b;
            }
        }
        let cn = two_c * ccur - cprev;
        let sn = two_c * scur - sprev;
        cprev = ccur;
        ccur = cn;
        sprev = scur;
        scur = sn;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_matches_direct_sum() {
        let f = VectorField::trig(vec![0.3, -0.2, 0.5], vec![0.1, 0.7, -0.4]);
        for i in 0..64 {
            let th = -7.0 + 0.23 * i as f64;
            let direct = 0.3 - 0.2 * th.cos() + 0.5 * (2.0 * th).cos()
                + 0.1 * th.sin()
                + 0.7 * (2.0 * th).sin()
                - 0.4 * (3.0 * th).sin();
            assert!((f.eval(th) - direct).abs() < 1e-13);
            assert!((f.eval(th) - f.eval(th + 2.0 * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn periodic_evaluation_agrees() {
        let f = VectorField::Line { profile: Profile::StepDown { lo: 1.0, hi: 2.0 }, scale: 3.0 };
        for i in 0..50 {
            let th = -3.1 + 0.125 * i as f64;
            assert!((f.eval(th) - f.eval(th + 2.0 * PI)).abs() < 1e-13);
        }
    }

    #[test]
    fn transitions_are_monotone_and_flat() {
        let mut prev = 0.0;
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let v = smooth_transition(x);
            let w = smoothstep7(x);
            assert!(v >= prev - 1e-15);
            assert!((0.0..=1.0).contains(&w));
            prev = v;
        }
        let d = smoothstep7(Taylor::<5>::variable(0.0)).derivs();
        assert!(d.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn cutoffs_have_disjoint_supports() {
        for i in 0..4096 {
            let th = -PI + 2.0 * PI * i as f64 / 4096.0;
            let a = CutoffSide::Minus.eval_t(th, Side::Above);
            let b = CutoffSide::Plus.eval_t(th, Side::Above);
            assert_eq!(a * b, 0.0);
        }
    }
}
