use super::field::{smooth_transition, VectorField};
use super::mobius::MobiusElement;
use super::{on_plus_half, Side};
use crate::error::{Error, Result};
use crate::ode;
use crate::quadrature::{periodic_breaks, Rule};
use crate::taylor::{poly_in, Real, Taylor};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Default local error tolerance for flows.
pub const DEFAULT_FLOW_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessClass {
    Smooth,
    Sobolev(f64),
    PiecewiseC1,
    PiecewiseC0,
}

impl SmoothnessClass {
    fn rank(&self) -> u8 {
        match self {
            SmoothnessClass::Smooth => 3,
            SmoothnessClass::Sobolev(_) => 2,
            SmoothnessClass::PiecewiseC1 => 1,
            SmoothnessClass::PiecewiseC0 => 0,
        }
    }

    /// The weaker of two classes.
    pub fn weakest(self, other: Self) -> Self {
        match (self, other) {
            (SmoothnessClass::Sobolev(a), SmoothnessClass::Sobolev(b)) => SmoothnessClass::Sobolev(a.min(b)),
            _ if self.rank() <= other.rank() => self,
            _ => other,
        }
    }
}

#[derive(Debug)]
enum Lift {
    Identity,
    Rotation(f64),
    Mobius(MobiusElement),
    Flow { field: VectorField, t: f64, tol: f64 },
    /// `outer ∘ inner`.
    Compose(CircleMap, CircleMap),
    Inverse(CircleMap),
    Glued { minus: CircleMap, plus: CircleMap },
    Extension(Extension),
    /// φ ↦ base(nφ)/n.
    Cover { base: CircleMap, n: u32 },
}

/// An orientation-preserving circle homeomorphism given by its lift.
#[derive(Clone, Debug)]
pub struct CircleMap {
    node: Arc<Lift>,
    class: SmoothnessClass,
    breakpoints: Vec<f64>,
}

macro_rules! coeffs_of {
    ($map:expr, $y0:expr, $side:expr, $m:expr) => {{
        let m: usize = $m;
        match m {
            0..=1 => $map.lift_t(Taylor::<2>::variable($y0), $side).c[..=m].to_vec(),
            2 => $map.lift_t(Taylor::<3>::variable($y0), $side).c.to_vec(),
            3..=4 => $map.lift_t(Taylor::<5>::variable($y0), $side).c[..=m].to_vec(),
            5..=9 => $map.lift_t(Taylor::<10>::variable($y0), $side).c[..=m].to_vec(),
            10..=13 => $map.lift_t(Taylor::<14>::variable($y0), $side).c[..=m].to_vec(),
            _ => panic!("derivative order {m} is not supported"),
        }
    }};
}

impl CircleMap {
    fn from_node(node: Lift, class: SmoothnessClass, breakpoints: Vec<f64>) -> Self {
        let breakpoints = if class == SmoothnessClass::Smooth { vec![] } else { periodic_breaks(&breakpoints) };
        Self { node: Arc::new(node), class, breakpoints }
    }

    pub fn identity() -> Self {
        Self::from_node(Lift::Identity, SmoothnessClass::Smooth, vec![])
    }

    pub fn rotation(alpha: f64) -> Self {
        Self::from_node(Lift::Rotation(alpha), SmoothnessClass::Smooth, vec![])
    }

    pub fn mobius(m: MobiusElement) -> Self {
        Self::from_node(Lift::Mobius(m), SmoothnessClass::Smooth, vec![])
    }

    /// Cayley-conjugated dilation δ(t): s ↦ e^t s.
    pub fn dilation(t: f64) -> Self {
        Self::mobius(MobiusElement::dilation(t))
    }

    /// Cayley-conjugated translation τ(t): s ↦ s + t.
    pub fn translation(t: f64) -> Self {
        Self::mobius(MobiusElement::translation(t))
    }

    /// The map equal to `minus` on [−π, 0) and to `plus` on [0, π).
    /// Both pieces must agree at 0 and at π.
    pub fn glued(minus: CircleMap, plus: CircleMap) -> Result<Self> {
        for p in [0.0, PI] {
            let (a, b) = (minus.lift(p), plus.lift(p));
            if (a - b).abs() > 1e-10 {
                return Err(Error::InvalidMap(format!(
                    "glued pieces disagree at θ = {p}: {a} vs {b}"
                )));
            }
        }
        let mut breaks = minus.breakpoints.clone();
        breaks.extend(plus.breakpoints.iter().copied());
        let mut class = minus.class.weakest(plus.class);
        for p in [0.0, PI] {
            let jm = minus.jets(p, Side::Above, 2);
            let jp = plus.jets(p, Side::Above, 2);
            if (jm[1] - jp[1]).abs() > 1e-12 {
                class = class.weakest(SmoothnessClass::PiecewiseC0);
                breaks.push(p);
            } else if (jm[2] - jp[2]).abs() > 1e-12 {
                class = class.weakest(SmoothnessClass::PiecewiseC1);
                breaks.push(p);
            }
        }
        Ok(Self::from_node(Lift::Glued { minus, plus }, class, breaks))
    }

    /// The n-fold cover partner φ ↦ γ̃(nφ)/n.
    pub fn cover(base: CircleMap, n: u32) -> Self {
        let mut breaks = vec![];
        for &b in &base.breakpoints {
            for j in 0..n {
                breaks.push((b + 2.0 * PI * j as f64) / n as f64);
            }
        }
        let class = base.class;
        Self::from_node(Lift::Cover { base, n }, class, breaks)
    }

    pub(crate) fn extension(ext: Extension) -> Self {
        Self::from_node(Lift::Extension(ext), SmoothnessClass::Smooth, vec![])
    }

    pub fn class(&self) -> SmoothnessClass {
        self.class
    }

    /// Breakpoints reduced into [0, 2π).
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn is_identity(&self) -> bool {
        matches!(*self.node, Lift::Identity)
    }

    /// Rotation angle if the map is stored as a rotation or the identity.
    pub fn as_rotation(&self) -> Option<f64> {
        match *self.node {
            Lift::Identity => Some(0.0),
            Lift::Rotation(a) => Some(a),
            _ => None,
        }
    }

    /// Returns the Möbius element if the map is stored as one.
    pub fn as_mobius(&self) -> Option<MobiusElement> {
        match *self.node {
            Lift::Mobius(m) => Some(m),
            Lift::Identity => Some(MobiusElement::identity()),
            Lift::Rotation(a) => Some(MobiusElement::rotation(a)),
            _ => None,
        }
    }

    pub fn lift(&self, theta: f64) -> f64 {
        self.lift_t(theta, Side::Above)
    }

    pub fn lift_side(&self, theta: f64, side: Side) -> f64 {
        self.lift_t(theta, side)
    }

    /// Lift evaluated in Taylor arithmetic. `side` picks the one-sided
    /// branch when the primal argument sits exactly on a breakpoint.
    pub fn lift_t<T: Real>(&self, x: T, side: Side) -> T {
        match &*self.node {
            Lift::Identity => x,
            Lift::Rotation(a) => x + *a,
            Lift::Mobius(m) => m.lift_t(x),
            Lift::Flow { field, t, tol } => {
                match ode::integrate(|y: &T| field.eval_t(*y, side), x, *t, *tol) {
                    Ok(y) => y,
                    Err(_) => x * f64::NAN,
                }
            }
            Lift::Compose(outer, inner) => outer.lift_t(inner.lift_t(x, side), side),
            Lift::Inverse(g) => g.inverse_t(x, side),
            Lift::Glued { minus, plus } => {
                if on_plus_half(x.value(), side) {
                    plus.lift_t(x, side)
                } else {
                    minus.lift_t(x, side)
                }
            }
            Lift::Extension(e) => e.lift_t(x, side),
            Lift::Cover { base, n } => base.lift_t(x * *n as f64, side) / *n as f64,
        }
    }

    /// Derivatives γ̃, γ̃', …, γ̃^(order) at θ from the given side.
    pub fn jets(&self, theta: f64, side: Side, order: usize) -> Vec<f64> {
        let c = coeffs_of!(self, theta, side, order);
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

    /// First derivative of the lift.
    pub fn derivative(&self, theta: f64, side: Side) -> f64 {
        self.lift_t(Taylor::<2>::variable(theta), side).c[1]
    }

    /// γ̃'(y) for a Taylor argument y.
    pub fn derivative_t<T: Real>(&self, y: T, side: Side) -> T {
        let m = T::order();
        let y0 = y.value();
        let g = coeffs_of!(self, y0, side, m + 1);
        let d: Vec<f64> = (0..=m).map(|j| (j + 1) as f64 * g[j + 1]).collect();
        poly_in(&d, y - y0)
    }

    /// Value of γ̃⁻¹ at x.
    pub fn inverse_lift(&self, x: f64) -> f64 {
        match &*self.node {
            Lift::Identity => x,
            Lift::Rotation(a) => x - a,
            Lift::Compose(outer, inner) => inner.inverse_lift(outer.inverse_lift(x)),
            Lift::Inverse(g) => g.lift(x),
            Lift::Cover { base, n } => base.inverse_lift(x * *n as f64) / *n as f64,
            _ => self.solve(x),
        }
    }

    /// γ̃⁻¹ in Taylor arithmetic, by series reversion around the primal root.
    pub fn inverse_t<T: Real>(&self, x: T, side: Side) -> T {
        let x0 = x.value();
        let y0 = self.inverse_lift(x0);
        let m = T::order();
        if m == 0 {
            return T::cst(y0);
        }
        let g = coeffs_of!(self, y0, side, m);
        let dx = x - x0;
        let mut delta = dx / g[1];
        for _ in 1..m {
            let mut acc = T::cst(0.0);
            let mut pow = delta;
            for gk in g.iter().take(m + 1).skip(2) {
                pow = pow * delta;
                acc = acc + pow * *gk;
            }
            delta = (dx - acc) / g[1];
        }
        delta + y0
    }

    /// Monotone root finding on one period: bracketing plus safeguarded Newton.
    fn solve(&self, x: f64) -> f64 {
        let k = ((x + PI) / (2.0 * PI)).floor();
        let xr = x - 2.0 * PI * k;
        let f = |y: f64| self.lift(y) - xr;
        let (mut lo, mut hi) = (xr, xr);
        let (mut flo, mut fhi) = (f(lo), 0.0);
        fhi += flo;
        let mut step = 0.5;
        let mut guard = 0;
        while flo > 0.0 && guard < 60 {
            hi = lo;
            fhi = flo;
            lo -= step;
            step *= 2.0;
            flo = f(lo);
            guard += 1;
        }
        step = 0.5;
        while fhi < 0.0 && guard < 120 {
            lo = hi;
            hi += step;
            step *= 2.0;
            fhi = f(hi);
            guard += 1;
        }
        if flo == 0.0 {
            return lo + 2.0 * PI * k;
        }
        if fhi == 0.0 {
            return hi + 2.0 * PI * k;
        }
        let mut y = if flo.abs() < fhi.abs() { lo } else { hi };
        for _ in 0..200 {
            let t = self.lift_t(Taylor::<2>::variable(y), Side::Above);
            let fy = t.c[0] - xr;
            if fy == 0.0 {
                break;
            }
            if fy < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let d = t.c[1];
            let mut yn = y - fy / d;
            if !(d > 0.0) || !(yn > lo && yn < hi) {
                yn = 0.5 * (lo + hi);
            }
            let done = (yn - y).abs() <= 2e-16 * (1.0 + y.abs()) || hi - lo <= 2e-16 * (1.0 + y.abs());
            y = yn;
            if done {
                break;
            }
        }
        y + 2.0 * PI * k
    }

    /// Checks equivariance and strict monotonicity on an n-point grid per
    /// breakpoint gap.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut pts = vec![];
        let mut cuts: Vec<f64> = self.breakpoints.clone();
        cuts.push(0.0);
        cuts.push(2.0 * PI);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        for w in cuts.windows(2) {
            for j in 0..n {
                pts.push(w[0] + (w[1] - w[0]) * (j as f64 + 0.5) / n as f64);
            }
        }
        let mut prev = f64::NEG_INFINITY;
        for &p in &pts {
            let v = self.lift(p);
            if !v.is_finite() {
                return Err(Error::InvalidMap(format!("lift is not finite at θ = {p}")));
            }
            if v <= prev {
                return Err(Error::InvalidMap(format!("lift is not increasing near θ = {p}")));
            }
            let w = self.lift(p + 2.0 * PI);
            if (w - v - 2.0 * PI).abs() > 1e-9 {
                return Err(Error::InvalidMap(format!("lift is not 2π-equivariant at θ = {p}")));
            }
            prev = v;
        }
        Ok(())
    }

    pub(crate) fn flow(field: VectorField, t: f64, tol: f64) -> Self {
        let class = field.class();
        let mut breaks = vec![];
        for b in field.breakpoints() {
            breaks.push(b);
            if field.eval(b).abs() > 1e-14 {
                let back = CircleMap::from_node(
                    Lift::Flow { field: field.clone(), t: -t, tol },
                    SmoothnessClass::Smooth,
                    vec![],
                );
                breaks.push(back.lift(b));
            }
        }
        Self::from_node(Lift::Flow { field, t, tol }, class, breaks)
    }
}

/// γ1 ∘ γ2.
pub fn compose(g1: &CircleMap, g2: &CircleMap) -> Result<CircleMap> {
    if g1.is_identity() {
        return Ok(g2.clone());
    }
    if g2.is_identity() {
        return Ok(g1.clone());
    }
    let class = g1.class.weakest(g2.class);
    let mut breaks: Vec<f64> = g2.breakpoints.clone();
    for &b in &g1.breakpoints {
        breaks.push(g2.inverse_lift(b));
    }
    let out = CircleMap::from_node(Lift::Compose(g1.clone(), g2.clone()), class, breaks);
    out.validate(4)?;
    Ok(out)
}

/// Numerical inverse: monotone root finding per query point.
pub fn invert(g: &CircleMap) -> Result<CircleMap> {
    match &*g.node {
        Lift::Identity => Ok(g.clone()),
        Lift::Rotation(a) => Ok(CircleMap::rotation(-a)),
        Lift::Inverse(h) => Ok(h.clone()),
        _ => {
            g.validate(4)?;
            let breaks: Vec<f64> = g.breakpoints.iter().map(|&b| g.lift(b)).collect();
            Ok(CircleMap::from_node(Lift::Inverse(g.clone()), g.class, breaks))
        }
    }
}

/// Exp(t f): the time-t flow of dθ/dt = f(θ), adaptive to local error `tol`.
pub fn exp_field(f: &VectorField, t: f64, tol: f64) -> Result<CircleMap> {
    if !(tol > 0.0) {
        return Err(Error::Domain("flow tolerance must be positive".into()));
    }
    if t == 0.0 {
        return Ok(CircleMap::identity());
    }
    let map = CircleMap::flow(f.clone(), t, tol);
    let probe = map.lift(0.3);
    if !probe.is_finite() {
        let err = ode::integrate(|y: &f64| f.eval(*y), 0.3, t, tol).err();
        return Err(err.unwrap_or_else(|| Error::Integration("non-finite flow".into())));
    }
    Ok(map)
}

/// Smooth circle map equal to `base` on [a, b] and continued past b by a
/// positive derivative that blends into a constant slope.
#[derive(Debug, Clone)]
pub(crate) struct Extension {
    base: CircleMap,
    a: f64,
    b: f64,
    delta: f64,
    kappa: f64,
    base_a: f64,
    base_b: f64,
    q1: f64,
}

const EXT_PANELS: usize = 4;
const EXT_ORDER: usize = 20;

impl Extension {
    pub(crate) fn new(base: CircleMap, a: f64, b: f64, delta: f64) -> Result<Self> {
        if !(b > a) || b - a + 2.0 * delta >= 2.0 * PI {
            return Err(Error::Precondition(format!(
                "extension interval [{a}, {b}] with margin {delta} does not fit in one period"
            )));
        }
        let mut e = Extension { base_a: base.lift(a), base_b: base.lift(b), base, a, b, delta, kappa: 0.0, q1: 0.0 };
        let rule1 = Rule::composite(b, b + delta, EXT_PANELS, EXT_ORDER);
        let rule3 = Rule::composite(a + 2.0 * PI - delta, a + 2.0 * PI, EXT_PANELS, EXT_ORDER);
        let a1 = rule1.integrate(|th| e.chi(th) * e.base.derivative(th, Side::Above));
        let a3 = rule3.integrate(|th| e.chi(th) * e.base.derivative(th, Side::Above));
        let gap = (a + 2.0 * PI - delta) - (b + delta);
        let kappa = (e.base_a + 2.0 * PI - e.base_b - a1 - a3) / (gap + delta);
        if !(kappa > 0.0) {
            return Err(Error::Numeric(format!("extension slope {kappa} is not positive")));
        }
        e.kappa = kappa;
        e.q1 = a1 + kappa * delta / 2.0;
        Ok(e)
    }

    /// Weight of the base derivative: 1 up to b, 0 on the middle zone.
    fn chi_t<T: Real>(&self, th: T) -> T {
        let v = th.value();
        if v <= self.b + self.delta {
            T::cst(1.0) - smooth_transition((th - self.b) / self.delta)
        } else {
            smooth_transition((th - (self.a + 2.0 * PI - self.delta)) / self.delta)
        }
    }

    fn chi(&self, th: f64) -> f64 {
        self.chi_t(th)
    }

    fn q_t<T: Real>(&self, th: T, side: Side) -> T {
        let chi = self.chi_t(th);
        if chi.value() == 0.0 && chi.err_norm() == 0.0 {
            return T::cst(self.kappa);
        }
        chi * self.base.derivative_t(th, side) + (T::cst(1.0) - chi) * self.kappa
    }

    fn value(&self, xr: f64) -> f64 {
        let (b, d) = (self.b, self.delta);
        let end = self.a + 2.0 * PI;
        if xr <= b {
            self.base.lift(xr)
        } else if xr <= b + d {
            let r = Rule::composite(b, xr, EXT_PANELS, EXT_ORDER);
            self.base_b + r.integrate(|th| self.q_t(th, Side::Above))
        } else if xr <= end - d {
            self.base_b + self.q1 + self.kappa * (xr - b - d)
        } else {
            let r = Rule::composite(xr, end, EXT_PANELS, EXT_ORDER);
            self.base_a + 2.0 * PI - r.integrate(|th| self.q_t(th, Side::Above))
        }
    }

    fn lift_t<T: Real>(&self, x: T, side: Side) -> T {
        let x0 = x.value();
        let k = ((x0 - self.a) / (2.0 * PI)).floor();
        let xr0 = x0 - 2.0 * PI * k;
        let xr = x - 2.0 * PI * k;
        if xr0 <= self.b {
            return self.base.lift_t(xr, side) + 2.0 * PI * k;
        }
        let v = self.value(xr0);
        let q = self.q_t(xr, side);
        (q * xr.derivative()).integral() + v + 2.0 * PI * k
    }
}
