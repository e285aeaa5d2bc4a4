//! Adaptive Dormand–Prince 5(4) integration for autonomous systems.

use crate::error::{Error, Result};
use crate::taylor::Real;

/// State vectors the integrator can advance.
pub trait OdeState: Clone {
    /// `self + Σ c_i k_i`.
    fn lin(&self, terms: &[(f64, &Self)]) -> Self;
    /// Max-norm of a difference vector.
    fn norm(&self) -> f64;
    /// `self - other`.
    fn minus(&self, other: &Self) -> Self {
        self.lin(&[(-1.0, other)])
    }
}

impl<T: Real> OdeState for T {
    fn lin(&self, terms: &[(f64, &Self)]) -> Self {
        let mut out = *self;
        for (c, k) in terms {
            if *c != 0.0 {
                out = out + **k * *c;
            }
        }
        out
    }
    fn norm(&self) -> f64 {
        self.err_norm()
    }
}

impl OdeState for Vec<f64> {
    fn lin(&self, terms: &[(f64, &Self)]) -> Self {
        let mut out = self.clone();
        for (c, k) in terms {
            if *c != 0.0 {
                for (o, x) in out.iter_mut().zip(k.iter()) {
                    *o += c * x;
                }
            }
        }
        out
    }
    fn norm(&self) -> f64 {
        self.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(y)` from 0 to `t_end` with local error below `tol`.
pub fn integrate<S, F>(f: F, y0: S, t_end: f64, tol: f64) -> Result<S>
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    if t_end == 0.0 {
        return Ok(y0);
    }
    let dir = t_end.signum();
    let span = t_end.abs();
    let mut y = y0;
    let mut t = 0.0;
    let mut h = (0.1 * tol.powf(0.2)).min(span).max(1e-6 * span);
    let mut k1 = f(&y);
    let mut steps = 0usize;
    while t < span {
        if h < 1e-14 * span.max(1.0) {
            return Err(Error::Integration(format!("step size underflow at t = {t}")));
        }
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::Integration("step budget exhausted".into()));
        }
        let last = t + h >= span;
        let hh = if last { span - t } else { h };
        let s = dir * hh;
        let k2 = f(&y.lin(&[(s * A21, &k1)]));
        let k3 = f(&y.lin(&[(s * A31, &k1), (s * A32, &k2)]));
        let k4 = f(&y.lin(&[(s * A41, &k1), (s * A42, &k2), (s * A43, &k3)]));
        let k5 = f(&y.lin(&[(s * A51, &k1), (s * A52, &k2), (s * A53, &k3), (s * A54, &k4)]));
        let k6 = f(&y.lin(&[
            (s * A61, &k1),
            (s * A62, &k2),
            (s * A63, &k3),
            (s * A64, &k4),
            (s * A65, &k5),
        ]));
        let y5 = y.lin(&[
            (s * B1, &k1),
            (s * B3, &k3),
            (s * B4, &k4),
            (s * B5, &k5),
            (s * B6, &k6),
        ]);
        let k7 = f(&y5);
        let zero = k1.lin(&[(-1.0, &k1)]);
        let err = zero
            .lin(&[
                (s * E1, &k1),
                (s * E3, &k3),
                (s * E4, &k4),
                (s * E5, &k5),
                (s * E6, &k6),
                (s * E7, &k7),
            ])
            .norm();
        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        if err <= tol {
            t = if last { span } else { t + hh };
            y = y5;
            k1 = k7;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0) };
        h = hh * fac;
    }
    Ok(y)
}
