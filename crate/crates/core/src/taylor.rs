//! Truncated Taylor arithmetic.
//!
//! A [`Taylor<N>`] stores the normalized coefficients `a_k = f^(k)(x0)/k!`
//! for `k < N`. Every lift, field and flow in the crate is written against
//! the [`Real`] trait so the same code yields values (with `f64`) or exact
//! derivative jets (with `Taylor<N>`).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(x: f64) -> Self;
    /// Highest derivative order carried (0 for plain values).
    fn order() -> usize;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn atan(self) -> Self;
    fn tan(self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }
    /// Derivative with respect to the expansion variable (zero for plain values).
    fn derivative(self) -> Self;
    /// Antiderivative vanishing at the expansion point (zero for plain values).
    fn integral(self) -> Self;
    /// Largest absolute coefficient, used for step-size control.
    fn err_norm(&self) -> f64;
    fn powi(self, n: u32) -> Self {
        let mut out = Self::cst(1.0);
        for _ in 0..n {
            out = out * self;
        }
        out
    }
}

impl Real for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn order() -> usize {
        0
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn derivative(self) -> Self {
        0.0
    }
    fn integral(self) -> Self {
        0.0
    }
    fn err_norm(&self) -> f64 {
        self.abs()
    }
    fn powi(self, n: u32) -> Self {
        f64::powi(self, n as i32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor<const N: usize> {
    pub c: [f64; N],
}

impl<const N: usize> Taylor<N> {
    /// Number of derivatives carried beyond the value.
    pub const ORDER: usize = N - 1;

    pub fn constant(x: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x;
        Self { c }
    }

    /// The independent variable `x0 + ε`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x0;
        if N > 1 {
            c[1] = 1.0;
        }
        Self { c }
    }

    pub fn from_coeffs(c: [f64; N]) -> Self {
        Self { c }
    }

    /// k-th derivative at the expansion point.
    pub fn deriv(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for j in 2..=k {
            f *= j as f64;
        }
        self.c[k] * f
    }

    /// All derivatives `f^(k)(x0)` for `k < N`.
    pub fn derivs(&self) -> [f64; N] {
        let mut out = [0.0; N];
        let mut f = 1.0;
        for k in 0..N {
            if k > 1 {
                f *= k as f64;
            }
            out[k] = self.c[k] * f;
        }
        out
    }

    /// Builds a series from derivative values `f^(k)(x0)`.
    pub fn from_derivs(d: &[f64]) -> Self {
        let mut c = [0.0; N];
        let mut f = 1.0;
        for k in 0..N.min(d.len()) {
            if k > 1 {
                f *= k as f64;
            }
            c[k] = d[k] / f;
        }
        Self { c }
    }

    /// Composition `outer(self)` where `outer` is given by normalized
    /// coefficients around `self.c[0]`.
    pub fn compose_series(&self, outer: &[f64]) -> Self {
        let mut delta = *self;
        delta.c[0] = 0.0;
        let mut acc = Self::constant(0.0);
        let mut pow = Self::constant(1.0);
        for (j, &o) in outer.iter().enumerate().take(N) {
            if j > 0 {
                pow = pow * delta;
            }
            acc = acc + pow * o;
        }
        acc
    }
}

impl<const N: usize> Add for Taylor<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] += o.c[k];
        }
        self
    }
}

impl<const N: usize> Sub for Taylor<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] -= o.c[k];
        }
        self
    }
}

impl<const N: usize> Neg for Taylor<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for k in 0..N {
            self.c[k] = -self.c[k];
        }
        self
    }
}

impl<const N: usize> Mul for Taylor<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; N];
        for i in 0..N {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..N - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Self { c }
    }
}

impl<const N: usize> Div for Taylor<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let mut q = [0.0; N];
        let b0 = o.c[0];
        for k in 0..N {
            let mut s = self.c[k];
            for i in 1..=k {
                s -= o.c[i] * q[k - i];
            }
            q[k] = s / b0;
        }
        Self { c: q }
    }
}

impl<const N: usize> Add<f64> for Taylor<N> {
    type Output = Self;
    fn add(mut self, x: f64) -> Self {
        self.c[0] += x;
        self
    }
}

impl<const N: usize> Sub<f64> for Taylor<N> {
    type Output = Self;
    fn sub(mut self, x: f64) -> Self {
        self.c[0] -= x;
        self
    }
}

impl<const N: usize> Mul<f64> for Taylor<N> {
    type Output = Self;
    fn mul(mut self, x: f64) -> Self {
        for k in 0..N {
            self.c[k] *= x;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Taylor<N> {
    type Output = Self;
    fn div(mut self, x: f64) -> Self {
        for k in 0..N {
            self.c[k] /= x;
        }
        self
    }
}

impl<const N: usize> Real for Taylor<N> {
    fn cst(x: f64) -> Self {
        Self::constant(x)
    }

    fn order() -> usize {
        N - 1
    }

    fn value(&self) -> f64 {
        self.c[0]
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn sin_cos(self) -> (Self, Self) {
        let a = &self.c;
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        let (s0, c0) = a[0].sin_cos();
        s[0] = s0;
        c[0] = c0;
        for k in 1..N {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let ja = j as f64 * a[j];
                ss += ja * c[k - j];
                cc += ja * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Self { c: s }, Self { c })
    }

    fn exp(self) -> Self {
        let a = &self.c;
        let mut e = [0.0; N];
        e[0] = a[0].exp();
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * a[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Self { c: e }
    }

    fn ln(self) -> Self {
        let a = &self.c;
        let mut l = [0.0; N];
        l[0] = a[0].ln();
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..k {
                s += j as f64 * l[j] * a[k - j];
            }
            l[k] = (a[k] - s / k as f64) / a[0];
        }
        Self { c: l }
    }

    fn sqrt(self) -> Self {
        let a = &self.c;
        let mut r = [0.0; N];
        r[0] = a[0].sqrt();
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..k {
                s += r[j] * r[k - j];
            }
            r[k] = (a[k] - s) / (2.0 * r[0]);
        }
        Self { c: r }
    }

    fn atan(self) -> Self {
        let w = self.derivative() / (self * self + 1.0);
        w.integral() + self.c[0].atan()
    }

    fn derivative(self) -> Self {
        let mut d = [0.0; N];
        for k in 0..N.saturating_sub(1) {
            d[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Self { c: d }
    }

    fn integral(self) -> Self {
        let mut d = [0.0; N];
        for k in 1..N {
            d[k] = self.c[k - 1] / k as f64;
        }
        Self { c: d }
    }

    fn err_norm(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type T6 = Taylor<6>;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn elementary_derivatives() {
        let x = T6::variable(0.7);
        let s = x.sin().derivs();
        let e = x.exp().derivs();
        let l = x.ln().derivs();
        for k in 0..6 {
            let sk = match k % 4 {
                0 => 0.7f64.sin(),
                1 => 0.7f64.cos(),
                2 => -0.7f64.sin(),
                _ => -0.7f64.cos(),
            };
            assert!(close(s[k], sk, 1e-13));
            assert!(close(e[k], 0.7f64.exp(), 1e-13));
        }
        // d^k ln x = (-1)^{k-1} (k-1)! / x^k
        let mut fact = 1.0;
        for k in 1..6 {
            if k > 1 {
                fact *= (k - 1) as f64;
            }
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            assert!(close(l[k], sign * fact / 0.7f64.powi(k as i32), 1e-12));
        }
    }

    #[test]
    fn atan_and_sqrt_match_closed_forms() {
        let x = T6::variable(0.4);
        let a = x.atan().derivs();
        assert!(close(a[1], 1.0 / (1.0 + 0.16), 1e-14));
        assert!(close(a[2], -2.0 * 0.4 / (1.16f64 * 1.16), 1e-13));
        let r = x.sqrt() * x.sqrt() - x;
        assert!(r.err_norm() < 1e-14);
        let t = x.tan().derivs();
        assert!(close(t[1], 1.0 / 0.4f64.cos().powi(2), 1e-13));
    }

    #[test]
    fn division_inverts_multiplication() {
        let x = T6::variable(1.3);
        let y = x.sin() + x * x;
        let q = (y * x.exp()) / x.exp();
        assert!((q - y).err_norm() < 1e-13);
    }

    #[test]
    fn series_composition() {
        // exp(sin x) via composition of the exp series around sin(x0)
        let x = T6::variable(0.2);
        let s = x.sin();
        let e0 = s.c[0].exp();
        let mut outer = [0.0; 6];
        let mut f = 1.0;
        for (k, o) in outer.iter_mut().enumerate() {
            if k > 1 {
                f *= k as f64;
            }
            *o = e0 / f;
        }
        let a = s.compose_series(&outer);
        assert!((a - s.exp()).err_norm() < 1e-14);
    }
}

/// Horner evaluation of `Σ_k coeffs[k] δ^k`.
pub fn poly_in<T: Real>(coeffs: &[f64], delta: T) -> T {
    let mut acc = T::cst(0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * delta + c;
    }
    acc
}
