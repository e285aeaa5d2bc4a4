//! Gauss–Legendre rules and breakpoint-aware composite panels.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// A flat list of quadrature nodes and weights.
#[derive(Clone, Debug, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Composite rule on [a, b] with `panels` equal panels of `order` points.
    pub fn composite(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let mut r = Rule::default();
        r.push_segment(a, b, panels, order);
        r
    }

    /// Composite rule on [a, b] whose interior breakpoints are respected;
    /// each segment gets panels of width at most `max_width`.
    pub fn split(a: f64, b: f64, breaks: &[f64], max_width: f64, order: usize) -> Self {
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        let mut r = Rule::default();
        let mut lo = a;
        for hi in cuts.into_iter().chain(std::iter::once(b)) {
            if hi - lo > 1e-15 {
                let panels = ((hi - lo) / max_width).ceil().max(1.0) as usize;
                r.push_segment(lo, hi, panels, order);
            }
            lo = hi;
        }
        r
    }

    fn push_segment(&mut self, a: f64, b: f64, panels: usize, order: usize) {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            for (xi, wi) in x.iter().zip(&w) {
                self.nodes.push(mid + 0.5 * h * xi);
                self.weights.push(0.5 * h * wi);
            }
        }
    }
}

/// Breakpoints of a periodic function reduced into [0, 2π).
pub fn periodic_breaks(breaks: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = breaks
        .iter()
        .map(|&b| {
            let r = b.rem_euclid(2.0 * PI);
            if 2.0 * PI - r < 1e-12 {
                0.0
            } else {
                r
            }
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

/// Composite rule over one period [0, 2π) split at the given breakpoints.
pub fn periodic_rule(breaks: &[f64], max_width: f64, order: usize) -> Rule {
    Rule::split(0.0, 2.0 * PI, &periodic_breaks(breaks), max_width, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m30: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((m30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn split_respects_breaks() {
        let r = Rule::split(0.0, 2.0, &[1.0], 0.3, 8);
        let v = r.integrate(|x| (x - 1.0).abs());
        assert!((v - 1.0).abs() < 1e-14);
    }
}
