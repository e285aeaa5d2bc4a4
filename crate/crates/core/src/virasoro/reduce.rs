//! Normal-ordered reduction of L_n acting on PBW words L_{−μ₁}⋯L_{−μ_k}v.

use num_rational::Ratio;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

/// Non-increasing parts μ₁ ≥ … ≥ μ_k ≥ 1.
pub type Word = Vec<u32>;

pub trait Coefficient:
    Clone + Debug + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn int(i: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
}

impl Coefficient for f64 {
    fn int(i: i64) -> Self {
        i as f64
    }
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Coefficient for Ratio<i128> {
    fn int(i: i64) -> Self {
        Ratio::from_integer(i as i128)
    }
    fn ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }
}

pub fn level(w: &[u32]) -> u32 {
    w.iter().sum()
}

/// All partitions of `n` with non-increasing parts, in reverse
/// lexicographic order (L_{−1}^n first).
pub fn partitions(n: u32) -> Vec<Word> {
    fn rec(n: u32, max: u32, cur: &mut Word, out: &mut Vec<Word>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=max.min(n)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(n, n, &mut vec![], &mut out);
    out.reverse();
    out
}

/// Memoizing reducer for a fixed (c, h) and truncation level.
pub struct Reducer<S: Coefficient> {
    c: S,
    h: S,
    max_level: u32,
    cache: HashMap<(i32, Word), Vec<(Word, S)>>,
}

fn accumulate<S: Coefficient>(acc: &mut BTreeMap<Word, S>, terms: &[(Word, S)], scale: &S) {
    for (w, k) in terms {
        let v = k.clone() * scale.clone();
        match acc.get_mut(w) {
            Some(slot) => *slot = slot.clone() + v,
            None => {
                acc.insert(w.clone(), v);
            }
        }
    }
}

impl<S: Coefficient> Reducer<S> {
    pub fn new(c: S, h: S, max_level: u32) -> Self {
        Self { c, h, max_level, cache: HashMap::new() }
    }

    /// L_n applied to a word; components above the truncation level are
    /// dropped.
    pub fn apply(&mut self, n: i32, w: &Word) -> Vec<(Word, S)> {
        if n < 0 && level(w) as i64 - n as i64 > self.max_level as i64 {
            return vec![];
        }
        let key = (n, w.clone());
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let out = self.compute(n, w);
        self.cache.insert(key, out.clone());
        out
    }

    fn compute(&mut self, n: i32, w: &Word) -> Vec<(Word, S)> {
        if n == 0 {
            return vec![(w.clone(), self.h.clone() + S::int(level(w) as i64))];
        }
        if w.is_empty() {
            return if n > 0 { vec![] } else { vec![(vec![(-n) as u32], S::one())] };
        }
        let a = w[0];
        let rest: Word = w[1..].to_vec();
        let mut acc: BTreeMap<Word, S> = BTreeMap::new();
        if n < 0 {
            let m = (-n) as u32;
            if m >= a {
                let mut nw = Vec::with_capacity(w.len() + 1);
                nw.push(m);
                nw.extend_from_slice(w);
                return vec![(nw, S::one())];
            }
            // L_{−m} L_{−a} = L_{−a} L_{−m} + (a − m) L_{−(m+a)}
            for (x, k) in self.apply(n, &rest) {
                let t = self.apply(-(a as i32), &x);
                accumulate(&mut acc, &t, &k);
            }
            let t = self.apply(-((m + a) as i32), &rest);
            accumulate(&mut acc, &t, &S::int(a as i64 - m as i64));
        } else {
            // L_n L_{−a} = L_{−a} L_n + (n + a) L_{n−a} + δ_{n,a} c (n³ − n)/12
            for (x, k) in self.apply(n, &rest) {
                let t = self.apply(-(a as i32), &x);
                accumulate(&mut acc, &t, &k);
            }
            let t = self.apply(n - a as i32, &rest);
            accumulate(&mut acc, &t, &S::int(n as i64 + a as i64));
            if n as u32 == a {
                let n3 = (n as i64).pow(3) - n as i64;
                let central = self.c.clone() * S::ratio(n3, 12);
                accumulate(&mut acc, &[(rest.clone(), S::one())], &central);
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// ⟨L_{−μ}v, L_{−ν}v⟩: vacuum coefficient of L_{μ_k}⋯L_{μ_1}L_{−ν}v.
    pub fn pairing(&mut self, mu: &Word, nu: &Word) -> S {
        if level(mu) != level(nu) {
            return S::zero();
        }
        let mut state: Vec<(Word, S)> = vec![(nu.clone(), S::one())];
        for &p in mu {
            let mut acc: BTreeMap<Word, S> = BTreeMap::new();
            for (w, k) in &state {
                let t = self.apply(p as i32, w);
                accumulate(&mut acc, &t, k);
            }
            state = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        state.into_iter().find(|(w, _)| w.is_empty()).map(|x| x.1).unwrap_or_else(S::zero)
    }
}
