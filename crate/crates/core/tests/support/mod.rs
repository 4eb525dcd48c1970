//! Brute-force Chern-root oracle shared by the integration tests.
//!
//! A synthetic real bundle of rank 2k is modeled by formal roots
//! `{+x_1, -x_1, ..., +x_k, -x_k}`; characters of its exterior and symmetric
//! powers are computed literally as sums of exponentials over subsets and
//! multisets of roots, with polynomials truncated by total degree. Pontryagin
//! polynomials are compared after the substitution `p_j -> e_j(x^2)`.

// each test target uses a different subset of the oracle
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use qgenus_core::charring::{BundleChar, FactorShape, PClass};
use qgenus_core::rational::{rat, Rat};

/// Truncated polynomial in `nvars` formal root variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XPoly {
    nvars: usize,
    maxdeg: u32,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl XPoly {
    pub fn zero(nvars: usize, maxdeg: u32) -> Self {
        XPoly { nvars, maxdeg, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, maxdeg: u32, c: &Rat) -> Self {
        let mut p = Self::zero(nvars, maxdeg);
        p.insert(vec![0; nvars], c.clone());
        p
    }

    pub fn var(nvars: usize, maxdeg: u32, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = Self::zero(nvars, maxdeg);
        p.insert(m, Rat::one());
        p
    }

    fn insert(&mut self, m: Vec<u32>, c: Rat) {
        if c.is_zero() || m.iter().sum::<u32>() > self.maxdeg {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero(self.nvars, self.maxdeg);
        for (m, v) in &self.terms {
            out.insert(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars, self.maxdeg);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.insert(m, ca * cb);
            }
        }
        out
    }

    /// `exp` of a polynomial with zero constant term.
    pub fn exp(&self) -> Self {
        assert!(!self.terms.contains_key(&vec![0; self.nvars]));
        let mut out = Self::constant(self.nvars, self.maxdeg, &Rat::one());
        let mut power = Self::constant(self.nvars, self.maxdeg, &Rat::one());
        let mut factorial = Rat::one();
        for m in 1..=self.maxdeg as i64 {
            power = power.mul(self);
            factorial *= rat(m);
            out = out.add(&power.scale(&factorial.recip()));
        }
        out
    }
}

/// The `2k` signed roots of the synthetic rank-2k bundle.
fn roots(k: usize, maxdeg: u32) -> Vec<XPoly> {
    let mut out = Vec::new();
    for i in 0..k {
        let x = XPoly::var(k, maxdeg, i);
        out.push(x.clone());
        out.push(x.scale(&rat(-1)));
    }
    out
}

fn subsets(n: usize, total: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for i in start..total {
            prefix.push(i);
            go(i + 1, n - 1, total, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, total, &mut Vec::new(), &mut out);
    out
}

fn multisets(n: usize, total: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for i in start..total {
            prefix.push(i);
            go(i, n - 1, total, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, total, &mut Vec::new(), &mut out);
    out
}

fn sum_exp_over(selections: &[Vec<usize>], roots: &[XPoly], k: usize, maxdeg: u32) -> XPoly {
    let mut out = XPoly::zero(k, maxdeg);
    for sel in selections {
        let mut arg = XPoly::zero(k, maxdeg);
        for &i in sel {
            arg = arg.add(&roots[i]);
        }
        out = out.add(&arg.exp());
    }
    out
}

/// `ch` of the n-th exterior power: sum of `exp(sum of roots)` over n-subsets.
pub fn exterior_oracle(n: usize, k: usize, maxdeg: u32) -> XPoly {
    let roots = roots(k, maxdeg);
    sum_exp_over(&subsets(n, 2 * k), &roots, k, maxdeg)
}

/// `ch` of the n-th symmetric power: sum over n-multisets of roots.
pub fn symmetric_oracle(n: usize, k: usize, maxdeg: u32) -> XPoly {
    let roots = roots(k, maxdeg);
    sum_exp_over(&multisets(n, 2 * k), &roots, k, maxdeg)
}

/// `ch` of the Adams operation `psi^t`: roots scaled by `t`.
pub fn adams_oracle(t: i64, k: usize, maxdeg: u32) -> XPoly {
    let mut out = XPoly::zero(k, maxdeg);
    for r in roots(k, maxdeg) {
        out = out.add(&r.scale(&rat(t)).exp());
    }
    out
}

/// Elementary symmetric polynomial `e_j` of the squared variables.
fn elementary_of_squares(j: usize, k: usize, maxdeg: u32) -> XPoly {
    if j > k {
        return XPoly::zero(k, maxdeg);
    }
    let mut out = XPoly::zero(k, maxdeg);
    for sel in subsets(j, k) {
        let mut term = XPoly::constant(k, maxdeg, &Rat::one());
        for &i in &sel {
            let x = XPoly::var(k, maxdeg, i);
            term = term.mul(&x).mul(&x);
        }
        out = out.add(&term);
    }
    out
}

/// Evaluates a single-factor Pontryagin polynomial under `p_j -> e_j(x^2)`.
pub fn pclass_to_x(c: &PClass, k: usize, maxdeg: u32) -> XPoly {
    assert_eq!(c.shape().num_factors(), 1);
    let mut out = XPoly::zero(k, maxdeg);
    for (m, coeff) in c.terms() {
        let mut term = XPoly::constant(k, maxdeg, coeff);
        for &j in &m.0[0] {
            term = term.mul(&elementary_of_squares(j as usize, k, maxdeg));
        }
        out = out.add(&term);
    }
    out
}

/// The synthetic rank-2k bundle over a dimension-4k base: complexified
/// character `2k + s_1 + s_2/12` in power sums of the squared roots.
pub fn synthetic_bundle(k: usize) -> BundleChar {
    let shape = FactorShape::new(vec![4 * k as u32]);
    let p1 = PClass::variable(&shape, 0, 1);
    let p2 = if k >= 2 { PClass::variable(&shape, 0, 2) } else { PClass::zero(&shape) };
    // s_1 = p_1, s_2 = p_1^2 - 2 p_2
    let s2 = p1.mul(&p1).unwrap().add_scaled(&p2, &rat(-2)).unwrap();
    let ch = PClass::constant(&shape, &rat(2 * k as i64))
        .add(&p1)
        .unwrap()
        .add_scaled(&s2, &(rat(12).recip()))
        .unwrap();
    BundleChar::new(2 * k as i64, ch)
}

/// Degree cutoff matching the PClass truncation of the shape `[4k]`.
pub fn maxdeg_for(k: usize) -> u32 {
    2 * k as u32
}
