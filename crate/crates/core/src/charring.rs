//! Graded ring of Pontryagin-class polynomials over a product of factors,
//! with the Hirzebruch characteristic classes and lambda-ring operations on
//! virtual bundles.
//!
//! A product manifold `N_1 x ... x N_s` gets one set of Pontryagin variables
//! per factor, `p_j` of degree `4j`, truncated per factor at that factor's
//! dimension: integration over a product kills any term that is not of
//! exactly top degree in every factor, so the per-factor quotient is the right
//! ring to compute in. Virtual bundles are represented by rank plus Chern
//! character only; everything in scope is a characteristic number.
//!
//! The multiplicative-sequence coefficients of the A-hat and L-hat classes are
//! generated from their defining power series (`(x/2)/sinh(x/2)` and
//! `x/tanh(x/2)`), never hardcoded; the dimension-8 closed forms serve as
//! golden values in the tests.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::qseries::QSeries;
use crate::rational::{rat, Rat};
use crate::Result;

/// Dimensions of the factors of a product manifold; each divisible by 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorShape(pub Vec<u32>);

impl FactorShape {
    pub fn new(dims: Vec<u32>) -> Self {
        assert!(!dims.is_empty(), "shape needs at least one factor");
        for d in &dims {
            assert!(*d >= 4 && d % 4 == 0, "factor dimension must be a positive multiple of 4");
        }
        FactorShape(dims)
    }

    pub fn total_dim(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn num_factors(&self) -> usize {
        self.0.len()
    }
}

/// A multi-monomial: per factor, a multiset of Pontryagin indices stored as a
/// partition in descending order. The empty partition everywhere is `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial(pub Vec<Vec<u32>>);

impl Monomial {
    fn one(num_factors: usize) -> Self {
        Monomial(vec![Vec::new(); num_factors])
    }

    /// `4 * sum of indices` of the factor-i part.
    fn factor_degree(&self, i: usize) -> u32 {
        4 * self.0[i].iter().sum::<u32>()
    }

    fn total_degree(&self) -> u32 {
        (0..self.0.len()).map(|i| self.factor_degree(i)).sum()
    }

    fn mul(&self, other: &Self) -> Self {
        let parts = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let mut m: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
                m.sort_unstable_by(|x, y| y.cmp(x));
                m
            })
            .collect();
        Monomial(parts)
    }
}

/// Renders a single-factor partition as `p1^2*p2` style text; empty is `1`.
pub fn partition_key(part: &[u32]) -> String {
    if part.is_empty() {
        return "1".to_string();
    }
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for i in part {
        *counts.entry(*i).or_insert(0) += 1;
    }
    counts
        .iter()
        .map(|(i, e)| if *e == 1 { format!("p{i}") } else { format!("p{i}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Parses `p1^2*p2` style text back into a descending partition.
pub fn parse_partition_key(s: &str) -> Option<Vec<u32>> {
    let s = s.trim();
    if s == "1" {
        return Some(Vec::new());
    }
    let mut part = Vec::new();
    for piece in s.split('*') {
        let piece = piece.trim().strip_prefix('p')?;
        let (idx, exp) = match piece.split_once('^') {
            Some((i, e)) => (i.parse::<u32>().ok()?, e.parse::<u32>().ok()?),
            None => (piece.parse::<u32>().ok()?, 1),
        };
        if idx == 0 || exp == 0 {
            return None;
        }
        for _ in 0..exp {
            part.push(idx);
        }
    }
    part.sort_unstable_by(|x, y| y.cmp(x));
    Some(part)
}

/// A graded truncated polynomial in the per-factor Pontryagin variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PClass {
    shape: FactorShape,
    terms: BTreeMap<Monomial, Rat>,
}

impl PClass {
    pub fn zero(shape: &FactorShape) -> Self {
        PClass { shape: shape.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(shape: &FactorShape, c: &Rat) -> Self {
        let mut p = Self::zero(shape);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(shape.num_factors()), c.clone());
        }
        p
    }

    pub fn one(shape: &FactorShape) -> Self {
        Self::constant(shape, &Rat::one())
    }

    /// The variable `p_index` of factor `factor`.
    pub fn variable(shape: &FactorShape, factor: usize, index: u32) -> Self {
        assert!(4 * index <= shape.0[factor], "variable exceeds factor dimension");
        let mut m = Monomial::one(shape.num_factors());
        m.0[factor] = vec![index];
        let mut p = Self::zero(shape);
        p.terms.insert(m, Rat::one());
        p
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Degree-0 coefficient.
    pub fn constant_term(&self) -> Rat {
        self.coefficient(&Monomial::one(self.shape.num_factors()))
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape.0, other.shape.0
            )));
        }
        Ok(())
    }

    fn insert(&mut self, m: Monomial, c: Rat) {
        // per-factor dimension truncation
        for i in 0..self.shape.num_factors() {
            if m.factor_degree(i) > self.shape.0[i] {
                return;
            }
        }
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add_scaled(&self, other: &Self, scalar: &Rat) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c * scalar);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &Rat::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &-Rat::one())
    }

    pub fn scale(&self, scalar: &Rat) -> Self {
        let mut out = Self::zero(&self.shape);
        if scalar.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * scalar);
        }
        out
    }

    /// Cup product; monomials exceeding any factor's dimension are dropped.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = Self::zero(&self.shape);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(&self.shape);
        for _ in 0..e {
            out = out.mul(self).expect("same shape");
        }
        out
    }

    /// Embeds a single-factor polynomial into slot `factor` of `shape`.
    pub fn embed(single: &PClass, shape: &FactorShape, factor: usize) -> Self {
        assert_eq!(single.shape.num_factors(), 1);
        assert_eq!(single.shape.0[0], shape.0[factor]);
        let mut out = Self::zero(shape);
        for (m, c) in &single.terms {
            let mut big = Monomial::one(shape.num_factors());
            big.0[factor] = m.0[0].clone();
            out.insert(big, c.clone());
        }
        out
    }

    /// Keeps only the total-degree-`d` part.
    pub fn graded_part(&self, d: u32) -> Self {
        let mut out = Self::zero(&self.shape);
        for (m, c) in &self.terms {
            if m.total_degree() == d {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for PClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_empty())
                    .map(|(i, p)| {
                        if self.shape.num_factors() == 1 {
                            partition_key(p)
                        } else {
                            format!("{}({})", partition_key(p), i + 1)
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    crate::rational::rat_str(c)
                } else {
                    format!("{} {}", crate::rational::rat_str(c), vars.join(" "))
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

/// Newton's identities: power sums `s_1..s_max` of the squared Chern roots of
/// one factor, as polynomials in that factor's Pontryagin variables.
fn power_sums(shape: &FactorShape, max: u32) -> Vec<PClass> {
    assert_eq!(shape.num_factors(), 1);
    let gens = shape.0[0] / 4;
    let e = |j: u32| -> PClass {
        if j == 0 {
            PClass::one(shape)
        } else if j <= gens {
            PClass::variable(shape, 0, j)
        } else {
            PClass::zero(shape)
        }
    };
    let mut s: Vec<PClass> = Vec::with_capacity(max as usize + 1);
    s.push(PClass::constant(shape, &rat(gens as i64))); // s_0 = number of variables, unused below
    for k in 1..=max {
        // s_k = sum_{i=1}^{k-1} (-1)^{i-1} e_i s_{k-i} + (-1)^{k-1} k e_k
        let mut acc = e(k).scale(&if k % 2 == 1 { rat(k as i64) } else { rat(-(k as i64)) });
        for i in 1..k {
            let sign = if i % 2 == 1 { Rat::one() } else { -Rat::one() };
            let term = e(i).mul(&s[(k - i) as usize]).expect("same shape");
            acc = acc.add_scaled(&term, &sign).expect("same shape");
        }
        s.push(acc);
    }
    s
}

/// `exp` of a polynomial with zero constant term, exact because the series
/// terminates at the truncation degree.
fn exp_poly(p: &PClass) -> PClass {
    debug_assert!(p.constant_term().is_zero());
    let max_j = p.shape().total_dim() / 4;
    let mut acc = PClass::one(p.shape());
    let mut power = PClass::one(p.shape());
    let mut factorial = Rat::one();
    for j in 1..=max_j {
        power = power.mul(p).expect("same shape");
        if power.is_zero() {
            break;
        }
        factorial *= rat(j as i64);
        acc = acc.add_scaled(&power, &factorial.recip()).expect("same shape");
    }
    acc
}

/// `log(1 + h)` coefficients of a unit u-series, as a u-series.
fn log_one_plus(h: &QSeries) -> QSeries {
    let order = h.order();
    let mut acc = QSeries::zero(&order);
    let mut power = QSeries::one(&order);
    let mut j: i64 = 1;
    loop {
        power = power.mul(h);
        if power.is_zero() || rat(j) >= order {
            break;
        }
        let sign = if j % 2 == 1 { Rat::one() } else { -Rat::one() };
        acc = acc.add_scaled(&power, &(sign / rat(j)));
        j += 1;
    }
    acc
}

/// Builds the multiplicative-sequence class of one factor from the per-root
/// series `g(u) = a_0 (1 + h(u))`, `u = x^2`: the class is
/// `a_0^{roots} exp(sum_k log(1+h)_k s_k)`.
fn multiplicative_class(shape: &FactorShape, g: &QSeries) -> PClass {
    assert_eq!(shape.num_factors(), 1);
    let gens = shape.0[0] / 4;
    let roots = shape.0[0] / 2;
    let a0 = g.coefficient_at(&rat(0)).expect("constant term of genus series");
    let h = g.scale(&a0.recip()).sub(&QSeries::one(&g.order()));
    let ell = log_one_plus(&h);
    let s = power_sums(shape, gens);
    let mut arg = PClass::zero(shape);
    for k in 1..=gens {
        let lk = ell.coefficient_at(&rat(k as i64)).expect("log coefficient");
        arg = arg.add_scaled(&s[k as usize], &lk).expect("same shape");
    }
    let mut a0_pow = Rat::one();
    for _ in 0..roots {
        a0_pow *= &a0;
    }
    exp_poly(&arg).scale(&a0_pow)
}

/// `sinh(x/2) / (x/2)` as a series in `u = x^2`.
fn sinhc_half(order: &Rat) -> QSeries {
    reciprocal_factorial_series(order, 1)
}

/// `cosh(x/2)` as a series in `u = x^2`.
fn cosh_half(order: &Rat) -> QSeries {
    reciprocal_factorial_series(order, 0)
}

/// `sum_k u^k / (4^k (2k + offset)!)`, normalized to constant term 1.
fn reciprocal_factorial_series(order: &Rat, offset: u32) -> QSeries {
    let mut acc = QSeries::zero(order);
    let mut k: i64 = 0;
    let mut denom = BigInt::one();
    // (2k + offset)! built incrementally
    for j in 1..=offset as i64 {
        denom *= BigInt::from(j);
    }
    let offset_fact = denom.clone();
    loop {
        if &rat(k) >= order {
            break;
        }
        let four_k = BigInt::from(4u32).pow(k as u32);
        let c = Rat::new(offset_fact.clone(), four_k * &denom);
        acc = acc.add(&QSeries::monomial(&c, &rat(k), order));
        denom *= BigInt::from(2 * k + 1 + offset as i64) * BigInt::from(2 * k + 2 + offset as i64);
        k += 1;
    }
    acc
}

/// Per-root series of the A-hat class: `(x/2) / sinh(x/2)` in `u = x^2`.
fn ahat_root_series(order: &Rat) -> QSeries {
    sinhc_half(order).inv().expect("unit series")
}

/// Per-root series of the L-hat class: `x / tanh(x/2) = 2 cosh(x/2) (x/2)/sinh(x/2)`.
fn lhat_root_series(order: &Rat) -> QSeries {
    cosh_half(order)
        .mul(&ahat_root_series(order))
        .scale(&rat(2))
}

fn single(dim: u32) -> FactorShape {
    FactorShape::new(vec![dim])
}

fn per_factor_product(shape: &FactorShape, factor_class: impl Fn(u32) -> PClass) -> PClass {
    let mut acc = PClass::one(shape);
    for (i, d) in shape.0.iter().enumerate() {
        let f = PClass::embed(&factor_class(*d), shape, i);
        acc = acc.mul(&f).expect("same shape");
    }
    acc
}

/// The A-hat class of the product, `prod_i A-hat(T N_i)`.
pub fn ahat_class(shape: &FactorShape) -> PClass {
    per_factor_product(shape, |d| {
        let order = rat((d / 4) as i64 + 1);
        multiplicative_class(&single(d), &ahat_root_series(&order))
    })
}

/// The L-hat class of the product, `prod_i L-hat(T N_i)`; the degree-0 term of
/// a dimension-2n factor is `2^n`.
pub fn lhat_class(shape: &FactorShape) -> PClass {
    per_factor_product(shape, |d| {
        let order = rat((d / 4) as i64 + 1);
        multiplicative_class(&single(d), &lhat_root_series(&order))
    })
}

/// A virtual bundle remembered as (rank, Chern character); the degree-0 term
/// of `ch` always equals the rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleChar {
    rank: i64,
    ch: PClass,
}

impl BundleChar {
    pub fn new(rank: i64, ch: PClass) -> Self {
        debug_assert_eq!(ch.constant_term(), rat(rank));
        BundleChar { rank, ch }
    }

    /// The rank-`r` trivial bundle.
    pub fn trivial(shape: &FactorShape, r: i64) -> Self {
        BundleChar { rank: r, ch: PClass::constant(shape, &rat(r)) }
    }

    pub fn rank(&self) -> i64 {
        self.rank
    }

    pub fn ch(&self) -> &PClass {
        &self.ch
    }

    pub fn shape(&self) -> &FactorShape {
        self.ch.shape()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(BundleChar { rank: self.rank + other.rank, ch: self.ch.add(&other.ch)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(BundleChar { rank: self.rank - other.rank, ch: self.ch.sub(&other.ch)? })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(BundleChar { rank: self.rank * other.rank, ch: self.ch.mul(&other.ch)? })
    }

    /// Integer multiple (virtual copies allowed).
    pub fn scale(&self, n: i64) -> Self {
        BundleChar { rank: self.rank * n, ch: self.ch.scale(&rat(n)) }
    }
}

/// `ch(T_C M) = sum_i ch(T_C N_i)`: rank is the total dimension, and each
/// factor contributes `dim + 2 sum_k s_k / (2k)!` in its own variables.
pub fn tangent_char(shape: &FactorShape) -> BundleChar {
    let mut ch = PClass::zero(shape);
    for (i, d) in shape.0.iter().enumerate() {
        let fshape = single(*d);
        let gens = d / 4;
        let s = power_sums(&fshape, gens);
        let mut f = PClass::constant(&fshape, &rat(*d as i64));
        let mut fact2k = BigInt::from(2u32); // (2k)! for k = 1
        for k in 1..=gens {
            let c = Rat::new(BigInt::from(2u32), fact2k.clone());
            f = f.add_scaled(&s[k as usize], &c).expect("same shape");
            fact2k *= BigInt::from(2 * k + 1) * BigInt::from(2 * k + 2);
        }
        ch = ch.add(&PClass::embed(&f, shape, i)).expect("same shape");
    }
    BundleChar { rank: shape.total_dim() as i64, ch }
}

/// Adams operation `psi^k`: rank unchanged, degree-4j component scaled by `k^{2j}`.
pub fn adams_operation(k: u32, v: &BundleChar) -> BundleChar {
    let mut ch = PClass::zero(v.shape());
    for (m, c) in v.ch.terms() {
        let j = m.total_degree() / 4;
        let scale = Rat::from_integer(BigInt::from(k).pow(2 * j));
        ch.insert(m.clone(), c * scale);
    }
    BundleChar { rank: v.rank, ch }
}

/// Which power operation to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    Exterior,
    Symmetric,
}

/// Exterior or symmetric power via the Newton-type recursions
/// `n ch(L^n v) = sum_{i=1}^{n} (-1)^{i-1} ch(L^{n-i} v) ch(psi^i v)` and
/// `n ch(S^n v) = sum_{i=1}^{n} ch(S^{n-i} v) ch(psi^i v)`; ranks follow the
/// same recursion through the degree-0 term.
pub fn power_operation(kind: PowerKind, n: u32, v: &BundleChar) -> BundleChar {
    let adams: Vec<BundleChar> = (1..=n.max(1)).map(|i| adams_operation(i, v)).collect();
    let mut powers: Vec<BundleChar> = vec![BundleChar::trivial(v.shape(), 1)];
    for m in 1..=n {
        let mut acc = PClass::zero(v.shape());
        for i in 1..=m {
            let sign = match kind {
                PowerKind::Symmetric => Rat::one(),
                PowerKind::Exterior => {
                    if i % 2 == 1 {
                        Rat::one()
                    } else {
                        -Rat::one()
                    }
                }
            };
            let term = powers[(m - i) as usize]
                .ch
                .mul(&adams[(i - 1) as usize].ch)
                .expect("same shape");
            acc = acc.add_scaled(&term, &sign).expect("same shape");
        }
        let ch = acc.scale(&rat(m as i64).recip());
        let rank_rat = ch.constant_term();
        assert!(rank_rat.denom().is_one(), "power operation rank must be integral");
        let rank = i64::try_from(rank_rat.numer().clone()).expect("rank fits i64");
        powers.push(BundleChar { rank, ch });
    }
    powers.swap_remove(n as usize)
}

/// Per-factor table of Pontryagin numbers: descending partition -> value.
pub type FactorTable = BTreeMap<Vec<u32>, Rat>;

/// Evaluates a class against the fundamental class of the product: only
/// monomials of exactly top degree in every factor contribute, each worth its
/// coefficient times the product of the factors' table entries.
pub fn integrate_top(c: &PClass, tables: &[FactorTable]) -> Result<Rat> {
    let shape = c.shape();
    assert_eq!(tables.len(), shape.num_factors(), "one table per factor");
    let mut acc = Rat::zero();
    for (m, coeff) in c.terms() {
        if (0..shape.num_factors()).any(|i| m.factor_degree(i) != shape.0[i]) {
            continue;
        }
        let mut value = coeff.clone();
        for (i, part) in m.0.iter().enumerate() {
            let entry = tables[i].get(part).ok_or_else(|| Error::MissingTableEntry {
                factor: i,
                monomial: partition_key(part),
            })?;
            value *= entry;
        }
        acc += value;
    }
    Ok(acc)
}
