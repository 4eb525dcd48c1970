//! Truncated formal power series in `q` with exact rational coefficients.
//!
//! Exponents live on a fractional lattice `(1/lattice)Z` (default denominator
//! 24, which covers the `q^{1/2}` of level-2 forms and the `q^{1/8}` of the
//! theta-null prefactor). A series carries a truncation order and is known
//! exactly for every exponent strictly below it. Values are immutable and all
//! operations are pure; truncation is tracked pessimistically, so a result
//! never claims coefficients it cannot certify.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::Error;
use crate::rational::{parse_rat, rat_str, Rat};
use crate::Result;

/// Default exponent lattice denominator.
pub const DEFAULT_LATTICE: i64 = 24;

/// Default truncation order (in units of `q`).
pub const DEFAULT_ORDER: i64 = 10;

/// A truncated formal q-series with exact rational coefficients.
///
/// Internally every exponent is stored as an integer numerator over the
/// lattice denominator; zero coefficients are never stored, so equality of
/// series on the same lattice is structural equality of the coefficient maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    lattice: i64,
    /// exponent numerator (over `lattice`) -> coefficient
    coeffs: BTreeMap<i64, Rat>,
    /// truncation order numerator (over `lattice`)
    order: i64,
}

/// One infinite family of factors `prod_{j>=1} (1 + sign q^{shift + step j})^exponent`
/// for [`QSeries::product_expand`].
#[derive(Debug, Clone)]
pub struct ProductFamily {
    pub shift: Rat,
    pub step: Rat,
    pub sign: i64,
    pub exponent: i64,
}

impl ProductFamily {
    pub fn new(shift: Rat, step: Rat, sign: i64, exponent: i64) -> Self {
        ProductFamily { shift, step, sign, exponent }
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Scales a rational onto an integer lattice: returns `r * lattice` if that is
/// an integer.
fn on_lattice(r: &Rat, lattice: i64) -> Option<i64> {
    let scaled = r * Rat::from_integer(lattice.into());
    if scaled.denom().is_one() {
        // exponents in scope are tiny; i64 is ample
        let n = scaled.numer();
        i64::try_from(n.clone()).ok()
    } else {
        None
    }
}

impl QSeries {
    /// The zero series, known below `order`.
    pub fn zero(order: &Rat) -> Self {
        Self::with_lattice(DEFAULT_LATTICE, order)
    }

    fn with_lattice(lattice: i64, order: &Rat) -> Self {
        let lattice = lcm(lattice, i64::try_from(order.denom().clone()).expect("order denominator"));
        let order = on_lattice(order, lattice).expect("order on lattice after promotion");
        QSeries { lattice, coeffs: BTreeMap::new(), order }
    }

    /// The constant series `1`.
    pub fn one(order: &Rat) -> Self {
        Self::constant(&Rat::one(), order)
    }

    /// A constant series.
    pub fn constant(c: &Rat, order: &Rat) -> Self {
        Self::monomial(c, &Rat::zero(), order)
    }

    /// The single term `c q^exp`, on the smallest lattice containing `exp`.
    pub fn monomial(c: &Rat, exp: &Rat, order: &Rat) -> Self {
        let lattice = lcm(
            DEFAULT_LATTICE,
            i64::try_from(exp.denom().clone()).expect("exponent denominator"),
        );
        let mut s = Self::with_lattice(lattice, order);
        let key = on_lattice(exp, s.lattice).expect("exponent on lattice");
        assert!(key >= 0, "negative exponents are out of scope");
        if !c.is_zero() && key < s.order {
            s.coeffs.insert(key, c.clone());
        }
        s
    }

    /// Truncation order as an exact rational.
    pub fn order(&self) -> Rat {
        Rat::new(self.order.into(), self.lattice.into())
    }

    /// Lattice denominator.
    pub fn lattice(&self) -> i64 {
        self.lattice
    }

    /// True iff no nonzero coefficient is stored.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True iff every stored exponent is an integer.
    pub fn has_integer_support(&self) -> bool {
        self.coeffs.keys().all(|k| k % self.lattice == 0)
    }

    /// Iterates `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rat, &Rat)> + '_ {
        self.coeffs
            .iter()
            .map(|(k, c)| (Rat::new((*k).into(), self.lattice.into()), c))
    }

    /// Lowest stored exponent numerator, or the order for the zero series.
    fn lowest_key(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.order)
    }

    /// Re-expresses the series on a finer lattice (a multiple of the current one).
    fn promoted(&self, lattice: i64) -> Self {
        debug_assert_eq!(lattice % self.lattice, 0);
        if lattice == self.lattice {
            return self.clone();
        }
        let scale = lattice / self.lattice;
        QSeries {
            lattice,
            coeffs: self.coeffs.iter().map(|(k, c)| (k * scale, c.clone())).collect(),
            order: self.order * scale,
        }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let lattice = lcm(a.lattice, b.lattice);
        (a.promoted(lattice), b.promoted(lattice))
    }

    fn insert(&mut self, key: i64, c: Rat) {
        if key >= self.order || c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(key).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    /// Computes `self + scalar * other`.
    pub fn add_scaled(&self, other: &Self, scalar: &Rat) -> Self {
        let (a, b) = Self::common(self, other);
        let order = a.order.min(b.order);
        let mut out = QSeries { lattice: a.lattice, coeffs: BTreeMap::new(), order };
        for (k, c) in &a.coeffs {
            out.insert(*k, c.clone());
        }
        for (k, c) in &b.coeffs {
            out.insert(*k, c * scalar);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, &Rat::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, &-Rat::one())
    }

    pub fn scale(&self, scalar: &Rat) -> Self {
        let mut out = QSeries { lattice: self.lattice, coeffs: BTreeMap::new(), order: self.order };
        if scalar.is_zero() {
            return out;
        }
        for (k, c) in &self.coeffs {
            out.coeffs.insert(*k, c * scalar);
        }
        out
    }

    /// Cauchy product. The result is known below
    /// `min(ord(a) + low(b), ord(b) + low(a))`: the unknown tail of one factor
    /// first contaminates the product at its order plus the other factor's
    /// lowest exponent.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let order = (a.order + b.lowest_key()).min(b.order + a.lowest_key());
        let mut out = QSeries { lattice: a.lattice, coeffs: BTreeMap::new(), order };
        for (ka, ca) in &a.coeffs {
            for (kb, cb) in &b.coeffs {
                let k = ka + kb;
                if k >= order {
                    break;
                }
                out.insert(k, ca * cb);
            }
        }
        out
    }

    /// Multiplies by the monomial `q^exp` (exp >= 0), keeping the lattice.
    pub fn shift(&self, exp: &Rat) -> Self {
        let lattice = lcm(
            self.lattice,
            i64::try_from(exp.denom().clone()).expect("shift denominator"),
        );
        let s = self.promoted(lattice);
        let d = on_lattice(exp, lattice).expect("shift on lattice");
        assert!(d >= 0);
        QSeries {
            lattice,
            coeffs: s.coeffs.iter().map(|(k, c)| (k + d, c.clone())).collect(),
            order: s.order + d,
        }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inv(&self) -> Result<Self> {
        let a0 = self.coeffs.get(&0).cloned().unwrap_or_else(Rat::zero);
        if a0.is_zero() {
            return Err(Error::NonInvertible);
        }
        let n = usize::try_from(self.order.max(0)).expect("order fits usize");
        // dense back-substitution: b_k = -(sum_{0<j<=k} a_j b_{k-j}) / a_0
        let mut dense_a = vec![Rat::zero(); n];
        for (k, c) in &self.coeffs {
            if *k >= 0 && (*k as usize) < n {
                dense_a[*k as usize] = c.clone();
            }
        }
        let mut dense_b = vec![Rat::zero(); n];
        if n > 0 {
            dense_b[0] = a0.recip();
        }
        for k in 1..n {
            let mut acc = Rat::zero();
            for j in 1..=k {
                if !dense_a[j].is_zero() && !dense_b[k - j].is_zero() {
                    acc += &dense_a[j] * &dense_b[k - j];
                }
            }
            if !acc.is_zero() {
                dense_b[k] = -(acc / &a0);
            }
        }
        let mut out = QSeries { lattice: self.lattice, coeffs: BTreeMap::new(), order: self.order };
        for (k, c) in dense_b.into_iter().enumerate() {
            if !c.is_zero() {
                out.coeffs.insert(k as i64, c);
            }
        }
        Ok(out)
    }

    /// Integer power; a negative power requires a nonzero constant term.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            let inv = self.inv().map_err(|_| Error::NegativePowerOfNonUnit)?;
            return inv.pow(-e);
        }
        let mut result = QSeries {
            lattice: self.lattice,
            coeffs: BTreeMap::new(),
            order: self.order,
        };
        result.coeffs.insert(0, Rat::one());
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// The coefficient at exponent `e`, which must lie strictly below the
    /// truncation order. An absent exponent below the order is exactly zero.
    pub fn coefficient_at(&self, e: &Rat) -> Result<Rat> {
        if e * Rat::from_integer(self.lattice.into()) >= Rat::from_integer(self.order.into()) {
            return Err(Error::OutOfTruncation {
                exponent: rat_str(e),
                order: rat_str(&self.order()),
            });
        }
        match on_lattice(e, self.lattice) {
            Some(k) => Ok(self.coeffs.get(&k).cloned().unwrap_or_else(Rat::zero)),
            None => Ok(Rat::zero()), // off-lattice exponents below the order are exactly zero
        }
    }

    /// Expands `prod_families prod_{j>=1} (1 + sign q^{shift+step j})^exponent`
    /// truncated at `order`. Only factors whose exponent `shift + step j` lies
    /// below the order contribute.
    pub fn product_expand(families: &[ProductFamily], order: &Rat) -> Result<Self> {
        let mut acc = Self::one(order);
        for fam in families {
            let mut j: i64 = 1;
            loop {
                let e = &fam.shift + &fam.step * Rat::from_integer(j.into());
                if !e.is_positive() {
                    return Err(Error::DivergentProduct(rat_str(&e)));
                }
                if &e >= order {
                    break;
                }
                let sign = if fam.sign >= 0 { Rat::one() } else { -Rat::one() };
                let factor = Self::one(order).add_scaled(&Self::monomial(&Rat::one(), &e, order), &sign);
                acc = acc.mul(&factor.pow(fam.exponent)?);
                j += 1;
            }
        }
        Ok(acc)
    }

    /// JSON rendering per the documented schema.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(e, c)| json!([rat_str(&e), rat_str(c)]))
            .collect();
        json!({
            "lattice": self.lattice,
            "order": rat_str(&self.order()),
            "terms": terms,
        })
    }

    /// Parses the JSON rendering produced by [`QSeries::to_json`].
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::BadSeriesDocument(m.to_string());
        let order = v
            .get("order")
            .and_then(Value::as_str)
            .and_then(parse_rat)
            .ok_or_else(|| bad("missing or malformed \"order\""))?;
        let lattice = v.get("lattice").and_then(Value::as_i64).unwrap_or(DEFAULT_LATTICE);
        let mut s = Self::with_lattice(lattice, &order);
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"terms\" array"))?;
        for t in terms {
            let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("term is not a pair"))?;
            let e = pair[0]
                .as_str()
                .and_then(parse_rat)
                .ok_or_else(|| bad("malformed exponent"))?;
            let c = pair[1]
                .as_str()
                .and_then(parse_rat)
                .ok_or_else(|| bad("malformed coefficient"))?;
            let lattice = lcm(
                s.lattice,
                i64::try_from(e.denom().clone()).map_err(|_| bad("exponent denominator too large"))?,
            );
            s = s.promoted(lattice);
            let key = on_lattice(&e, s.lattice).expect("exponent on lattice after promotion");
            if key < 0 {
                return Err(bad("negative exponent"));
            }
            s.insert(key, c);
        }
        Ok(s)
    }
}

impl fmt::Display for QSeries {
    /// Renders e.g. `1 - 24q - 72q^2 - 96q^3 + O(q^10)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn q_power(e: &Rat) -> String {
            if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "q".to_string()
            } else if e.denom().is_one() {
                format!("q^{}", e.numer())
            } else {
                format!("q^{{{}/{}}}", e.numer(), e.denom())
            }
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let mag = c.abs();
            let sign_str = if first {
                if c.is_negative() { "-" } else { "" }
            } else if c.is_negative() {
                " - "
            } else {
                " + "
            };
            let qp = q_power(&e);
            let coeff_str = if mag.is_one() && !qp.is_empty() {
                String::new()
            } else if mag.denom().is_one() || qp.is_empty() {
                rat_str(&mag)
            } else {
                format!("{} ", rat_str(&mag))
            };
            write!(f, "{}{}{}", sign_str, coeff_str, qp)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        let ord = self.order();
        write!(f, " + O({})", q_power(&ord))
    }
}
