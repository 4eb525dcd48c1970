//! q-expansions of the canonical virtual-bundle streams over a manifold and
//! the index-theoretic pairings built from them: Witten genus, the two
//! level-2 twisted series, twisted signatures and twisted Dirac indices.

use std::collections::BTreeMap;

use num_traits::One;

use crate::charring::{
    ahat_class, integrate_top, lhat_class, power_operation, tangent_char, BundleChar, FactorShape,
    PClass, PowerKind,
};
use crate::error::Error;
use crate::manifolds::ManifoldSpec;
use crate::qseries::QSeries;
use crate::rational::{rat, rat_str, Rat};
use crate::Result;

/// Streams live on the half-integer exponent lattice.
const STREAM_LATTICE: i64 = 2;

/// A q-series whose coefficients are virtual bundles (characters) over a
/// fixed factor shape. Exponents are nonnegative half-integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleStream {
    shape: FactorShape,
    /// exponent * STREAM_LATTICE -> coefficient bundle
    terms: BTreeMap<i64, BundleChar>,
    /// truncation order numerator over STREAM_LATTICE
    order: i64,
}

fn stream_key(e: &Rat) -> Option<i64> {
    let scaled = e * rat(STREAM_LATTICE);
    if scaled.denom().is_one() {
        i64::try_from(scaled.numer().clone()).ok()
    } else {
        None
    }
}

impl BundleStream {
    /// The constant stream `1`.
    pub fn one(shape: &FactorShape, order: &Rat) -> Self {
        let order = stream_key(order).expect("stream order must be a half-integer");
        let mut terms = BTreeMap::new();
        if order > 0 {
            terms.insert(0, BundleChar::trivial(shape, 1));
        }
        BundleStream { shape: shape.clone(), terms, order }
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn order(&self) -> Rat {
        Rat::new(self.order.into(), STREAM_LATTICE.into())
    }

    pub fn lattice(&self) -> i64 {
        STREAM_LATTICE
    }

    /// Iterates `(exponent, bundle)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rat, &BundleChar)> + '_ {
        self.terms
            .iter()
            .map(|(k, b)| (Rat::new((*k).into(), STREAM_LATTICE.into()), b))
    }

    /// The coefficient bundle at exponent `e`; zero bundle if absent, error
    /// at or above the truncation order.
    pub fn coefficient(&self, e: &Rat) -> Result<BundleChar> {
        let key = stream_key(e).ok_or_else(|| Error::OutOfTruncation {
            exponent: rat_str(e),
            order: rat_str(&self.order()),
        })?;
        if key >= self.order {
            return Err(Error::OutOfTruncation {
                exponent: rat_str(e),
                order: rat_str(&self.order()),
            });
        }
        Ok(self
            .terms
            .get(&key)
            .cloned()
            .unwrap_or_else(|| BundleChar::trivial(&self.shape, 0)))
    }

    fn insert(&mut self, key: i64, b: BundleChar) -> Result<()> {
        if key >= self.order {
            return Ok(());
        }
        let next = match self.terms.remove(&key) {
            Some(prev) => prev.add(&b)?,
            None => b,
        };
        if next.rank() != 0 || !next.ch().is_zero() {
            self.terms.insert(key, next);
        }
        Ok(())
    }

    /// Tensor product of streams (Cauchy product of the coefficient bundles).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(
                "stream factors have different shapes".into(),
            ));
        }
        let order = self.order.min(other.order);
        let mut out = BundleStream { shape: self.shape.clone(), terms: BTreeMap::new(), order };
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                if ka + kb >= order {
                    break;
                }
                out.insert(ka + kb, a.tensor(b)?)?;
            }
        }
        Ok(out)
    }

    /// Multiplies by a scalar q-series with integer coefficients.
    pub fn mul_scalar(&self, s: &QSeries) -> Result<Self> {
        let s_order = stream_key(&s.order()).ok_or_else(|| {
            Error::OutOfTruncation { exponent: rat_str(&s.order()), order: self.order().to_string() }
        })?;
        let order = self.order.min(s_order);
        let mut out = BundleStream { shape: self.shape.clone(), terms: BTreeMap::new(), order };
        for (e, c) in s.terms() {
            let ke = stream_key(&e).expect("scalar stream factor on half-integer lattice");
            assert!(c.denom().is_one(), "scalar stream factor must have integer coefficients");
            let n = i64::try_from(c.numer().clone()).expect("scalar coefficient fits i64");
            for (kb, b) in &self.terms {
                if ke + kb >= order {
                    break;
                }
                out.insert(ke + kb, b.scale(n))?;
            }
        }
        Ok(out)
    }
}

/// `sum_m sign^m ch(P^m V) q^{m e}` for the actual (non-virtual) bundle `V`.
fn power_sum_stream(
    kind: PowerKind,
    v: &BundleChar,
    sign: i64,
    exp: &Rat,
    order: &Rat,
) -> BundleStream {
    let mut s = BundleStream::one(v.shape(), order);
    let mut m: u32 = 1;
    while &(exp * rat(m as i64)) < order {
        let mut b = power_operation(kind, m, v);
        if sign < 0 && m % 2 == 1 {
            b = b.scale(-1);
        }
        let key = stream_key(&(exp * rat(m as i64))).expect("half-integer exponent");
        s.insert(key, b).expect("same shape");
        m += 1;
    }
    s
}

/// One tensor factor on the reduced tangent bundle `T~ = T - dim`:
/// `S_{q^e}(T~) = S_{q^e}(T) (1 - q^e)^d` and
/// `L_{s q^e}(T~) = L_{s q^e}(T) (1 + s q^e)^{-d}`.
fn reduced_factor_stream(
    kind: PowerKind,
    t: &BundleChar,
    sign: i64,
    exp: &Rat,
    order: &Rat,
) -> Result<BundleStream> {
    let d = t.shape().total_dim() as i64;
    let base = power_sum_stream(kind, t, sign, exp, order);
    let unit = QSeries::one(order).add_scaled(
        &QSeries::monomial(&Rat::one(), exp, order),
        &rat(sign),
    );
    let scalar = match kind {
        PowerKind::Symmetric => {
            // S_t(V - d) = S_t(V) (1 - t)^d
            let m = QSeries::one(order).add_scaled(
                &QSeries::monomial(&Rat::one(), exp, order),
                &rat(-sign),
            );
            m.pow(d)?
        }
        PowerKind::Exterior => unit.pow(-d)?,
    };
    base.mul_scalar(&scalar)
}

/// `Theta = tensor_{n >= 1} S_{q^n}(T~)`, integer exponents.
pub fn theta_stream(shape: &FactorShape, order: &Rat) -> Result<BundleStream> {
    let t = tangent_char(shape);
    let mut acc = BundleStream::one(shape, order);
    let mut n = 1i64;
    while &rat(n) < order {
        acc = acc.mul(&reduced_factor_stream(PowerKind::Symmetric, &t, 1, &rat(n), order)?)?;
        n += 1;
    }
    Ok(acc)
}

/// Which of the two level-2 stream families to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiuWangKind {
    Theta1,
    Theta2,
}

/// The level-2 streams at parameters `(a, b)`; only `(0, 1)` and `(1, 0)`
/// are implemented, with `V = TM`.
pub fn liu_wang_stream(
    which: LiuWangKind,
    a: i64,
    b: i64,
    shape: &FactorShape,
    order: &Rat,
) -> Result<BundleStream> {
    if !matches!((a, b), (0, 1) | (1, 0)) {
        return Err(Error::UnsupportedLiuWang(a, b));
    }
    let t = tangent_char(shape);
    let mut acc = theta_stream(shape, order)?;
    // exterior factors on the integer lattice q^m
    let integer_ext = match (which, a, b) {
        (LiuWangKind::Theta1, 1, 0) | (LiuWangKind::Theta2, 0, 1) => true,
        _ => false,
    };
    if integer_ext {
        let mut m = 1i64;
        while &rat(m) < order {
            acc = acc.mul(&reduced_factor_stream(PowerKind::Exterior, &t, 1, &rat(m), order)?)?;
            m += 1;
        }
    }
    // exterior factors on the half-integer lattice q^{r - 1/2}, signed per branch
    let half_signs: &[i64] = match (which, a, b) {
        (LiuWangKind::Theta1, 0, 1) => &[1, -1],
        (LiuWangKind::Theta2, 0, 1) => &[1],
        (LiuWangKind::Theta2, 1, 0) => &[-1],
        (LiuWangKind::Theta1, 1, 0) => &[],
        _ => unreachable!(),
    };
    for &sign in half_signs {
        let mut r = 1i64;
        loop {
            let e = rat(2 * r - 1) / rat(2);
            if &e >= order {
                break;
            }
            acc = acc.mul(&reduced_factor_stream(PowerKind::Exterior, &t, sign, &e, order)?)?;
            r += 1;
        }
    }
    Ok(acc)
}

/// Which multiplicative class weights the pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightClass {
    Ahat,
    Lhat,
}

fn weight_pclass(w: WeightClass, shape: &FactorShape) -> PClass {
    match w {
        WeightClass::Ahat => ahat_class(shape),
        WeightClass::Lhat => lhat_class(shape),
    }
}

/// The characteristic number `integral of class * ch(v)` over `m`.
pub fn pairing_number(w: WeightClass, m: &ManifoldSpec, v: &BundleChar) -> Result<Rat> {
    let shape = m.shape();
    if v.shape() != &shape {
        return Err(Error::ShapeMismatch("twist bundle shape does not match manifold".into()));
    }
    let c = weight_pclass(w, &shape).mul(v.ch())?;
    integrate_top(&c, &m.tables())
}

/// `sum_e q^e integral of class * ch(stream[e])` as an exact q-series.
pub fn genus_pairing(w: WeightClass, stream: &BundleStream, m: &ManifoldSpec) -> Result<QSeries> {
    let shape = m.shape();
    if stream.shape() != &shape {
        return Err(Error::ShapeMismatch("stream shape does not match manifold".into()));
    }
    let class = weight_pclass(w, &shape);
    let tables = m.tables();
    let order = stream.order();
    let mut out = QSeries::zero(&order);
    for (e, b) in stream.terms() {
        let value = integrate_top(&class.mul(b.ch())?, &tables)?;
        out = out.add(&QSeries::monomial(&value, &e, &order));
    }
    Ok(out)
}

/// Witten genus `integral of Ahat * ch(Theta)` through `order`.
pub fn witten_genus(m: &ManifoldSpec, order: &Rat) -> Result<QSeries> {
    let stream = theta_stream(&m.shape(), order)?;
    genus_pairing(WeightClass::Ahat, &stream, m)
}

/// Parses the twist mini-language over a shape: signed sums of terms
/// `[integer][*]{1, T, L2T, S2T, TxT}` or bare integers, e.g. "L2T-47T+900".
pub fn parse_twist(expr: &str, shape: &FactorShape) -> Result<BundleChar> {
    let src: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::BadTwist("empty expression".into()));
    }
    let bad = || Error::BadTwist(expr.to_string());
    let mut acc = BundleChar::trivial(shape, 0);
    let mut rest = src.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let sign = if let Some(r) = rest.strip_prefix('+') {
            rest = r;
            1
        } else if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            -1
        } else if first {
            1
        } else {
            return Err(bad());
        };
        first = false;
        let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        rest = &rest[digits.len()..];
        rest = rest.strip_prefix('*').unwrap_or(rest);
        let symbol = ["L2T", "S2T", "TxT", "T", "1"]
            .iter()
            .find(|s| rest.starts_with(**s));
        let base = match symbol {
            Some(s) => {
                rest = &rest[s.len()..];
                twist_symbol(s, shape)?
            }
            None => {
                if digits.is_empty() {
                    return Err(bad());
                }
                BundleChar::trivial(shape, 1)
            }
        };
        let coeff: i64 = if digits.is_empty() {
            1
        } else {
            digits.parse().map_err(|_| bad())?
        };
        acc = acc.add(&base.scale(sign * coeff))?;
    }
    Ok(acc)
}

fn twist_symbol(sym: &str, shape: &FactorShape) -> Result<BundleChar> {
    let t = || tangent_char(shape);
    Ok(match sym {
        "1" => BundleChar::trivial(shape, 1),
        "T" => t(),
        "L2T" => power_operation(PowerKind::Exterior, 2, &t()),
        "S2T" => power_operation(PowerKind::Symmetric, 2, &t()),
        "TxT" => t().tensor(&t())?,
        _ => return Err(Error::BadTwist(sym.to_string())),
    })
}

/// `Sig(M, V) = integral of Lhat * ch(V)` with `V` given by a twist expression.
pub fn twisted_signature(m: &ManifoldSpec, twist: &str) -> Result<Rat> {
    let v = parse_twist(twist, &m.shape())?;
    pairing_number(WeightClass::Lhat, m, &v)
}

/// `Ind(D x V) = integral of Ahat * ch(V)` with `V` given by a twist expression.
pub fn dirac_index(m: &ManifoldSpec, twist: &str) -> Result<Rat> {
    let v = parse_twist(twist, &m.shape())?;
    pairing_number(WeightClass::Ahat, m, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charring::adams_operation;
    use crate::manifolds::{b8_hp2_hp2, catalog_manifold, m08_cubed, CatalogName};
    use crate::modforms::eisenstein_series;

    fn shape8() -> FactorShape {
        FactorShape::new(vec![8])
    }

    // virtual bundle a*L2T + b*S2T + c*T + d as a character
    fn combo(shape: &FactorShape, a: i64, b: i64, c: i64, d: i64) -> BundleChar {
        let t = tangent_char(shape);
        power_operation(PowerKind::Exterior, 2, &t)
            .scale(a)
            .add(&power_operation(PowerKind::Symmetric, 2, &t).scale(b))
            .unwrap()
            .add(&t.scale(c))
            .unwrap()
            .add(&BundleChar::trivial(shape, d))
            .unwrap()
    }

    #[test]
    fn theta_stream_expansion() {
        let shape = FactorShape::new(vec![8, 8, 8]);
        let s = theta_stream(&shape, &rat(3)).unwrap();
        let t = tangent_char(&shape);
        assert_eq!(s.coefficient(&rat(0)).unwrap(), BundleChar::trivial(&shape, 1));
        assert_eq!(
            s.coefficient(&rat(1)).unwrap(),
            t.add(&BundleChar::trivial(&shape, -24)).unwrap()
        );
        assert_eq!(s.coefficient(&rat(2)).unwrap(), combo(&shape, 0, 1, -23, 252));
        // half-integer coefficients are zero
        assert!(s.coefficient(&ratio_half(1)).unwrap().ch().is_zero());
    }

    fn ratio_half(n: i64) -> Rat {
        rat(n) / rat(2)
    }

    #[test]
    fn liu_wang_expansions() {
        let shape = FactorShape::new(vec![8, 8, 8]);
        let order = rat(2);
        let t21 = liu_wang_stream(LiuWangKind::Theta2, 0, 1, &shape, &order).unwrap();
        let t = tangent_char(&shape);
        assert_eq!(
            t21.coefficient(&ratio_half(1)).unwrap(),
            t.add(&BundleChar::trivial(&shape, -24)).unwrap()
        );
        assert_eq!(t21.coefficient(&rat(1)).unwrap(), combo(&shape, 1, 0, -22, 252));

        let t11 = liu_wang_stream(LiuWangKind::Theta1, 0, 1, &shape, &order).unwrap();
        assert!(t11.coefficient(&ratio_half(1)).unwrap().ch().is_zero());
        assert_eq!(t11.coefficient(&rat(1)).unwrap(), combo(&shape, 1, -1, 1, 0));

        let t20 = liu_wang_stream(LiuWangKind::Theta2, 1, 0, &shape, &order).unwrap();
        assert_eq!(
            t20.coefficient(&ratio_half(1)).unwrap(),
            t.scale(-1).add(&BundleChar::trivial(&shape, 24)).unwrap()
        );
        assert_eq!(t20.coefficient(&rat(1)).unwrap(), combo(&shape, 1, 0, -23, 276));

        assert!(matches!(
            liu_wang_stream(LiuWangKind::Theta1, 1, 1, &shape, &order),
            Err(Error::UnsupportedLiuWang(1, 1))
        ));
    }

    #[test]
    fn witten_genus_m08() {
        let m = catalog_manifold(CatalogName::M08);
        let w = witten_genus(&m, &rat(5)).unwrap();
        let e4 = eisenstein_series(2, &rat(5)).unwrap().expansion;
        assert_eq!(w, e4.scale(&rat(-1)));
    }

    #[test]
    fn witten_genus_m08_cubed() {
        let m = m08_cubed();
        let w = witten_genus(&m, &rat(4)).unwrap();
        let e4 = eisenstein_series(2, &rat(4)).unwrap().expansion;
        assert_eq!(w, e4.pow(3).unwrap().scale(&rat(-1)));
    }

    #[test]
    fn twisted_signatures_catalog() {
        let hp2 = catalog_manifold(CatalogName::Hp2);
        assert_eq!(twisted_signature(&hp2, "L2T").unwrap(), rat(92));
        assert_eq!(twisted_signature(&hp2, "1").unwrap(), rat(1));
        assert_eq!(dirac_index(&hp2, "1").unwrap(), rat(0));
        let m08 = catalog_manifold(CatalogName::M08);
        assert_eq!(twisted_signature(&m08, "T").unwrap(), rat(-2048));
        let b8 = catalog_manifold(CatalogName::B8);
        assert_eq!(twisted_signature(&b8, "T").unwrap(), rat(2048));
        assert_eq!(twisted_signature(&b8_hp2_hp2(), "L2T").unwrap(), rat(14336));
    }

    #[test]
    fn dirac_indices() {
        assert_eq!(dirac_index(&m08_cubed(), "T").unwrap(), rat(-744));
        assert_eq!(dirac_index(&b8_hp2_hp2(), "T").unwrap(), rat(0));
    }

    #[test]
    fn twist_parser() {
        let shape = shape8();
        let v = parse_twist("L2T-47T+900", &shape).unwrap();
        let expect = combo(&shape, 1, 0, -47, 900);
        assert_eq!(v, expect);
        let v = parse_twist("TxT", &shape).unwrap();
        let t = tangent_char(&shape);
        assert_eq!(v, t.tensor(&t).unwrap());
        let v = parse_twist("2T - 3", &shape).unwrap();
        assert_eq!(v, combo(&shape, 0, 0, 2, -3));
        assert!(parse_twist("", &shape).is_err());
        assert!(parse_twist("Q", &shape).is_err());
        assert!(parse_twist("T T", &shape).is_err());
    }

    #[test]
    fn constant_term_is_signature() {
        let m = m08_cubed();
        let s = liu_wang_stream(LiuWangKind::Theta2, 0, 1, &m.shape(), &rat(1)).unwrap();
        let r2 = genus_pairing(WeightClass::Lhat, &s, &m).unwrap();
        assert_eq!(r2.coefficient_at(&rat(0)).unwrap(), rat(224 * 224 * 224));
    }

    #[test]
    fn stream_algebra_basics() {
        let shape = shape8();
        let order = rat(3);
        let one = BundleStream::one(&shape, &order);
        let t = tangent_char(&shape);
        let s = power_sum_stream(PowerKind::Symmetric, &t, 1, &Rat::one(), &order);
        assert_eq!(one.mul(&s).unwrap(), s);
        // psi^1 is the identity
        assert_eq!(adams_operation(1, &t), t);
        // out-of-truncation access fails
        assert!(s.coefficient(&rat(3)).is_err());
    }
}
