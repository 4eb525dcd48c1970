//! Exact rational scalars.
//!
//! All coefficients in this crate are arbitrary-precision rationals kept in
//! lowest terms with positive denominator, which `num-rational` guarantees by
//! construction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The coefficient field: arbitrary-precision rational numbers.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n / d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses an exact rational from a string like `"-7/45"` or `"224"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rat::from_integer(n))
        }
    }
}

/// Renders a rational as `p/q`, or just `p` when the denominator is one.
pub fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True iff `r` is an integer divisible by `m`.
pub fn divisible_by(r: &Rat, m: i64) -> bool {
    r.denom().is_one() && (r.numer() % BigInt::from(m)).is_zero()
}

/// Remainder of an integer rational modulo `m`, normalized to `0..m`.
///
/// Panics if `r` is not an integer.
pub fn mod_m(r: &Rat, m: i64) -> i64 {
    assert!(r.denom().is_one(), "mod of a non-integer rational");
    let m_big = BigInt::from(m);
    let mut rem = r.numer() % &m_big;
    if rem.is_negative() {
        rem += &m_big;
    }
    let (_, digits) = rem.to_u64_digits();
    *digits.first().unwrap_or(&0) as i64
}
