//! Catalog and algebra of example manifolds, given entirely by factor-wise
//! Pontryagin-number tables.
//!
//! A manifold here is exactly its table of Pontryagin numbers; realizability
//! as a smooth manifold is not checked. The string condition is proxied by
//! vanishing first-Pontryagin data on every factor plus an explicit flag (the
//! integral class `p_1/2` is invisible to rational data; catalog entries carry
//! the known ground truth).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::charring::{partition_key, parse_partition_key, FactorShape, FactorTable};
use crate::error::Error;
use crate::modforms::{eisenstein_series, ModularForm};
use crate::rational::{rat, Rat};
use crate::Result;

/// One factor of a product: dimension plus its top-degree Pontryagin numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub dim: u32,
    /// Descending partition of `dim/4` -> Pontryagin number.
    pub table: FactorTable,
    pub p1_vanishes: bool,
}

/// A product manifold described by per-factor Pontryagin-number tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifoldSpec {
    pub name: String,
    pub factors: Vec<Factor>,
    pub string_flag: bool,
}

/// All partitions of `n` in descending order (the top-degree monomials of a
/// dimension-4n factor).
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=max.min(n)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

impl Factor {
    /// A dimension-8 factor from its two top Pontryagin numbers.
    pub fn dim8(p1_sq: i64, p2: i64, p1_vanishes: bool) -> Self {
        let mut table = FactorTable::new();
        table.insert(vec![1, 1], rat(p1_sq));
        table.insert(vec![2], rat(p2));
        Factor { dim: 8, table, p1_vanishes }
    }

    fn validate(&self, index: usize) -> Result<()> {
        if self.dim < 4 || self.dim % 4 != 0 {
            return Err(Error::InvalidManifold(format!(
                "factor {index} has dimension {}, need a positive multiple of 4",
                self.dim
            )));
        }
        for part in partitions(self.dim / 4) {
            if !self.table.contains_key(&part) {
                return Err(Error::InvalidManifold(format!(
                    "factor {index} is missing top monomial {:?}",
                    partition_key(&part)
                )));
            }
        }
        if self.p1_vanishes {
            for (part, value) in &self.table {
                if part.contains(&1) && !value.is_zero() {
                    return Err(Error::InvalidManifold(format!(
                        "factor {index} claims p1 = 0 but {} is nonzero",
                        partition_key(part)
                    )));
                }
            }
        }
        Ok(())
    }
}

impl ManifoldSpec {
    pub fn new(name: impl Into<String>, factors: Vec<Factor>, string_flag: bool) -> Result<Self> {
        let spec = ManifoldSpec { name: name.into(), factors, string_flag };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::EmptyProduct);
        }
        for (i, f) in self.factors.iter().enumerate() {
            f.validate(i)?;
        }
        if self.string_flag && !self.factors.iter().all(|f| f.p1_vanishes) {
            return Err(Error::InvalidManifold(
                "string flag requires vanishing p1 data on every factor".into(),
            ));
        }
        Ok(())
    }

    pub fn total_dim(&self) -> u32 {
        self.factors.iter().map(|f| f.dim).sum()
    }

    pub fn shape(&self) -> FactorShape {
        FactorShape::new(self.factors.iter().map(|f| f.dim).collect())
    }

    pub fn tables(&self) -> Vec<FactorTable> {
        self.factors.iter().map(|f| f.table.clone()).collect()
    }

    /// JSON document per the manifold schema; integers are rendered as decimal
    /// strings.
    pub fn to_json(&self) -> Value {
        let factors: Vec<Value> = self
            .factors
            .iter()
            .map(|f| {
                let numbers: serde_json::Map<String, Value> = f
                    .table
                    .iter()
                    .map(|(part, v)| {
                        (partition_key(part), Value::String(v.numer().to_string()))
                    })
                    .collect();
                json!({
                    "dim": f.dim,
                    "p1_vanishes": f.p1_vanishes,
                    "numbers": numbers,
                })
            })
            .collect();
        json!({
            "name": self.name,
            "string": self.string_flag,
            "factors": factors,
        })
    }

    /// Parses and validates a manifold document.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: String| Error::InvalidManifold(m);
        let name = v
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing \"name\"".into()))?;
        let string_flag = v
            .get("string")
            .and_then(Value::as_bool)
            .ok_or_else(|| bad("missing \"string\"".into()))?;
        let factors_json = v
            .get("factors")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"factors\"".into()))?;
        let mut factors = Vec::new();
        for (i, fv) in factors_json.iter().enumerate() {
            let dim = fv
                .get("dim")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad(format!("factor {i}: missing \"dim\"")))?
                as u32;
            let p1_vanishes = fv
                .get("p1_vanishes")
                .and_then(Value::as_bool)
                .ok_or_else(|| bad(format!("factor {i}: missing \"p1_vanishes\"")))?;
            let numbers = fv
                .get("numbers")
                .and_then(Value::as_object)
                .ok_or_else(|| bad(format!("factor {i}: missing \"numbers\"")))?;
            let mut table = FactorTable::new();
            for (key, val) in numbers {
                let part = parse_partition_key(key)
                    .ok_or_else(|| bad(format!("factor {i}: bad monomial key {key:?}")))?;
                let n: BigInt = val
                    .as_str()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad(format!("factor {i}: {key} is not an integer string")))?;
                table.insert(part, Rat::from_integer(n));
            }
            factors.push(Factor { dim, table, p1_vanishes });
        }
        ManifoldSpec::new(name, factors, string_flag)
    }
}

/// The three 8-dimensional example manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogName {
    /// Bott manifold: `A-hat = 1`, `Sig = 0`.
    B8,
    /// Quaternionic projective plane.
    Hp2,
    /// Milnor-Kervaire almost-parallelizable manifold (string).
    M08,
}

impl CatalogName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "B8" => Ok(CatalogName::B8),
            "HP2" => Ok(CatalogName::Hp2),
            "M08" => Ok(CatalogName::M08),
            _ => Err(Error::UnknownManifold(s.to_string())),
        }
    }
}

/// Catalog entry by name: `B8`, `HP2` or `M08`.
pub fn catalog_manifold(name: CatalogName) -> ManifoldSpec {
    let (label, factor, string) = match name {
        CatalogName::B8 => ("B8", Factor::dim8(896, 128, false), false),
        CatalogName::Hp2 => ("HP2", Factor::dim8(4, 7, false), false),
        CatalogName::M08 => ("M08", Factor::dim8(0, 1440, true), true),
    };
    ManifoldSpec::new(label, vec![factor], string).expect("catalog entries are valid")
}

/// Derives the Bott manifold's top Pontryagin numbers `(p1^2, p2)` from
/// `A-hat(B8) = 1` and `Sig(B8) = 0` via the dimension-8 closed forms:
/// `7 p1^2 - 4 p2 = 5760` and `7 p2 = p1^2`.
pub fn derive_b8_table() -> (Rat, Rat) {
    // substitute p1^2 = 7 p2: 49 p2 - 4 p2 = 5760
    let p2 = rat(5760) / rat(45);
    let p1_sq = rat(7) * &p2;
    (p1_sq, p2)
}

/// Product of manifolds: concatenated factor lists, string iff every factor
/// has vanishing p1 data.
pub fn product_manifold(specs: &[ManifoldSpec]) -> Result<ManifoldSpec> {
    if specs.is_empty() {
        return Err(Error::EmptyProduct);
    }
    let name = specs.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join("x");
    let factors: Vec<Factor> = specs.iter().flat_map(|s| s.factors.iter().cloned()).collect();
    let string_flag = factors.iter().all(|f| f.p1_vanishes);
    ManifoldSpec::new(name, factors, string_flag)
}

/// Closed-form dimension-8 characteristic numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle8 {
    /// `(7 p2 - p1^2) / 45`
    Sig,
    /// `(112 p1^2 - 64 p2) / 45`
    SigT,
    /// `(692 p1^2 + 196 p2) / 45`
    SigL2T,
    /// `(7 p1^2 - 4 p2) / 5760`
    Ahat,
}

/// Evaluates one of the dimension-8 closed forms on a `(p1^2, p2)` table.
pub fn oracle_8d(which: Oracle8, p1_sq: &Rat, p2: &Rat) -> Rat {
    match which {
        Oracle8::Sig => (rat(7) * p2 - p1_sq) / rat(45),
        Oracle8::SigT => (rat(112) * p1_sq - rat(64) * p2) / rat(45),
        Oracle8::SigL2T => (rat(692) * p1_sq + rat(196) * p2) / rat(45),
        Oracle8::Ahat => (rat(7) * p1_sq - rat(4) * p2) / rat(5760),
    }
}

/// Per-factor signature data consumed by [`product_sig_lambda2`].
#[derive(Debug, Clone)]
pub struct FactorSignatures {
    pub sig: Rat,
    pub sig_t: Rat,
    pub sig_l2t: Rat,
}

/// The product formula for `Sig(M, Lambda^2 T)` over `M = prod N_i`:
/// `sum_i SigL2(N_i) prod_{j != i} Sig(N_j)
///  + sum_{i<j} SigT(N_i) SigT(N_j) prod_{p != i,j} Sig(N_p)`.
pub fn product_sig_lambda2(data: &[FactorSignatures]) -> Rat {
    let s = data.len();
    let mut acc = Rat::zero();
    for i in 0..s {
        let mut term = data[i].sig_l2t.clone();
        for (j, d) in data.iter().enumerate() {
            if j != i {
                term *= &d.sig;
            }
        }
        acc += term;
    }
    for i in 0..s {
        for j in (i + 1)..s {
            let mut term = &data[i].sig_t * &data[j].sig_t;
            for (p, d) in data.iter().enumerate() {
                if p != i && p != j {
                    term *= &d.sig;
                }
            }
            acc += term;
        }
    }
    acc
}

/// Milnor-Kervaire data in dimension 4k: signature, A-hat genus and Witten
/// genus of the almost-parallelizable manifold `M_0^{4k}`.
///
/// `Sig = a_k 2^{2k+1} (2^{2k-1} - 1) numerator(B_{2k} / 4k)` with `a_k = 1`
/// for even `k` and `2` for odd `k`; `A-hat = -Sig / (2^{2k+1}(2^{2k-1}-1))`;
/// the Witten genus is `A-hat * E_{2k}`.
pub fn almost_parallelizable(k: u32, order: &Rat) -> Result<(Rat, Rat, ModularForm)> {
    assert!(k >= 1);
    let a_k = if k % 2 == 0 { rat(1) } else { rat(2) };
    let b = crate::modforms::bernoulli_number(2 * k as i64)?;
    let numerator = Rat::from_integer((b / rat(4 * k as i64)).numer().abs());
    let two_factor = Rat::from_integer(BigInt::from(2u32).pow(2 * k + 1))
        * (Rat::from_integer(BigInt::from(2u32).pow(2 * k - 1)) - Rat::one());
    let sig = &a_k * &two_factor * &numerator;
    let ahat = -&sig / &two_factor;
    let e2k = eisenstein_series(k, order)?;
    let witten = ModularForm {
        weight: e2k.weight,
        group: e2k.group,
        expansion: e2k.expansion.scale(&ahat),
    };
    Ok((sig, ahat, witten))
}

/// A string 8-dimensional factor with `p2 = 1440 k` (a connected sum of `k`
/// copies of `M_0^8`), used by the property sweeps.
pub fn m08_multiple(k: i64) -> Factor {
    Factor::dim8(0, 1440 * k, true)
}

/// Convenience: the catalog products used throughout the checks.
pub fn b8_hp2_hp2() -> ManifoldSpec {
    product_manifold(&[
        catalog_manifold(CatalogName::B8),
        catalog_manifold(CatalogName::Hp2),
        catalog_manifold(CatalogName::Hp2),
    ])
    .expect("valid product")
}

pub fn m08_cubed() -> ManifoldSpec {
    product_manifold(&[
        catalog_manifold(CatalogName::M08),
        catalog_manifold(CatalogName::M08),
        catalog_manifold(CatalogName::M08),
    ])
    .expect("valid product")
}

/// The `(p1^2, p2)` entries of a dimension-8 factor.
pub fn dim8_numbers(f: &Factor) -> (Rat, Rat) {
    assert_eq!(f.dim, 8);
    (f.table[&vec![1u32, 1]].clone(), f.table[&vec![2u32]].clone())
}

/// Closed-form signature data of a dimension-8 factor.
pub fn factor_signatures(f: &Factor) -> FactorSignatures {
    let (p1_sq, p2) = dim8_numbers(f);
    FactorSignatures {
        sig: oracle_8d(Oracle8::Sig, &p1_sq, &p2),
        sig_t: oracle_8d(Oracle8::SigT, &p1_sq, &p2),
        sig_l2t: oracle_8d(Oracle8::SigL2T, &p1_sq, &p2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_tables() {
        let b8 = catalog_manifold(CatalogName::B8);
        assert_eq!(dim8_numbers(&b8.factors[0]), (rat(896), rat(128)));
        assert!(!b8.string_flag);
        let hp2 = catalog_manifold(CatalogName::Hp2);
        assert_eq!(dim8_numbers(&hp2.factors[0]), (rat(4), rat(7)));
        let m08 = catalog_manifold(CatalogName::M08);
        assert_eq!(dim8_numbers(&m08.factors[0]), (rat(0), rat(1440)));
        assert!(m08.string_flag);
        assert!(CatalogName::parse("K3").is_err());
    }

    #[test]
    fn b8_derivation_consistent() {
        let (p1_sq, p2) = derive_b8_table();
        assert_eq!(p1_sq, rat(896));
        assert_eq!(p2, rat(128));
        assert_eq!(oracle_8d(Oracle8::Sig, &p1_sq, &p2), rat(0));
        assert_eq!(oracle_8d(Oracle8::Ahat, &p1_sq, &p2), rat(1));
    }

    #[test]
    fn oracle_values() {
        let hp2 = catalog_manifold(CatalogName::Hp2);
        let (p1_sq, p2) = dim8_numbers(&hp2.factors[0]);
        assert_eq!(oracle_8d(Oracle8::Sig, &p1_sq, &p2), rat(1));
        assert_eq!(oracle_8d(Oracle8::SigT, &p1_sq, &p2), rat(0));
        assert_eq!(oracle_8d(Oracle8::SigL2T, &p1_sq, &p2), rat(92));

        let b8 = catalog_manifold(CatalogName::B8);
        let (p1_sq, p2) = dim8_numbers(&b8.factors[0]);
        assert_eq!(oracle_8d(Oracle8::SigT, &p1_sq, &p2), rat(2048));
        assert_eq!(oracle_8d(Oracle8::SigL2T, &p1_sq, &p2), rat(14336));

        let m08 = catalog_manifold(CatalogName::M08);
        let (p1_sq, p2) = dim8_numbers(&m08.factors[0]);
        assert_eq!(oracle_8d(Oracle8::Sig, &p1_sq, &p2), rat(224));
        assert_eq!(oracle_8d(Oracle8::SigT, &p1_sq, &p2), rat(-2048));
        assert_eq!(oracle_8d(Oracle8::SigL2T, &p1_sq, &p2), rat(6272));
        assert_eq!(oracle_8d(Oracle8::Ahat, &p1_sq, &p2), rat(-1));
    }

    #[test]
    fn products() {
        let m = m08_cubed();
        assert_eq!(m.total_dim(), 24);
        assert!(m.string_flag);
        let b = b8_hp2_hp2();
        assert_eq!(b.total_dim(), 24);
        assert!(!b.string_flag);
        let single = product_manifold(&[catalog_manifold(CatalogName::Hp2)]).unwrap();
        assert_eq!(single.factors, catalog_manifold(CatalogName::Hp2).factors);
        assert!(matches!(product_manifold(&[]), Err(Error::EmptyProduct)));
    }

    #[test]
    fn product_sig_lambda2_examples() {
        let data: Vec<FactorSignatures> = b8_hp2_hp2().factors.iter().map(factor_signatures).collect();
        assert_eq!(product_sig_lambda2(&data), rat(14336));

        let data: Vec<FactorSignatures> = m08_cubed().factors.iter().map(factor_signatures).collect();
        let expect = rat(3) * rat(6272) * rat(224) * rat(224) + rat(3) * rat(2048) * rat(2048) * rat(224);
        assert_eq!(product_sig_lambda2(&data), expect);
        assert_eq!(product_sig_lambda2(&data), rat(3762683904));

        let one = vec![factor_signatures(&catalog_manifold(CatalogName::Hp2).factors[0])];
        assert_eq!(product_sig_lambda2(&one), rat(92));
    }

    #[test]
    fn milnor_kervaire_dimension8() {
        let (sig, ahat, witten) = almost_parallelizable(2, &rat(4)).unwrap();
        assert_eq!(sig, rat(224));
        assert_eq!(ahat, rat(-1));
        // W(M_0^8) = -E_4
        assert_eq!(witten.expansion.coefficient_at(&rat(0)).unwrap(), rat(-1));
        assert_eq!(witten.expansion.coefficient_at(&rat(1)).unwrap(), rat(-240));
        // recover p2 = 1440 from the signature oracle with p1 = 0
        let p2 = rat(45) * &sig / rat(7);
        assert_eq!(p2, rat(1440));
    }

    #[test]
    fn milnor_kervaire_parity_constant() {
        // k = 1 is odd, so a_1 = 2: Sig(M_0^4) = 2 * 8 * 1 * numerator(|B_2|/4)
        let (sig, _, _) = almost_parallelizable(1, &rat(2)).unwrap();
        assert_eq!(sig, rat(16));
    }

    #[test]
    fn json_round_trip() {
        let m = m08_cubed();
        let v = m.to_json();
        assert_eq!(ManifoldSpec::from_json(&v).unwrap(), m);
        let hp2 = catalog_manifold(CatalogName::Hp2);
        let v = hp2.to_json();
        assert_eq!(v["factors"][0]["numbers"]["p1^2"], "4");
        assert_eq!(v["factors"][0]["numbers"]["p2"], "7");
    }

    #[test]
    fn invalid_documents_rejected() {
        // string flag inconsistent with nonzero p1 data
        let mut doc = catalog_manifold(CatalogName::Hp2).to_json();
        doc["string"] = json!(true);
        assert!(matches!(
            ManifoldSpec::from_json(&doc),
            Err(Error::InvalidManifold(_))
        ));
        // missing top monomial
        let mut doc = catalog_manifold(CatalogName::Hp2).to_json();
        doc["factors"][0]["numbers"]
            .as_object_mut()
            .unwrap()
            .remove("p1^2");
        assert!(matches!(
            ManifoldSpec::from_json(&doc),
            Err(Error::InvalidManifold(_))
        ));
        // p1_vanishes with nonzero p1^2
        let f = Factor::dim8(896, 128, true);
        assert!(ManifoldSpec::new("bad", vec![f], false).is_err());
    }

    #[test]
    fn partitions_enumeration() {
        assert_eq!(partitions(2), vec![vec![2], vec![1, 1]]);
        assert_eq!(partitions(6).len(), 11);
    }

    #[test]
    fn dim24_single_factor_supported() {
        let mut table = FactorTable::new();
        for part in partitions(6) {
            table.insert(part, rat(0));
        }
        let spec = ManifoldSpec::new("X24", vec![Factor { dim: 24, table, p1_vanishes: true }], true);
        assert!(spec.is_ok());
    }
}
