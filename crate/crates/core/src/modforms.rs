//! The named modular forms of level 1 and level 2, and weight-12 basis fits.
//!
//! Forms are built as exact truncated q-series. Wherever two independent
//! constructions exist (theta-null products vs divisor sums, Eisenstein
//! combination vs eta-type product for the discriminant), both are computed
//! and compared; a mismatch is an engine bug and is reported as an internal
//! inconsistency, never silently ignored.
//!
//! Group and weight tags are metadata asserted by construction. The engine
//! never proves modularity analytically; it certifies membership in a finite
//! basis to the series' truncation order, which turns the modularity claims
//! used downstream into falsifiable coefficient identities.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::Error;
use crate::qseries::{ProductFamily, QSeries};
use crate::rational::{rat, rat_str, ratio, Rat};
use crate::Result;

/// Modular group tag for a form's transformation behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Sl2z,
    Gamma0Two,
    GammaUpper0Two,
    /// `E_2` transforms quasimodularly over the full modular group.
    QuasiSl2z,
}

/// A q-expansion together with its asserted weight and group.
#[derive(Debug, Clone)]
pub struct ModularForm {
    pub weight: u32,
    pub group: Group,
    pub expansion: QSeries,
}

/// Which of the four level-2 generators to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaEpsilon {
    Delta1,
    Eps1,
    Delta2,
    Eps2,
}

/// Weight-12 basis tags for [`BasisFit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// `{E_4^3, Delta}` over `SL_2(Z)`.
    TateW12,
    /// `{(8 delta_2)^{6-2r} eps_2^r}` over `Gamma^0(2)`.
    GammaUpper02W12,
    /// `{(8 delta_1)^{6-2r} eps_1^r}` over `Gamma_0(2)`.
    Gamma02W12,
}

impl BasisTag {
    pub fn json_name(self) -> &'static str {
        match self {
            BasisTag::TateW12 => "tate_w12",
            BasisTag::GammaUpper02W12 => "gamma_upper0_2_w12",
            BasisTag::Gamma02W12 => "gamma_0_2_w12",
        }
    }
}

/// The result of expressing a series in a weight-12 basis.
///
/// `in_span` is true iff the residual (input minus fitted combination) is the
/// exact zero series below `verified_order`; arithmetic is exact, so there is
/// no tolerance.
#[derive(Debug, Clone)]
pub struct BasisFit {
    pub basis: BasisTag,
    pub coefficients: Vec<Rat>,
    pub verified_order: Rat,
    pub in_span: bool,
    /// Exponent of the first nonzero residual term when not in span.
    pub first_residual: Option<Rat>,
}

impl BasisFit {
    pub fn to_json(&self) -> Value {
        json!({
            "basis": self.basis.json_name(),
            "coefficients": self.coefficients.iter().map(rat_str).collect::<Vec<_>>(),
            "in_span": self.in_span,
            "verified_order": rat_str(&self.verified_order),
        })
    }
}

/// Exact Bernoulli number `B_n` for even positive `n`, in the convention
/// `B_2 = 1/6`, `B_4 = -1/30` (so the Eisenstein normalization below yields
/// the familiar integral expansions).
pub fn bernoulli_number(n: i64) -> Result<Rat> {
    if n <= 0 || n % 2 != 0 {
        return Err(Error::BadBernoulliIndex(n));
    }
    // defining recurrence sum_{j=0}^{n} C(n+1, j) B_j = 0 with B_0 = 1
    let n = n as usize;
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Rat::one());
            continue;
        }
        let mut acc = Rat::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                acc += Rat::from_integer(binom.clone()) * bj;
            }
            // C(m+1, j+1) from C(m+1, j)
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / Rat::from_integer(BigInt::from(m + 1)));
    }
    Ok(b[n].clone())
}

/// Sum of `d^power` over divisors `d` of `n` satisfying `filter(d, n/d)`.
fn divisor_sum(n: i64, power: u32, filter: impl Fn(i64, i64) -> bool) -> Rat {
    let mut acc = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 && filter(d, n / d) {
            acc += BigInt::from(d).pow(power);
        }
    }
    Rat::from_integer(acc)
}

/// The Eisenstein series `E_{2k} = 1 - (4k / B_{2k}) sum sigma_{2k-1}(n) q^n`.
///
/// `E_2` is tagged quasimodular; `E_{2k}` for `k > 1` is a weight-2k form over
/// the full modular group.
pub fn eisenstein_series(k: u32, order: &Rat) -> Result<ModularForm> {
    assert!(k >= 1);
    let b = bernoulli_number(2 * k as i64)?;
    let factor = -rat(4 * k as i64) / b;
    let mut s = QSeries::one(order);
    let mut n = 1i64;
    while &rat(n) < order {
        let sigma = divisor_sum(n, 2 * k - 1, |_, _| true);
        s = s.add_scaled(
            &QSeries::monomial(&(&factor * sigma), &rat(n), order),
            &Rat::one(),
        );
        n += 1;
    }
    Ok(ModularForm {
        weight: 2 * k,
        group: if k == 1 { Group::QuasiSl2z } else { Group::Sl2z },
        expansion: s,
    })
}

/// The modular discriminant, computed both as `(E_4^3 - E_6^2)/1728` and as
/// the product `q prod_{n>=1} (1 - q^n)^24`; the two constructions must agree
/// exactly below the truncation order.
pub fn discriminant_series(order: &Rat) -> Result<ModularForm> {
    let e4 = eisenstein_series(2, order)?.expansion;
    let e6 = eisenstein_series(3, order)?.expansion;
    let from_eisenstein = e4
        .pow(3)?
        .sub(&e6.pow(2)?)
        .scale(&ratio(1, 1728));
    let inner_order = order - Rat::one(); // the q-shift restores the full order
    let from_product = QSeries::product_expand(
        &[ProductFamily::new(rat(0), rat(1), -1, 24)],
        &inner_order,
    )?
    .shift(&Rat::one());
    check_agree("discriminant", &from_eisenstein, &from_product)?;
    Ok(ModularForm {
        weight: 12,
        group: Group::Sl2z,
        expansion: from_product,
    })
}

fn check_agree(what: &str, a: &QSeries, b: &QSeries) -> Result<()> {
    let diff = a.sub(b);
    if let Some((e, _)) = diff.terms().next() {
        return Err(Error::InternalInconsistency {
            what: what.to_string(),
            exponent: rat_str(&e),
        });
    }
    Ok(())
}

/// Theta-null value `theta_j(0, tau)` for `j` in 1..=3, as an infinite product.
///
/// The numbering follows the convention in which `theta_2`, `theta_3` are the
/// half-integer-exponent products and `theta_1` carries the `2q^{1/8}`
/// prefactor (the unsubscripted theta vanishes at `v = 0` and is not exposed).
pub fn theta_null_series(j: u32, order: &Rat) -> Result<QSeries> {
    let common = ProductFamily::new(rat(0), rat(1), -1, 1); // prod (1 - q^j)
    let families = match j {
        1 => vec![common, ProductFamily::new(rat(0), rat(1), 1, 2)],
        2 => vec![common, ProductFamily::new(ratio(-1, 2), rat(1), -1, 2)],
        3 => vec![common, ProductFamily::new(ratio(-1, 2), rat(1), 1, 2)],
        _ => return Err(Error::UnknownForm(format!("theta{j}"))),
    };
    let product = QSeries::product_expand(&families, order)?;
    Ok(if j == 1 {
        // 2 q^{1/8} prod (1-q^j)(1+q^j)^2
        product.shift(&ratio(1, 8)).scale(&rat(2))
    } else {
        product
    })
}

/// One of `delta_1, eps_1, delta_2, eps_2`, built from fourth powers of the
/// theta-nulls and cross-checked against the divisor-sum expansions.
pub fn delta_epsilon_series(which: DeltaEpsilon, order: &Rat) -> Result<ModularForm> {
    use DeltaEpsilon::*;
    let t1 = theta_null_series(1, order)?.pow(4)?;
    let t2 = theta_null_series(2, order)?.pow(4)?;
    let t3 = theta_null_series(3, order)?.pow(4)?;
    let from_theta = match which {
        Delta1 => t2.add(&t3).scale(&ratio(1, 8)),
        Eps1 => t2.mul(&t3).scale(&ratio(1, 16)),
        Delta2 => t1.add(&t3).scale(&ratio(-1, 8)),
        Eps2 => t1.mul(&t3).scale(&ratio(1, 16)),
    };

    let mut from_divisors = match which {
        Delta1 => QSeries::constant(&ratio(1, 4), order),
        Eps1 => QSeries::constant(&ratio(1, 16), order),
        Delta2 => QSeries::constant(&ratio(-1, 8), order),
        Eps2 => QSeries::zero(order),
    };
    let mut n = 1i64;
    loop {
        let (exp, coeff) = match which {
            Delta1 => (rat(n), rat(6) * divisor_sum(n, 1, |d, _| d % 2 == 1)),
            Eps1 => (
                rat(n),
                divisor_sum(n, 3, |d, _| d % 2 == 0) - divisor_sum(n, 3, |d, _| d % 2 == 1),
            ),
            Delta2 => (ratio(n, 2), rat(-3) * divisor_sum(n, 1, |d, _| d % 2 == 1)),
            Eps2 => (ratio(n, 2), divisor_sum(n, 3, |_, co| co % 2 == 1)),
        };
        if &exp >= order {
            break;
        }
        from_divisors = from_divisors.add(&QSeries::monomial(&coeff, &exp, order));
        n += 1;
    }

    let name = match which {
        Delta1 => "delta1",
        Eps1 => "eps1",
        Delta2 => "delta2",
        Eps2 => "eps2",
    };
    check_agree(name, &from_theta, &from_divisors)?;
    let (weight, group) = match which {
        Delta1 => (2, Group::Gamma0Two),
        Eps1 => (4, Group::Gamma0Two),
        Delta2 => (2, Group::GammaUpper0Two),
        Eps2 => (4, Group::GammaUpper0Two),
    };
    Ok(ModularForm { weight, group, expansion: from_divisors })
}

fn residual_fit(
    basis: BasisTag,
    s: &QSeries,
    elements: &[QSeries],
    coefficients: Vec<Rat>,
) -> BasisFit {
    let mut residual = s.clone();
    for (c, e) in coefficients.iter().zip(elements) {
        residual = residual.add_scaled(e, &-c.clone());
    }
    let first_residual = residual.terms().next().map(|(e, _)| e);
    BasisFit {
        basis,
        coefficients,
        verified_order: s.order(),
        in_span: first_residual.is_none(),
        first_residual,
    }
}

/// Fits a weight-12 integer-exponent series against `{E_4^3, Delta}`.
///
/// By triangularity `m` is the constant term and `n = c_1 - 720 m`; the fit
/// is in span iff the residual vanishes below the input's truncation order.
pub fn fit_weight12_sl2z(s: &QSeries) -> Result<BasisFit> {
    if !s.has_integer_support() {
        return Err(Error::FractionalExponents);
    }
    if s.order() < rat(3) {
        return Err(Error::InsufficientOrder {
            needed: "3".into(),
            got: rat_str(&s.order()),
        });
    }
    let order = s.order();
    let e4cubed = eisenstein_series(2, &order)?.expansion.pow(3)?;
    let delta = discriminant_series(&order)?.expansion;
    let m = s.coefficient_at(&rat(0))?;
    let n = s.coefficient_at(&rat(1))? - rat(720) * &m;
    Ok(residual_fit(BasisTag::TateW12, s, &[e4cubed, delta], vec![m, n]))
}

/// The four weight-12 basis elements `(8 d)^{6-2r} e^r`, `r = 0..3`, built
/// from a weight-2 form `d` and weight-4 form `e`.
fn weight12_level2_basis(d: &QSeries, e: &QSeries) -> Result<Vec<QSeries>> {
    let d8 = d.scale(&rat(8));
    (0..4)
        .map(|r| Ok(d8.pow(6 - 2 * r)?.mul(&e.pow(r)?)))
        .collect()
}

/// Fits a series against the `Gamma^0(2)` weight-12 basis
/// `{(8 delta_2)^{6-2r} eps_2^r}` by solving the exact 4x4 linear system in
/// the coefficients at `q^0, q^{1/2}, q^1, q^{3/2}`.
pub fn fit_weight12_gamma_upper0_2(s: &QSeries) -> Result<BasisFit> {
    if s.order() < rat(2) {
        return Err(Error::InsufficientOrder {
            needed: "2".into(),
            got: rat_str(&s.order()),
        });
    }
    let order = s.order();
    let d2 = delta_epsilon_series(DeltaEpsilon::Delta2, &order)?.expansion;
    let e2 = delta_epsilon_series(DeltaEpsilon::Eps2, &order)?.expansion;
    let basis = weight12_level2_basis(&d2, &e2)?;

    let probes: Vec<Rat> = (0..4).map(|i| ratio(i, 2)).collect();
    let mut matrix = [[Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()],
        [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()],
        [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()],
        [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()]];
    let mut rhs = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
    for (i, e) in probes.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            matrix[i][j] = b.coefficient_at(e)?;
        }
        rhs[i] = s.coefficient_at(e)?;
    }
    let h = solve4(&mut matrix, &mut rhs);
    Ok(residual_fit(BasisTag::GammaUpper02W12, s, &basis, h))
}

/// Exact Gaussian elimination for the 4x4 fit system. The basis is triangular
/// in leading exponents, so a pivot always exists.
fn solve4(m: &mut [[Rat; 4]; 4], rhs: &mut [Rat; 4]) -> Vec<Rat> {
    for col in 0..4 {
        let pivot_row = (col..4)
            .find(|&r| !m[r][col].is_zero())
            .expect("triangular basis has a pivot");
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = m[col][col].clone();
        for r in 0..4 {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..4 {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    (0..4).map(|i| &rhs[i] / &m[i][i]).collect()
}

/// The `Gamma_0(2)`-side transport of a `Gamma^0(2)` fit:
/// `2^{-12} sum_r h_r (8 delta_1)^{6-2r} eps_1^r`, the series that must equal
/// the companion form under the S-transformation.
pub fn transport_gamma02(h: &[Rat], order: &Rat) -> Result<QSeries> {
    assert_eq!(h.len(), 4, "transport takes exactly four coefficients");
    let d1 = delta_epsilon_series(DeltaEpsilon::Delta1, order)?.expansion;
    let e1 = delta_epsilon_series(DeltaEpsilon::Eps1, order)?.expansion;
    let basis = weight12_level2_basis(&d1, &e1)?;
    let mut acc = QSeries::zero(order);
    for (hr, b) in h.iter().zip(&basis) {
        acc = acc.add_scaled(b, hr);
    }
    Ok(acc.scale(&ratio(1, 4096)))
}

/// Resolves a CLI-facing form name to its expansion.
pub fn form_by_name(name: &str, order: &Rat) -> Result<QSeries> {
    Ok(match name {
        "E2" => eisenstein_series(1, order)?.expansion,
        "E4" => eisenstein_series(2, order)?.expansion,
        "E6" => eisenstein_series(3, order)?.expansion,
        "delta_disc" => discriminant_series(order)?.expansion,
        "theta1" => theta_null_series(1, order)?,
        "theta2" => theta_null_series(2, order)?,
        "theta3" => theta_null_series(3, order)?,
        "delta1" => delta_epsilon_series(DeltaEpsilon::Delta1, order)?.expansion,
        "eps1" => delta_epsilon_series(DeltaEpsilon::Eps1, order)?.expansion,
        "delta2" => delta_epsilon_series(DeltaEpsilon::Delta2, order)?.expansion,
        "eps2" => delta_epsilon_series(DeltaEpsilon::Eps2, order)?.expansion,
        _ => return Err(Error::UnknownForm(name.to_string())),
    })
}
