//! End-to-end acceptance suite. Each test covers one numbered criterion and
//! prints a single pass line; every comparison is exact.

mod support;

use num_traits::One;

use qgenus_core::charring::{power_operation, tangent_char, BundleChar, FactorShape, PowerKind};
use qgenus_core::genus::{
    dirac_index, liu_wang_stream, theta_stream, twisted_signature, witten_genus, LiuWangKind,
};
use qgenus_core::manifolds::{
    b8_hp2_hp2, catalog_manifold, dim8_numbers, factor_signatures, m08_cubed, m08_multiple,
    oracle_8d, product_sig_lambda2, CatalogName, Factor, ManifoldSpec, Oracle8,
};
use qgenus_core::modforms::{
    delta_epsilon_series, discriminant_series, eisenstein_series, fit_weight12_sl2z, DeltaEpsilon,
};
use qgenus_core::rational::{mod_m, rat, ratio, Rat};
use qgenus_core::verify::{
    check_divisibility_suite, check_lemma_2_1, check_lemma_2_2, check_lemma_2_3, check_theorem_0_1,
};
use support::{exterior_oracle, maxdeg_for, pclass_to_x, symmetric_oracle, synthetic_bundle};

fn coeffs(s: &qgenus_core::qseries::QSeries, exps: &[Rat]) -> Vec<Rat> {
    exps.iter().map(|e| s.coefficient_at(e).unwrap()).collect()
}

fn ints(ns: &[i64]) -> Vec<Rat> {
    ns.iter().map(|&n| rat(n)).collect()
}

#[test]
fn criterion_01_modular_form_golden_coefficients() {
    let order = rat(4);
    let q3 = [rat(0), rat(1), rat(2), rat(3)];
    let e2 = eisenstein_series(1, &order).unwrap().expansion;
    assert_eq!(coeffs(&e2, &q3), ints(&[1, -24, -72, -96]));
    let e4 = eisenstein_series(2, &order).unwrap().expansion;
    assert_eq!(coeffs(&e4, &q3), ints(&[1, 240, 2160, 6720]));
    let e6 = eisenstein_series(3, &order).unwrap().expansion;
    assert_eq!(coeffs(&e6, &q3), ints(&[1, -504, -16632, -122976]));
    let delta = discriminant_series(&order).unwrap().expansion;
    assert_eq!(coeffs(&delta, &q3), ints(&[0, 1, -24, 252]));
    println!("PASS criterion 1: E2, E4, E6, Delta golden coefficients through q^3");
}

#[test]
fn criterion_02_tate_relation() {
    let order = rat(10);
    let e4 = eisenstein_series(2, &order).unwrap().expansion;
    let e6 = eisenstein_series(3, &order).unwrap().expansion;
    let delta = discriminant_series(&order).unwrap().expansion;
    assert_eq!(
        e4.pow(3).unwrap().sub(&e6.pow(2).unwrap()),
        delta.scale(&rat(1728))
    );
    println!("PASS criterion 2: E4^3 - E6^2 = 1728 Delta exactly through order 10");
}

#[test]
fn criterion_03_level2_generators_dual_route() {
    // delta_epsilon_series internally builds each generator from theta-null
    // products AND divisor sums and errors on any mismatch; verify the golden
    // coefficients on top, including fractional exponents.
    let order = rat(10);
    let h = |n: i64| ratio(n, 2);
    let d1 = delta_epsilon_series(DeltaEpsilon::Delta1, &order).unwrap().expansion;
    assert_eq!(coeffs(&d1, &[rat(0), rat(1), rat(2)]), vec![ratio(1, 4), rat(6), rat(6)]);
    let e1 = delta_epsilon_series(DeltaEpsilon::Eps1, &order).unwrap().expansion;
    assert_eq!(coeffs(&e1, &[rat(0), rat(1), rat(2)]), vec![ratio(1, 16), rat(-1), rat(7)]);
    let d2 = delta_epsilon_series(DeltaEpsilon::Delta2, &order).unwrap().expansion;
    assert_eq!(
        coeffs(&d2, &[rat(0), h(1), rat(1), h(3)]),
        vec![ratio(-1, 8), rat(-3), rat(-3), rat(-12)]
    );
    let e2 = delta_epsilon_series(DeltaEpsilon::Eps2, &order).unwrap().expansion;
    assert_eq!(
        coeffs(&e2, &[rat(0), h(1), rat(1), h(3)]),
        vec![rat(0), rat(1), rat(8), rat(28)]
    );
    println!("PASS criterion 3: delta/epsilon theta products equal divisor sums through order 10");
}

#[test]
fn criterion_04_stream_expansions() {
    let shape = FactorShape::new(vec![8, 8, 8]);
    let order = rat(3);
    let t = tangent_char(&shape);
    let l2t = power_operation(PowerKind::Exterior, 2, &t);
    let s2t = power_operation(PowerKind::Symmetric, 2, &t);
    let c = |n: i64| BundleChar::trivial(&shape, n);
    let lin = |a: &BundleChar, k: i64, n: i64| a.add(&t.scale(k)).unwrap().add(&c(n)).unwrap();

    let theta = theta_stream(&shape, &order).unwrap();
    assert_eq!(theta.coefficient(&rat(0)).unwrap(), c(1));
    assert_eq!(theta.coefficient(&rat(1)).unwrap(), t.add(&c(-24)).unwrap());
    assert_eq!(theta.coefficient(&rat(2)).unwrap(), lin(&s2t, -23, 252));

    let t21 = liu_wang_stream(LiuWangKind::Theta2, 0, 1, &shape, &rat(2)).unwrap();
    assert_eq!(t21.coefficient(&ratio(1, 2)).unwrap(), t.add(&c(-24)).unwrap());
    assert_eq!(t21.coefficient(&rat(1)).unwrap(), lin(&l2t, -22, 252));

    let t11 = liu_wang_stream(LiuWangKind::Theta1, 0, 1, &shape, &rat(2)).unwrap();
    assert_eq!(
        t11.coefficient(&rat(1)).unwrap(),
        l2t.sub(&s2t).unwrap().add(&t).unwrap()
    );

    let t20 = liu_wang_stream(LiuWangKind::Theta2, 1, 0, &shape, &rat(2)).unwrap();
    assert_eq!(
        t20.coefficient(&ratio(1, 2)).unwrap(),
        t.scale(-1).add(&c(24)).unwrap()
    );
    assert_eq!(t20.coefficient(&rat(1)).unwrap(), lin(&l2t, -23, 276));
    println!("PASS criterion 4: Theta, Theta1(0,1), Theta2(0,1), Theta2(1,0) expansions match");
}

#[test]
fn criterion_05_dim8_table_both_routes() {
    let golden: [(CatalogName, [i64; 4]); 3] = [
        (CatalogName::B8, [0, 2048, 14336, 1]),
        (CatalogName::Hp2, [1, 0, 92, 0]),
        (CatalogName::M08, [224, -2048, 6272, -1]),
    ];
    for (name, [sig, sig_t, sig_l2t, ahat]) in golden {
        let m = catalog_manifold(name);
        let (p1_sq, p2) = dim8_numbers(&m.factors[0]);
        // closed forms
        assert_eq!(oracle_8d(Oracle8::Sig, &p1_sq, &p2), rat(sig));
        assert_eq!(oracle_8d(Oracle8::SigT, &p1_sq, &p2), rat(sig_t));
        assert_eq!(oracle_8d(Oracle8::SigL2T, &p1_sq, &p2), rat(sig_l2t));
        assert_eq!(oracle_8d(Oracle8::Ahat, &p1_sq, &p2), rat(ahat));
        // independent ring integration
        assert_eq!(twisted_signature(&m, "1").unwrap(), rat(sig));
        assert_eq!(twisted_signature(&m, "T").unwrap(), rat(sig_t));
        assert_eq!(twisted_signature(&m, "L2T").unwrap(), rat(sig_l2t));
        assert_eq!(dirac_index(&m, "1").unwrap(), rat(ahat));
    }
    println!("PASS criterion 5: dim-8 example table exact by closed forms and ring integration");
}

#[test]
fn criterion_06_product_signature_mod_3() {
    let m = b8_hp2_hp2();
    let direct = twisted_signature(&m, "L2T").unwrap();
    let data: Vec<_> = m.factors.iter().map(factor_signatures).collect();
    let product_formula = product_sig_lambda2(&data);
    assert_eq!(direct, rat(14336));
    assert_eq!(product_formula, rat(14336));
    assert_eq!(mod_m(&direct, 3), 2);
    println!("PASS criterion 6: Sig(B8xHP2xHP2, L2T) = 14336 = 2 mod 3 by both routes");
}

#[test]
fn criterion_07_string_product_signature() {
    let m = m08_cubed();
    let direct = twisted_signature(&m, "L2T").unwrap();
    let expect = rat(3) * rat(6272) * rat(224) * rat(224) + rat(3) * rat(2048) * rat(2048) * rat(224);
    assert_eq!(direct, expect);
    assert_eq!(direct, rat(3762683904));
    assert_eq!(mod_m(&direct, 9), 3);
    assert_eq!(mod_m(&direct, 3), 0);
    println!("PASS criterion 7: Sig(M08^3, L2T) = 3762683904, 3 mod 9 and 0 mod 3");
}

#[test]
fn criterion_08_witten_genus() {
    let w8 = witten_genus(&catalog_manifold(CatalogName::M08), &rat(5)).unwrap();
    let e4 = eisenstein_series(2, &rat(5)).unwrap().expansion;
    assert_eq!(w8, e4.scale(&-Rat::one()));

    let w24 = witten_genus(&m08_cubed(), &rat(4)).unwrap();
    let e4 = eisenstein_series(2, &rat(4)).unwrap().expansion;
    assert_eq!(w24, e4.pow(3).unwrap().scale(&-Rat::one()));

    let fit = fit_weight12_sl2z(&w24).unwrap();
    assert!(fit.in_span);
    assert_eq!(fit.coefficients, vec![rat(-1), rat(0)]);
    assert_eq!(fit.first_residual, None);
    println!("PASS criterion 8: W(M08) = -E4, W(M08^3) = -E4^3, fit (m, n) = (-1, 0)");
}

#[test]
fn criterion_09_negative_controls() {
    let m = b8_hp2_hp2();
    let w = witten_genus(&m, &rat(4)).unwrap();
    let fit = fit_weight12_sl2z(&w).unwrap();
    assert!(!fit.in_span);
    assert_eq!(fit.coefficients, vec![rat(0), rat(0)]);
    assert_eq!(fit.first_residual, Some(rat(2)));

    let lemma = check_lemma_2_1(&m).unwrap();
    assert!(!lemma.passed && lemma.expected_fail);
    assert_eq!(lemma.left, "1");
    assert_eq!(lemma.right, "0");

    let thm = check_theorem_0_1(&m).unwrap();
    assert!(!thm.passed && thm.expected_fail);
    assert_eq!((thm.left.as_str(), thm.right.as_str()), ("2", "0"));
    println!("PASS criterion 9: non-string controls fail as required (fit, lemma21, congruence)");
}

#[test]
fn criterion_10_exact_signature_identity() {
    let b8 = catalog_manifold(CatalogName::B8);
    let hp2 = catalog_manifold(CatalogName::Hp2);
    let m08 = catalog_manifold(CatalogName::M08);
    let mut products = Vec::new();
    for a in [&b8, &hp2, &m08] {
        for b in [&b8, &hp2, &m08] {
            for c in [&b8, &hp2, &m08] {
                products.push(
                    qgenus_core::manifolds::product_manifold(&[
                        (*a).clone(),
                        (*b).clone(),
                        (*c).clone(),
                    ])
                    .unwrap(),
                );
            }
        }
    }
    for m in &products {
        let r = check_lemma_2_3(m).unwrap();
        assert!(r.passed, "{}", r.render_line());
    }
    let r = check_lemma_2_3(&b8_hp2_hp2()).unwrap();
    assert_eq!((r.left.as_str(), r.right.as_str()), ("2048", "2048"));
    println!("PASS criterion 10: exact twisted-signature identity on all 27 catalog products");
}

#[test]
fn criterion_11_string_property_sweep() {
    let mut count = 0;
    for k1 in 1..=5i64 {
        for k2 in k1..=5 {
            for k3 in k2..=5 {
                let m = ManifoldSpec::new(
                    format!("{k1}M08x{k2}M08x{k3}M08"),
                    vec![m08_multiple(k1), m08_multiple(k2), m08_multiple(k3)],
                    true,
                )
                .unwrap();
                let thm = check_theorem_0_1(&m).unwrap();
                assert!(thm.passed, "{}", thm.render_line());
                for r in check_divisibility_suite(&m).unwrap() {
                    assert!(r.passed, "{}", r.render_line());
                }
                let lemma21 = check_lemma_2_1(&m).unwrap();
                assert!(lemma21.passed, "{}", lemma21.render_line());
                let (lemma22, detail) = check_lemma_2_2(&m, &rat(2)).unwrap();
                assert!(lemma22.passed, "{}", lemma22.render_line());
                assert!(detail.closed_forms_match);
                assert!(detail.coefficient_identity);
                assert!(detail.exact_relation);
                assert!(detail.transport_matches);
                count += 1;
            }
        }
    }
    assert_eq!(count, 35);
    println!("PASS criterion 11: all 35 string multisets satisfy the congruence and fit chain");
}

#[test]
fn criterion_12_lambda_ring_suite() {
    for k in 1..=2usize {
        let v = synthetic_bundle(k);
        let maxdeg = maxdeg_for(k);
        // Newton recursions against the Chern-root oracle
        for n in 0..=4u32 {
            let ext = power_operation(PowerKind::Exterior, n, &v);
            assert_eq!(pclass_to_x(ext.ch(), k, maxdeg), exterior_oracle(n as usize, k, maxdeg));
            let sym = power_operation(PowerKind::Symmetric, n, &v);
            assert_eq!(pclass_to_x(sym.ch(), k, maxdeg), symmetric_oracle(n as usize, k, maxdeg));
        }
        // S_t Lambda_{-t} = 1 through n = 4
        for n in 1..=4u32 {
            let mut acc = qgenus_core::charring::PClass::zero(v.shape());
            for i in 0..=n {
                let sign = if i % 2 == 0 { Rat::one() } else { -Rat::one() };
                let term = power_operation(PowerKind::Exterior, i, &v)
                    .ch()
                    .mul(power_operation(PowerKind::Symmetric, n - i, &v).ch())
                    .unwrap();
                acc = acc.add_scaled(&term, &sign).unwrap();
            }
            assert!(acc.is_zero());
        }
        // Lambda^2 + S^2 = tensor square
        let sum = power_operation(PowerKind::Exterior, 2, &v)
            .add(&power_operation(PowerKind::Symmetric, 2, &v))
            .unwrap();
        assert_eq!(sum, v.tensor(&v).unwrap());
    }
    println!("PASS criterion 12: lambda-ring operations agree with the Chern-root oracle");
}

#[test]
fn dirac_index_examples() {
    assert_eq!(dirac_index(&m08_cubed(), "T").unwrap(), rat(-744));
    let f = Factor::dim8(0, 1440, true);
    let m = ManifoldSpec::new("M08", vec![f], true).unwrap();
    assert_eq!(dirac_index(&m, "1").unwrap(), rat(-1));
}
