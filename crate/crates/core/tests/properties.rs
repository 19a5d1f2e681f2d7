//! Randomized invariants of the coefficient formula and its local ingredients.

use eis_core::arith::legendre;
use eis_core::characters::{DirichletCharacter, LocalCharacterData};
use eis_core::form::HalfIntegralForm;
use eis_core::fourier::{coefficient, eichler_zagier_coefficient, CoefficientOptions, EisensteinSpec};
use eis_core::localfactors::{curve_count_ap, curve_count_ap_naive, k_closed_form, volume_r_closed_form, RamifiedPlaceInput};
use eis_core::oracle::ramified::k_oracle;
use eis_core::oracle::volume::volume_r;
use eis_core::scalar::{Cyclo, RootOfUnity};
use proptest::prelude::*;

fn psd_form() -> impl Strategy<Value = HalfIntegralForm> {
    (1i64..8, 1i64..8, -6i64..=6).prop_filter_map("positive definite", |(n, m, r)| {
        let t = HalfIntegralForm::new(n, r, m);
        (4 * n * m - r * r > 0).then_some(t)
    })
}

fn unimodular() -> impl Strategy<Value = (i64, i64, i64, i64)> {
    prop_oneof![
        Just((1, 0, 0, 1)),
        Just((0, 1, 1, 0)),
        Just((1, 1, 0, 1)),
        Just((1, 0, 1, 1)),
        Just((1, -1, 0, 1)),
        Just((-1, 0, 0, 1)),
        Just((2, 1, 1, 1)),
    ]
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn level_one_coefficient_is_gl2_invariant(t in psd_form(), a in unimodular(), k in prop::sample::select(vec![4i64, 6, 8])) {
        let spec = EisensteinSpec::from_label(k, "1:1").unwrap();
        let opts = CoefficientOptions::default();
        let u = t.transform(a.0, a.1, a.2, a.3).unwrap();
        let x = coefficient(&spec, &t, &opts).unwrap().value.as_rational();
        let y = coefficient(&spec, &u, &opts).unwrap().value.as_rational();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn level_one_coefficient_matches_eichler_zagier(t in psd_form(), k in prop::sample::select(vec![4i64, 6, 8, 10])) {
        let spec = EisensteinSpec::from_label(k, "1:1").unwrap();
        let got = coefficient(&spec, &t, &CoefficientOptions::default()).unwrap().value.as_rational();
        prop_assert_eq!(got, Some(eichler_zagier_coefficient(&t, k as u32).unwrap()));
    }

    #[test]
    fn transform_preserves_discriminant(t in psd_form(), a in unimodular()) {
        prop_assert_eq!(t.transform(a.0, a.1, a.2, a.3).unwrap().delta().unwrap(), t.delta().unwrap());
    }

    #[test]
    fn point_count_matches_enumeration(p in small_prime(), d in -60i64..=60) {
        prop_assume!(d != 0);
        let a = curve_count_ap(d, p);
        prop_assert_eq!(a, curve_count_ap_naive(d, p));
        prop_assert!((a * a) as u64 <= 4 * p);
    }

    #[test]
    fn gauss_sum_has_absolute_square_n(n in 1u64..=60, pick in any::<prop::sample::Index>()) {
        let chars = DirichletCharacter::primitive_characters(n);
        prop_assume!(!chars.is_empty());
        let eta = pick.get(&chars);
        let g = eta.gauss_sum();
        prop_assert_eq!(&g * &g.conj(), Cyclo::from_int(n as i64));
    }

    #[test]
    fn k_table_inside_oracle_interval(
        p in prop::sample::select(vec![3u64, 5]),
        n in 1i64..6, rk in 0i64..4, m in 1i64..40, sign in prop::sample::select(vec![1i64, -1]), s in 4i64..=5,
    ) {
        let t = HalfIntegralForm::new(n, rk * p as i64, m * p as i64);
        prop_assume!(t.delta().unwrap() != 0);
        let chi = LocalCharacterData::quadratic(p, RootOfUnity::from_sign(sign));
        let input = RamifiedPlaceInput::new(chi, t, s).unwrap();
        let table = k_closed_form(&input).unwrap().value.unwrap();
        let oracle = k_oracle(&input, 14).unwrap();
        prop_assert!(oracle.contains(&table), "T={} p={} χ(p)={} s={}", t, p, sign, s);
    }

    #[test]
    fn volume_table_matches_refinement(
        p in prop::sample::select(vec![3u64, 5, 7]),
        vn in 0u32..3, vm in 0u32..4, un in 1i64..5, um in 1i64..5, i in 0i64..4, j in -2i64..3,
    ) {
        let pi = p as i64;
        prop_assume!(un % pi != 0 && um % pi != 0);
        let (n, m) = (pi.pow(vn) * un, pi.pow(vm) * um);
        let t = HalfIntegralForm::new(n, 0, m);
        prop_assert_eq!(volume_r(i, j, &t, p).unwrap(), volume_r_closed_form(i, j, n, m, p).unwrap());
    }

    #[test]
    fn legendre_is_multiplicative(p in small_prime(), a in -200i64..200, b in -200i64..200) {
        prop_assert_eq!(legendre(a * b, p), legendre(a, p) * legendre(b, p));
    }
}

#[test]
fn even_quadratic_rank_two_coefficients_are_real() {
    use eis_core::scalar::{Precision, Scalar};
    let spec = EisensteinSpec::from_label(4, "5:4").unwrap();
    let opts = CoefficientOptions { precision: Precision::new(128), ..CoefficientOptions::default() };
    for (n, r, m) in [(1, 1, 25), (2, 1, 25), (1, 5, 25), (3, 5, 50), (2, 0, 75)] {
        let rec = coefficient(&spec, &HalfIntegralForm::new(n, r, m), &opts).unwrap();
        let Scalar::Numeric(z) = &rec.value else { panic!("numeric value expected") };
        assert!(z.im.to_f64().abs() < 2f64.powi(-64), "({n},{r},{m}): {}", rec.value.render(20));
        assert!(z.re.to_f64() != 0.0);
    }
}
