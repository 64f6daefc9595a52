use da_denom_core::catalog;
use da_denom_core::certify::{derive_delta_nu, verify_divisibility, CertifyError};
use da_denom_core::recurrence::{evaluate, evaluate_fast, fast_path_available, parse_spec, write_spec};
use da_denom_core::shift::{evaluate_auto, shift_to_nonnegative, ShiftError};
use da_denom_core::{BigInt, BigRational, CoefficientRule, Denominator, Poly, RecurrenceSpec, SeparableTerm};
use num_integer::Integer;
use proptest::prelude::*;

fn poly(max_deg: usize, range: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = Poly> {
    prop::collection::vec(range, 1..=max_deg + 1).prop_map(|c| Poly::from_i64(&c))
}

fn term(k: usize) -> impl Strategy<Value = SeparableTerm> {
    (poly(1, -3..=3), prop::collection::vec(poly(1, -2..=2), k))
        .prop_map(|(n_poly, slots)| SeparableTerm::plain(n_poly, slots))
}

/// Split-mode specs with non-negative sigma, small integer data and rational
/// initial values.
fn random_spec() -> impl Strategy<Value = RecurrenceSpec> {
    let factors = prop::collection::vec((1i64..=2, 1i64..=4), 1..=2)
        .prop_filter("coprime", |f| f.iter().all(|(a, b)| a.gcd(b) == 1));
    (factors, 0i64..=1, 0i64..=1, 1usize..=3, 0usize..=2, 1i64..=3)
        .prop_flat_map(|(factors, sigma1, width, k0, start, c)| {
            let sigma2 = sigma1 + width;
            let keys: Vec<(i64, usize)> = (sigma1..=sigma2).flat_map(|s| (1..=k0).map(move |k| (s, k))).collect();
            let rules = keys
                .into_iter()
                .map(|(s, k)| {
                    prop::option::weighted(0.7, prop::collection::vec(term(k), 1..=2))
                        .prop_map(move |t| t.map(|terms| CoefficientRule::new(s, k, terms)))
                })
                .collect::<Vec<_>>();
            let initial = prop::collection::vec(
                (-5i64..=5, 1i64..=4).prop_map(|(n, d)| BigRational::new(n.into(), d.into())),
                start + 1,
            );
            (Just(factors), Just((sigma1, sigma2, k0, start, c)), rules, initial)
        })
        .prop_map(|(factors, (sigma1, sigma2, k0, start, c), rules, initial)| {
            let (a, b) = factors.into_iter().unzip();
            RecurrenceSpec::new(
                BigInt::from(c),
                Denominator::Split { a, b },
                sigma1,
                sigma2,
                k0,
                start,
                rules.into_iter().flatten().collect(),
                initial,
            )
            .expect("generated specs are valid")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn fast_and_naive_agree(spec in random_spec()) {
        prop_assert_eq!(evaluate(&spec, 25).unwrap(), evaluate_fast(&spec, 25).unwrap());
    }

    #[test]
    fn normalization_invariance(spec in random_spec(), m in 2i64..=6) {
        let scaled = spec.rescaled(&BigInt::from(m));
        prop_assert_eq!(evaluate(&spec, 20).unwrap(), evaluate(&scaled, 20).unwrap());
    }

    #[test]
    fn certificate_holds_on_random_specs(spec in random_spec()) {
        match derive_delta_nu(&spec) {
            Ok(cert) => {
                let f = evaluate_fast(&spec, 40).unwrap();
                let report = verify_divisibility(&f, &cert, 0..=40);
                prop_assert!(report.is_clean(), "{:?}", report.violations());
                // Doubling C doubles delta and keeps the check clean.
                let doubled = spec.rescaled(&BigInt::from(2));
                let cert2 = derive_delta_nu(&doubled).unwrap();
                prop_assert_eq!(&cert2.delta, &(&cert.delta * 2u32));
                prop_assert!(verify_divisibility(&f, &cert2, 0..=40).is_clean());
            }
            Err(CertifyError::NotEligible(_)) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn dsl_round_trip(spec in random_spec()) {
        prop_assert_eq!(parse_spec(&write_spec(&spec)).unwrap(), spec);
    }
}

#[test]
fn catalog_specs_agree_between_paths() {
    for e in catalog::all() {
        let s = &e.spec;
        if fast_path_available(s).is_ok() {
            let n = 60.min(e.default_n_max);
            assert_eq!(evaluate(s, n).unwrap(), evaluate_fast(s, n).unwrap(), "{}", e.name);
        }
    }
}

#[test]
fn catalog_odes_have_zero_residual() {
    for e in catalog::all() {
        let Some(ode) = &e.spec.ode else { continue };
        let f = evaluate_auto(&e.spec, 40).unwrap();
        let r = f.ode_residual(ode).unwrap();
        assert!(r.is_zero(), "{}: {r}", e.name);
        assert!(r.order() > 20, "{}: residual order {}", e.name, r.order());
    }
}

#[test]
fn catalog_specs_round_trip_through_dsl() {
    // One write/parse pass folds `-(0)` into `0`; from then on the text is
    // a fixed point. The recurrence data must survive unchanged.
    for e in catalog::all() {
        let back = parse_spec(&write_spec(&e.spec)).unwrap();
        let text = write_spec(&back);
        assert_eq!(write_spec(&parse_spec(&text).unwrap()), text, "{}", e.name);
        let strip = |s: &RecurrenceSpec| RecurrenceSpec { ode: None, ..s.clone() };
        assert_eq!(strip(&back), strip(&e.spec), "{}", e.name);
    }
}

#[test]
fn large_sigma2_is_not_an_error() {
    let spec = catalog::by_name("painleve2").unwrap().spec;
    assert!(spec.sigma2 > 1);
    let f = evaluate(&spec, 1).unwrap();
    assert_eq!(f.order(), 2);
}

#[test]
fn shift_reproduces_every_negative_sigma_entry() {
    for e in catalog::all() {
        if e.spec.sigma1 >= 0 {
            assert_eq!(
                shift_to_nonnegative(&e.spec).unwrap_err(),
                ShiftError::AlreadyNonnegative(e.spec.sigma1)
            );
            continue;
        }
        let res = shift_to_nonnegative(&e.spec).unwrap();
        res.shifted_spec.validate().unwrap();
        // Naive evaluation of the k0 >= 3 entries is slow past n = 40.
        let n_max = if e.spec.k0 >= 3 { 40 } else { 100 };
        let f = evaluate(&e.spec, n_max).unwrap();
        let g = evaluate(&res.shifted_spec, n_max - res.offset).unwrap();
        assert_eq!(&f.coeffs()[res.offset..], g.coeffs(), "{}", e.name);
        assert_eq!(
            shift_to_nonnegative(&res.shifted_spec).unwrap_err(),
            ShiftError::AlreadyNonnegative(res.shifted_spec.sigma1)
        );
    }
}
