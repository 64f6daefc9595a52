use da_denom_core::arith::factorial;
use da_denom_core::catalog;
use da_denom_core::certify::{derive_delta_nu, dn_divisor, verify_divisibility};
use da_denom_core::experiments::run_nonsplit_experiment;
use da_denom_core::recurrence::evaluate_fast;
use da_denom_core::valuation::{is_prime, legendre};
use da_denom_core::{BigUint, Exec};
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

/// v_p(n!) by dividing the expanded factorial.
fn direct_vp_factorial(p: u64, n: u64) -> u64 {
    let p = BigUint::from(p);
    let mut v = factorial(n);
    let mut k = 0;
    loop {
        let (q, r) = v.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        v = q;
        k += 1;
    }
}

#[test]
fn legendre_matches_direct_factorization() {
    for p in (2..=50).filter(|&p| is_prime(p)) {
        for n in 0..=200 {
            assert_eq!(legendre(p, n).unwrap(), direct_vp_factorial(p, n), "p = {p}, n = {n}");
        }
    }
}

#[test]
fn tangent_divisor_is_factorial_squared() {
    let spec = catalog::tangent().spec;
    for n in 1..=100 {
        let f = factorial(n as u64);
        assert_eq!(dn_divisor(&spec, n).unwrap().value(), &f * &f, "n = {n}");
    }
}

#[test]
fn ln_bound_is_nondecreasing() {
    for e in [catalog::tangent(), catalog::riccati_family(2)] {
        let cert = derive_delta_nu(&e.spec).unwrap();
        for n in 0..100 {
            assert!(cert.ln_bound(n) <= cert.ln_bound(n + 1), "{} n = {n}", e.name);
        }
    }
}

#[test]
fn dropping_a_prime_from_delta_breaks_riccati2() {
    // delta = 12 is needed for riccati(2): removing its 3 gives violations.
    let spec = catalog::riccati_family(2).spec;
    let mut cert = derive_delta_nu(&spec).unwrap();
    assert_eq!(cert.delta, BigUint::from(12u32));
    let f = evaluate_fast(&spec, 60).unwrap();
    assert!(verify_divisibility(&f, &cert, 0..=60).is_clean());
    cert.delta = BigUint::from(1u32);
    cert.nu = 1;
    assert!(!verify_divisibility(&f, &cert, 0..=60).is_clean());
}

/// ln of a big integer from its decimal digit count and leading digits.
fn ln_by_digits(v: &BigUint) -> f64 {
    let s = v.to_string();
    let lead = s.len().min(17);
    let mantissa: f64 = s[..lead].parse().unwrap();
    mantissa.ln() + (s.len() - lead) as f64 * std::f64::consts::LN_10
}

#[test]
fn log_dn_agrees_with_digit_count() {
    let r = run_nonsplit_experiment(200, Exec::Sequential).unwrap();
    let f = evaluate_fast(&catalog::nonsplit_sq().spec, 200).unwrap();
    for rec in &r.records {
        let want = ln_by_digits(f.coeff(rec.n).denom().magnitude());
        let got: f64 = rec.log_dn.parse().unwrap();
        let tol = 1e-8 * want.abs().max(1.0);
        assert!((got - want).abs() <= tol, "n = {}: {got} vs {want}", rec.n);
    }
}

proptest! {
    #[test]
    fn legendre_is_additive_over_digits(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), n in 0u64..5000) {
        // v_p(n!) = (n - s_p(n)) / (p - 1).
        let mut digits = 0;
        let mut m = n;
        while m > 0 {
            digits += m % p;
            m /= p;
        }
        prop_assert_eq!(legendre(p, n).unwrap(), (n - digits) / (p - 1));
    }

    #[test]
    fn ln_factorial_tracks_big_factorial(m in 2u64..400) {
        let exact = ln_by_digits(&factorial(m));
        let approx = da_denom_core::certify::ln_factorial(m);
        prop_assert!((exact - approx).abs() <= 1e-9 * exact);
    }
}
