use da_denom_core::{BigInt, BigRational, RationalSeries};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

const ORDER: usize = 20;

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=7).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn series() -> impl Strategy<Value = RationalSeries> {
    prop::collection::vec(small_rational(), ORDER).prop_map(RationalSeries::new)
}

/// A series with the given leading coefficients and random tail.
fn series_with_head(head: Vec<BigRational>) -> impl Strategy<Value = RationalSeries> {
    prop::collection::vec(small_rational(), ORDER - head.len()).prop_map(move |tail| {
        let mut c = head.clone();
        c.extend(tail);
        RationalSeries::new(c)
    })
}

fn reduced(s: &RationalSeries) -> bool {
    s.coeffs()
        .iter()
        .all(|c| c.denom().is_positive() && c.numer().gcd(c.denom()).is_one())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mul_commutes(a in series(), b in series()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }

    #[test]
    fn mul_associates(a in series(), b in series(), c in series()) {
        let left = a.mul(&b).mul(&c);
        prop_assert_eq!(&left, &a.mul(&b.mul(&c)));
        prop_assert!(reduced(&left));
    }

    #[test]
    fn div_undoes_mul(a in series(), b in series(), b0 in small_rational()) {
        prop_assume!(!b0.is_zero());
        let mut bc = b.coeffs().to_vec();
        bc[0] = b0;
        let b = RationalSeries::new(bc);
        let q = a.mul(&b).div(&b).unwrap();
        prop_assert_eq!(&q, &a);
        prop_assert!(reduced(&q));
    }

    #[test]
    fn reverse_is_compositional_inverse(
        a1 in small_rational(),
        tail in prop::collection::vec(small_rational(), ORDER - 2),
    ) {
        prop_assume!(!a1.is_zero());
        let mut c = vec![BigRational::zero(), a1];
        c.extend(tail);
        let a = RationalSeries::new(c);
        let r = a.reverse().unwrap();
        prop_assert_eq!(RationalSeries::compose(&r, &a).unwrap(), RationalSeries::x(ORDER));
        prop_assert_eq!(RationalSeries::compose(&a, &r).unwrap(), RationalSeries::x(ORDER));
        prop_assert!(reduced(&r));
    }

    #[test]
    fn root_to_the_m_is_identity(a in series_with_head(vec![BigRational::one()]), m in 2u32..=4) {
        let r = a.mth_root(m, &BigRational::one()).unwrap();
        prop_assert_eq!(r.pow(m), a);
    }

    #[test]
    fn rational_root_branch(m in 2u32..=3, base in 1i64..=4, tail in series()) {
        // a_0 = (base/2)^m has the rational branch base/2.
        let b = BigRational::new(BigInt::from(base), BigInt::from(2));
        let mut c = tail.coeffs().to_vec();
        c[0] = num_traits::pow(b.clone(), m as usize);
        let a = RationalSeries::new(c);
        let r = a.mth_root(m, &b).unwrap();
        prop_assert_eq!(r.coeff(0), &b);
        prop_assert_eq!(r.pow(m), a);
    }
}
