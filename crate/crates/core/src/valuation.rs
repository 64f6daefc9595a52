//! Prime utilities and p-adic valuations.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValuationError {
    #[error("{0} is not prime")]
    NotPrime(u64),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes `<= limit` (sieve of Eratosthenes).
pub fn primes_upto(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// `v_p(n!)` via Legendre's floor sum; `n!` is never formed.
pub fn legendre(p: u64, n: u64) -> Result<u64, ValuationError> {
    if !is_prime(p) {
        return Err(ValuationError::NotPrime(p));
    }
    Ok(legendre_unchecked(p, n))
}

/// Legendre's formula for callers that already know `p` is prime.
pub fn legendre_unchecked(p: u64, n: u64) -> u64 {
    let mut total = 0;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// `v_p(v)` for a nonzero unsigned big integer.
pub fn vp_biguint(p: u64, v: &BigUint) -> u64 {
    debug_assert!(!v.is_zero());
    let mut count = 0;
    let mut cur = v.clone();
    loop {
        let rem = &cur % p;
        if !rem.is_zero() {
            return count;
        }
        cur /= p;
        count += 1;
    }
}

pub fn vp_bigint(p: u64, v: &BigInt) -> u64 {
    vp_biguint(p, v.magnitude())
}

/// `v_p` of a rational; `None` stands for the valuation of zero (+infinity).
pub fn vp_rational(p: u64, r: &BigRational) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    Some(vp_bigint(p, r.numer()) as i64 - vp_bigint(p, r.denom()) as i64)
}

/// `v_p(v)` for a machine integer, `v != 0`.
pub fn vp_u64(p: u64, mut v: u64) -> u64 {
    debug_assert!(v != 0);
    let mut count = 0;
    while v.is_multiple_of(p) {
        v /= p;
        count += 1;
    }
    count
}

/// Smallest `e >= 0` with `p^e >= x`, i.e. `ceil(log_p x)` for `x >= 1`.
pub fn ceil_log(p: u64, x: u64) -> u32 {
    debug_assert!(p >= 2 && x >= 1);
    let mut e = 0;
    let mut pow: u128 = 1;
    while pow < x as u128 {
        pow *= p as u128;
        e += 1;
    }
    e
}

/// Splits `v` into its prime factors up to `bound` and the leftover cofactor.
pub fn trial_factor(v: &BigUint, primes: &[u64]) -> (Vec<(u64, u64)>, BigUint) {
    let mut rest = v.clone();
    let mut found = Vec::new();
    for &p in primes {
        if rest.bits() <= 1 {
            break;
        }
        let e = vp_biguint(p, &rest);
        if e > 0 {
            rest /= BigUint::from(p).pow(e as u32);
            found.push((p, e));
        }
    }
    (found, rest)
}

/// The integer `v` as `u64` if it fits.
pub fn small(v: &BigUint) -> Option<u64> {
    v.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorial;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(2, 10), Ok(8));
        assert_eq!(legendre(3, 10), Ok(4));
        assert_eq!(legendre(7, 0), Ok(0));
        assert_eq!(legendre(4, 10), Err(ValuationError::NotPrime(4)));
    }

    #[test]
    fn legendre_matches_factorisation() {
        for p in primes_upto(50) {
            for n in 0..=200u64 {
                assert_eq!(legendre_unchecked(p, n), vp_biguint(p, &factorial(n)), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn ceil_log_edges() {
        assert_eq!(ceil_log(2, 1), 0);
        assert_eq!(ceil_log(2, 3), 2);
        assert_eq!(ceil_log(2, 4), 2);
        assert_eq!(ceil_log(3, 5), 2);
        assert_eq!(ceil_log(7, 5), 1);
    }

    #[test]
    fn sieve() {
        assert_eq!(primes_upto(13), vec![2, 3, 5, 7, 11, 13]);
        assert!(primes_upto(1).is_empty());
        let (f, rest) = trial_factor(&BigUint::from(2u32 * 2 * 5 * 101), &[2, 3, 5, 7]);
        assert_eq!(f, vec![(2, 2), (5, 1)]);
        assert_eq!(rest, BigUint::from(101u32));
    }
}
