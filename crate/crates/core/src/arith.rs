//! Small exact-arithmetic helpers shared by the other modules.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    a.lcm(b).abs()
}

/// Least common denominator of a list of rationals (1 for an empty list).
pub fn common_denominator<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a BigRational>,
{
    values.into_iter().fold(BigInt::one(), |acc, v| lcm(&acc, v.denom()))
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// lcm{1, 2, ..., n}.
pub fn lcm_upto(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k)))
}

/// Exact `m`-th root of a non-negative integer, if there is one.
pub fn exact_root(v: &BigUint, m: u32) -> Option<BigUint> {
    let r = num_integer::Roots::nth_root(v, m);
    if num_traits::pow(r.clone(), m as usize) == *v {
        Some(r)
    } else {
        None
    }
}

/// Natural logarithm of a positive big integer.
///
/// Computed as `bits * ln 2 + ln(top 64 bits as a mantissa)`, which keeps
/// roughly 15 significant digits regardless of the size of `v`.
pub fn ln_biguint(v: &BigUint) -> f64 {
    assert!(!v.is_zero(), "logarithm of zero");
    ln_shifted(v, v.bits())
}

fn ln_shifted(v: &BigUint, bits: u64) -> f64 {
    if bits <= 64 {
        return (v.to_u64().expect("fits in u64") as f64).ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().expect("64 top bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Converts a rational to the nearest `f64`, also for numerators and
/// denominators far outside the `f64` range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    // Scale so that the integer quotient carries ~64 significant bits.
    let shift = 64i64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mant = q.to_f64().unwrap_or(f64::INFINITY);
    sign * mant * (2f64).powi(-shift as i32)
}

/// Fixed-point decimal rendering of a rational with `digits` digits after
/// the point, truncated toward zero.
pub fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (r.numer() * &scale) / r.denom();
    let neg = scaled.sign() == Sign::Minus || (scaled.is_zero() && r.is_negative());
    let mag = scaled.magnitude().to_string();
    let padded = if mag.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - mag.len()), mag)
    } else {
        mag
    };
    let (head, tail) = padded.split_at(padded.len() - digits);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(head);
    if digits > 0 {
        out.push('.');
        out.push_str(tail);
    }
    out
}

/// Parses `p/q` or a plain integer.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
