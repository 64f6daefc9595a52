//! Elementary series built from their closed-form coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RationalSeries;

fn from_fn(order: usize, f: impl Fn(usize) -> BigRational) -> RationalSeries {
    RationalSeries::new((0..order).map(f).collect())
}

/// `1/n!` for every `n < order`.
fn inverse_factorials(order: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(order);
    let mut fact = BigInt::one();
    for n in 0..order {
        if n > 0 {
            fact *= n;
        }
        out.push(BigRational::new(BigInt::one(), fact.clone()));
    }
    out
}

fn alternating(n: usize) -> BigInt {
    if n.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

pub fn exp(order: usize) -> RationalSeries {
    RationalSeries::new(inverse_factorials(order))
}

/// `log(1 + x)`.
pub fn log1p(order: usize) -> RationalSeries {
    from_fn(order, |n| {
        if n == 0 {
            BigRational::zero()
        } else {
            BigRational::new(alternating(n + 1), BigInt::from(n))
        }
    })
}

/// `log(1 + x) / x`.
pub fn log1p_over_x(order: usize) -> RationalSeries {
    from_fn(order, |n| BigRational::new(alternating(n), BigInt::from(n + 1)))
}

/// `(e^x - 1) / x`.
pub fn expm1_over_x(order: usize) -> RationalSeries {
    let inv = inverse_factorials(order + 1);
    RationalSeries::new(inv.into_iter().skip(1).collect())
}

pub fn sin(order: usize) -> RationalSeries {
    let inv = inverse_factorials(order);
    from_fn(order, |n| {
        if n % 2 == 1 {
            &inv[n] * alternating(n / 2)
        } else {
            BigRational::zero()
        }
    })
}

pub fn cos(order: usize) -> RationalSeries {
    let inv = inverse_factorials(order);
    from_fn(order, |n| {
        if n % 2 == 0 {
            &inv[n] * alternating(n / 2)
        } else {
            BigRational::zero()
        }
    })
}

/// The dilogarithm `sum x^n / n^2`.
pub fn li2(order: usize) -> RationalSeries {
    from_fn(order, |n| {
        if n == 0 {
            BigRational::zero()
        } else {
            BigRational::new(BigInt::one(), BigInt::from(n * n))
        }
    })
}

/// `1 / (1 - x)`.
pub fn geometric(order: usize) -> RationalSeries {
    from_fn(order, |_| BigRational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn pythagoras() {
        let s = sin(20);
        let c = cos(20);
        assert_eq!(&s.mul(&s) + &c.mul(&c), RationalSeries::one(20));
    }

    #[test]
    fn derivatives_close_up() {
        assert_eq!(exp(12).derivative(), exp(11));
        assert_eq!(sin(12).derivative(), cos(11));
        assert_eq!(
            log1p(12).derivative(),
            RationalSeries::one(11)
                .div(&RationalSeries::from_i64(&[1, 1], 11))
                .unwrap()
        );
    }

    #[test]
    fn shifted_forms() {
        assert_eq!(log1p(9).div_x_pow(1).unwrap(), log1p_over_x(8));
        assert_eq!(*expm1_over_x(4).coeff(3), rat(1, 24));
        assert_eq!(*li2(5).coeff(4), rat(1, 16));
    }
}
