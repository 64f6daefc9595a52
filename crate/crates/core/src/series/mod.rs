//! Truncated power series over big rationals.
//!
//! A [`RationalSeries`] of order `n` knows the coefficients of `x^0 ..
//! x^(n-1)` exactly and nothing beyond. Every binary operation returns a
//! series whose order is the smallest order it can vouch for.

mod elementary;
mod expr;
mod kepler;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use elementary::{cos, exp, expm1_over_x, geometric, li2, log1p, log1p_over_x, sin};
pub use expr::{parse_equation, Expr, MAX_DERIVATIVE};
pub use kepler::fixed_point_solve_kepler;

use crate::arith::exact_root;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("divisor has zero constant term")]
    DivisionByNonUnit,
    #[error("inner series of a composition must have zero constant term")]
    CompositionNonZeroConstant,
    #[error("series is not invertible for composition (needs a0 = 0 and a1 != 0)")]
    ReversionNotInvertible,
    #[error("branch does not match: branch^{m} != constant term")]
    BranchMismatch { m: u32 },
    #[error("constant term has no rational {m}-th root")]
    NoRationalRoot { m: u32 },
    #[error("constant term of a root must be nonzero")]
    ZeroConstantTerm,
    #[error("series order {order} cannot support derivatives of order {needed}")]
    OrderTooLow { order: usize, needed: usize },
    #[error("sin M and cos M do not lie on the unit circle")]
    NotOnUnitCircle,
    #[error("equation: {0}")]
    Equation(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
}

impl RationalSeries {
    /// A series whose order is `coeffs.len()`.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        RationalSeries { coeffs }
    }

    pub fn from_i64(coeffs: &[i64], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (i, &c) in coeffs.iter().enumerate().take(order) {
            s.coeffs[i] = BigRational::from_integer(BigInt::from(c));
        }
        s
    }

    pub fn from_rationals(coeffs: &[BigRational], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (i, c) in coeffs.iter().enumerate().take(order) {
            s.coeffs[i] = c.clone();
        }
        s
    }

    pub fn zero(order: usize) -> Self {
        RationalSeries {
            coeffs: vec![BigRational::zero(); order],
        }
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    /// The series `x`.
    pub fn x(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    /// Truncation order (exclusive).
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        RationalSeries {
            coeffs: self.coeffs[..order].to_vec(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        RationalSeries {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// `x^k * self`; the order grows by `k`.
    pub fn mul_x_pow(&self, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        RationalSeries { coeffs }
    }

    /// `self / x^k`, valid when the first `k` coefficients vanish.
    pub fn div_x_pow(&self, k: usize) -> Option<Self> {
        if self.coeffs.len() < k || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(RationalSeries {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Formal derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        RationalSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        }
    }

    /// Cauchy product, truncated to the smaller order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let mut out = vec![BigRational::zero(); order];
        for (i, a) in self.coeffs.iter().take(order).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(order - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        RationalSeries { coeffs: out }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self / rhs`, requiring a nonzero constant term in `rhs`.
    pub fn div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        let order = self.order().min(rhs.order());
        if order == 0 {
            return Ok(Self::zero(0));
        }
        let b0 = &rhs.coeffs[0];
        if b0.is_zero() {
            return Err(SeriesError::DivisionByNonUnit);
        }
        let inv_b0 = b0.recip();
        let mut q: Vec<BigRational> = Vec::with_capacity(order);
        for n in 0..order {
            let mut acc = self.coeffs[n].clone();
            for k in 1..=n {
                let b = &rhs.coeffs[k];
                if !b.is_zero() && !q[n - k].is_zero() {
                    acc -= b * &q[n - k];
                }
            }
            q.push(acc * &inv_b0);
        }
        Ok(RationalSeries { coeffs: q })
    }

    /// `outer(inner(x))` by Horner evaluation in the series ring.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self, SeriesError> {
        let order = outer.order().min(inner.order());
        if order == 0 {
            return Ok(Self::zero(0));
        }
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::CompositionNonZeroConstant);
        }
        let inner = inner.truncate(order);
        let mut acc = Self::zero(order);
        for c in outer.coeffs[..order].iter().rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Compositional inverse via Lagrange inversion:
    /// `[x^n] rev = (1/n) [w^(n-1)] (w / a(w))^n`.
    pub fn reverse(&self) -> Result<Self, SeriesError> {
        let order = self.order();
        if order < 2 || !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(SeriesError::ReversionNotInvertible);
        }
        // h = w / a(w) has order - 1 known coefficients.
        let a_over_w = self.div_x_pow(1).expect("a0 = 0");
        let h = Self::one(order - 1).div(&a_over_w)?;
        let mut out = Self::zero(order);
        let mut h_pow = Self::one(order - 1);
        for n in 1..order {
            h_pow = h_pow.mul(&h);
            out.coeffs[n] = h_pow.coeffs[n - 1].clone() / BigInt::from(n);
        }
        Ok(out)
    }

    /// `self^(1/m)` with constant term `branch`.
    ///
    /// Uses the power recurrence `n a0 g_n = sum_{k=1}^n ((1/m + 1) k - n) a_k g_(n-k)`.
    pub fn mth_root(&self, m: u32, branch: &BigRational) -> Result<Self, SeriesError> {
        assert!(m >= 1, "root index must be positive");
        let order = self.order();
        if order == 0 {
            return Ok(Self::zero(0));
        }
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        if num_traits::pow(branch.clone(), m as usize) != *a0 {
            return Err(SeriesError::BranchMismatch { m });
        }
        let alpha_plus_one = BigRational::new(BigInt::from(m + 1), BigInt::from(m));
        let inv_a0 = a0.recip();
        let mut g: Vec<BigRational> = Vec::with_capacity(order);
        g.push(branch.clone());
        for n in 1..order {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                let a = &self.coeffs[k];
                if a.is_zero() || g[n - k].is_zero() {
                    continue;
                }
                let w = &alpha_plus_one * BigInt::from(k) - BigRational::from_integer(BigInt::from(n));
                acc += w * a * &g[n - k];
            }
            g.push(acc * &inv_a0 / BigInt::from(n));
        }
        Ok(RationalSeries { coeffs: g })
    }

    /// `mth_root` with the branch chosen automatically: the positive rational
    /// root of the constant term (or the negative one for odd `m` and a
    /// negative constant term).
    pub fn mth_root_auto(&self, m: u32) -> Result<Self, SeriesError> {
        let a0 = self.coeffs.first().ok_or(SeriesError::ZeroConstantTerm)?;
        if a0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        if a0.is_negative() && m.is_multiple_of(2) {
            return Err(SeriesError::NoRationalRoot { m });
        }
        let num = exact_root(a0.numer().magnitude(), m).ok_or(SeriesError::NoRationalRoot { m })?;
        let den = exact_root(a0.denom().magnitude(), m).ok_or(SeriesError::NoRationalRoot { m })?;
        let mut branch = BigRational::new(BigInt::from(num), BigInt::from(den));
        if a0.is_negative() {
            branch = -branch;
        }
        self.mth_root(m, &branch)
    }
}

impl Add for &RationalSeries {
    type Output = RationalSeries;
    fn add(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.order().min(rhs.order());
        RationalSeries {
            coeffs: (0..order).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub for &RationalSeries {
    type Output = RationalSeries;
    fn sub(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.order().min(rhs.order());
        RationalSeries {
            coeffs: (0..order).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
        }
    }
}

impl Neg for &RationalSeries {
    type Output = RationalSeries;
    fn neg(self) -> RationalSeries {
        RationalSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &RationalSeries {
    type Output = RationalSeries;
    fn mul(self, rhs: &RationalSeries) -> RationalSeries {
        RationalSeries::mul(self, rhs)
    }
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    fn series(coeffs: &[(i64, i64)], order: usize) -> RationalSeries {
        let v: Vec<_> = coeffs.iter().map(|&(n, d)| rat(n, d)).collect();
        RationalSeries::from_rationals(&v, order)
    }

    #[test]
    fn mul_examples() {
        let a = RationalSeries::from_i64(&[1, 1], 3);
        let b = RationalSeries::from_i64(&[1, -1], 3);
        assert_eq!(a.mul(&b), RationalSeries::from_i64(&[1, 0, -1], 3));

        let g = geometric(10);
        let one_minus_x = RationalSeries::from_i64(&[1, -1], 10);
        assert_eq!(g.mul(&one_minus_x), RationalSeries::one(10));

        let tan = sin(6).div(&cos(6)).unwrap();
        assert_eq!(tan.mul(&tan).coeff(3), &rat_int(0));
        assert_eq!(tan.mul(&tan).coeff(4), &rat(2, 3));
    }

    #[test]
    fn div_examples() {
        let greg = RationalSeries::one(5).div(&log1p_over_x(5)).unwrap();
        assert_eq!(greg, series(&[(1, 1), (1, 2), (-1, 12), (1, 24), (-19, 720)], 5));

        let bern = RationalSeries::one(3).div(&expm1_over_x(3)).unwrap();
        assert_eq!(bern, series(&[(1, 1), (-1, 2), (1, 12)], 3));

        let a = series(&[(3, 7), (1, 1), (-2, 5)], 3);
        assert_eq!(a.div(&RationalSeries::one(3)).unwrap(), a);
        assert_eq!(a.div(&RationalSeries::x(3)), Err(SeriesError::DivisionByNonUnit));
    }

    #[test]
    fn compose_examples() {
        let id = RationalSeries::compose(&exp(10), &log1p(10)).unwrap();
        assert_eq!(id, RationalSeries::from_i64(&[1, 1], 10));

        let sq = RationalSeries::from_i64(&[0, 0, 1], 6);
        let inner = RationalSeries::from_i64(&[0, 1, 1], 6);
        assert_eq!(
            RationalSeries::compose(&sq, &inner).unwrap(),
            RationalSeries::from_i64(&[0, 0, 1, 2, 1], 6)
        );

        let ss = RationalSeries::compose(&sin(4), &sin(4)).unwrap();
        assert_eq!(ss.coeff(3), &rat(-1, 3));

        assert_eq!(
            RationalSeries::compose(&sin(4), &cos(4)),
            Err(SeriesError::CompositionNonZeroConstant)
        );
    }

    #[test]
    fn reverse_examples() {
        let l = li2(7).reverse().unwrap();
        assert_eq!(
            l,
            series(
                &[
                    (0, 1),
                    (1, 1),
                    (-1, 4),
                    (1, 72),
                    (-1, 576),
                    (-31, 86400),
                    (-149, 1036800)
                ],
                7
            )
        );
        let x = RationalSeries::x(8);
        assert_eq!(x.reverse().unwrap(), x);
        // x/(1-x) <-> x/(1+x)
        let mobius = geometric(8).mul_x_pow(1).truncate(8);
        let inv: Vec<i64> = (0..8)
            .map(|i| {
                if i == 0 {
                    0
                } else if i % 2 == 1 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        assert_eq!(mobius.reverse().unwrap(), RationalSeries::from_i64(&inv, 8));
        assert_eq!(
            RationalSeries::one(4).reverse(),
            Err(SeriesError::ReversionNotInvertible)
        );
    }

    #[test]
    fn root_examples() {
        let sq = RationalSeries::from_i64(&[1, 2, 1], 8);
        assert_eq!(
            sq.mth_root(2, &rat_int(1)).unwrap(),
            RationalSeries::from_i64(&[1, 1], 8)
        );
        let cube = RationalSeries::from_i64(&[1, 3, 3, 1], 8);
        assert_eq!(
            cube.mth_root(3, &rat_int(1)).unwrap(),
            RationalSeries::from_i64(&[1, 1], 8)
        );
        assert_eq!(sq.mth_root(2, &rat_int(2)), Err(SeriesError::BranchMismatch { m: 2 }));
        let four = RationalSeries::from_i64(&[4, 4, 1], 5);
        assert_eq!(four.mth_root_auto(2).unwrap(), RationalSeries::from_i64(&[2, 1], 5));
        let two = RationalSeries::from_i64(&[2, 1], 5);
        assert_eq!(two.mth_root_auto(2), Err(SeriesError::NoRationalRoot { m: 2 }));
        let neg = RationalSeries::from_i64(&[-8], 3);
        assert_eq!(neg.mth_root_auto(3).unwrap(), RationalSeries::from_i64(&[-2], 3));
    }

    #[test]
    fn binomial_root_of_geometric() {
        let g = geometric(6).mth_root(2, &rat_int(1)).unwrap();
        assert_eq!(g.coeff(1), &rat(1, 2));
        assert_eq!(g.coeff(2), &rat(3, 8));
    }

    #[test]
    fn display_is_readable() {
        let s = series(&[(1, 1), (0, 1), (-1, 2)], 4);
        assert_eq!(s.to_string(), "1 + (-1/2)x^2 + O(x^4)");
    }
}
