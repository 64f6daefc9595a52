//! Dense univariate polynomials with integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `c[0] + c[1] X + c[2] X^2 + ...`, stored without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `u X + v`
    pub fn linear(u: i64, v: i64) -> Self {
        Self::from_i64(&[v, u])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    /// The polynomial `X -> self(X + c)`.
    pub fn shift(&self, c: i64) -> Poly {
        let c = BigInt::from(c);
        let mut out = Poly::zero();
        let x_plus_c = Poly::new(vec![c, BigInt::one()]);
        for coeff in self.coeffs.iter().rev() {
            out = &(&out * &x_plus_c) + &Poly::constant(coeff.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Exact division of every coefficient by `k`.
    pub fn div_exact(&self, k: &BigInt) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .map(|c| {
                    debug_assert!((c % k).is_zero());
                    c / k
                })
                .collect(),
        )
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        Poly::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    /// Bracketed coefficient list, lowest degree first: `[c0,c1,...]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Integer roots of a nonzero polynomial.
pub fn integer_roots(p: &Poly) -> Vec<BigInt> {
    let Some(lowest) = p.coeffs.iter().position(|c| !c.is_zero()) else {
        return Vec::new();
    };
    let mut roots = Vec::new();
    if lowest > 0 {
        roots.push(BigInt::zero());
    }
    let c0 = p.coeffs[lowest].abs();
    for d in divisors(&c0) {
        for cand in [d.clone(), -d] {
            if p.eval(&cand).is_zero() {
                roots.push(cand);
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

pub(crate) fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            out.push(n / &d);
        }
        d += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_and_eval() {
        // (X^2 + 1)(X + 2) evaluated at 3, and shifted by -1.
        let p = &Poly::from_i64(&[1, 0, 1]) * &Poly::linear(1, 2);
        assert_eq!(p.eval_i64(3), BigInt::from(50));
        let q = p.shift(-1);
        assert_eq!(q.eval_i64(4), BigInt::from(50));
        assert_eq!(Poly::from_i64(&[0, 0]).degree(), None);
    }

    #[test]
    fn roots_and_content() {
        let p = &Poly::linear(1, 1) * &Poly::linear(1, -3);
        assert_eq!(integer_roots(&p), vec![BigInt::from(-1), BigInt::from(3)]);
        assert!(integer_roots(&Poly::from_i64(&[1, 0, 1])).is_empty());
        assert_eq!(integer_roots(&Poly::from_i64(&[0, 2])), vec![BigInt::zero()]);
        assert_eq!(Poly::from_i64(&[4, -6, 10]).content(), BigInt::from(2));
        assert_eq!(Poly::from_i64(&[3, 1]).to_string(), "[3,1]");
    }
}
