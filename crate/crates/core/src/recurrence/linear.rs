//! Recurrences of order one in the convolution sense (`k0 = 1`) from linear
//! recurrences, and the `m`-th root construction on top of them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{CoefficientRule, Denominator, RecurrenceSpec, SeparableTerm, ValidationError};
use crate::poly::{divisors, Poly};
use crate::series::{RationalSeries, SeriesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinearError {
    #[error("leading polynomial {0} does not split into the given linear factors over Q")]
    NotSplit(String),
    #[error("branch^m does not equal f_0")]
    BranchMismatch,
    #[error("f_0 must be nonzero")]
    ZeroConstantTerm,
    #[error("root index must be at least 2")]
    BadRootIndex,
    #[error("recurrence needs at least one lower coefficient polynomial")]
    EmptyRecurrence,
    #[error("need {needed} terms of f, only {available} supplied")]
    InsufficientTerms { needed: usize, available: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// `C * prod (u_i X + v_i)` with `u_i > 0` and `gcd(u_i, v_i) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitFactorization {
    pub c: BigInt,
    pub factors: Vec<(i64, i64)>,
}

impl SplitFactorization {
    pub fn poly(&self) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.c.clone()), |acc, &(u, v)| {
                &acc * &Poly::linear(u, v)
            })
    }

    fn is_normalised(&self) -> bool {
        self.factors.iter().all(|&(u, v)| u > 0 && u.gcd(&v) == 1)
    }
}

/// Factors `p` into rational linear factors, if it splits over `Q`.
pub fn split_over_q(p: &Poly) -> Option<SplitFactorization> {
    if p.is_zero() {
        return None;
    }
    let mut rest = p.clone();
    let mut factors = Vec::new();
    while rest.degree()? > 0 {
        let cs = rest.coeffs();
        if cs[0].is_zero() {
            factors.push((1, 0));
            rest = Poly::new(cs[1..].to_vec());
            continue;
        }
        let lead = cs.last().expect("nonzero").abs();
        let c0 = cs[0].abs();
        let (u, v) = find_rational_root(&rest, &c0, &lead)?;
        rest = divide_linear(&rest, u, v)?;
        factors.push((u, v));
    }
    factors.sort();
    Some(SplitFactorization {
        c: rest.coeffs()[0].clone(),
        factors,
    })
}

/// A factor `u X + v` of `p` (root `-v/u`), by the rational root test.
fn find_rational_root(p: &Poly, c0: &BigInt, lead: &BigInt) -> Option<(i64, i64)> {
    let deg = p.degree()? as u32;
    for q in divisors(lead) {
        for r in divisors(c0) {
            if !q.gcd(&r).is_one() {
                continue;
            }
            for num in [r.clone(), -r.clone()] {
                // q^deg p(num/q) as an integer
                let val = p.coeffs().iter().enumerate().fold(BigInt::zero(), |acc, (i, c)| {
                    acc + c * num_traits::pow(num.clone(), i) * num_traits::pow(q.clone(), (deg as usize) - i)
                });
                if val.is_zero() {
                    return Some((q.to_i64()?, (-num).to_i64()?));
                }
            }
        }
    }
    None
}

/// Exact quotient `p / (u X + v)`.
fn divide_linear(p: &Poly, u: i64, v: i64) -> Option<Poly> {
    let (u, v) = (BigInt::from(u), BigInt::from(v));
    let mut r: Vec<BigInt> = p.coeffs().to_vec();
    let d = r.len() - 1;
    let mut q = vec![BigInt::zero(); d];
    for i in (1..=d).rev() {
        let (qq, rem) = r[i].div_rem(&u);
        if !rem.is_zero() {
            return None;
        }
        r[i - 1] -= &qq * &v;
        q[i - 1] = qq;
    }
    r[0].is_zero().then(|| Poly::new(q))
}

fn resolve_split(leading: &Poly, given: Option<&SplitFactorization>) -> Result<SplitFactorization, LinearError> {
    match given {
        Some(f) if f.is_normalised() && f.poly() == *leading => Ok(f.clone()),
        Some(_) => Err(LinearError::NotSplit(leading.to_string())),
        None => split_over_q(leading).ok_or_else(|| LinearError::NotSplit(leading.to_string())),
    }
}

/// `f_{n+1} = (1 / a_m(n)) sum_{j=0}^{m-1} a_j(n) f_{n-j}` for `n >= start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRecurrence {
    /// `a_0, ..., a_{m-1}, a_m`, the last one leading.
    pub coeffs: Vec<Poly>,
    pub initial: Vec<BigRational>,
    pub start: usize,
}

/// Rewrites a linear recurrence as a spec with `k0 = 1`.
///
/// Without an explicit factorization of the leading polynomial the rational
/// root test is tried.
pub fn linear_to_spec(
    lin: &LinearRecurrence,
    factorization: Option<&SplitFactorization>,
) -> Result<RecurrenceSpec, LinearError> {
    let (leading, lower) = lin.coeffs.split_last().ok_or(LinearError::EmptyRecurrence)?;
    if lower.is_empty() {
        return Err(LinearError::EmptyRecurrence);
    }
    let split = resolve_split(leading, factorization)?;
    let rules = lower
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(j, p)| CoefficientRule::new(j as i64, 1, vec![SeparableTerm::plain(p.clone(), vec![Poly::one()])]))
        .collect();
    Ok(RecurrenceSpec::new(
        split.c,
        Denominator::Split {
            a: split.factors.iter().map(|f| f.0).collect(),
            b: split.factors.iter().map(|f| f.1).collect(),
        },
        0,
        lower.len() as i64 - 1,
        1,
        lin.start,
        rules,
        lin.initial.clone(),
    )?)
}

/// Spec for `g = f^(1/m)` with `g_0 = g0`, where `f` satisfies
/// `sum_{k=0}^d p_k(n) f_{n+k} = 0` for `n >= valid_from`.
///
/// From `f_n = m g_0^(m-1) g_n + (products of lower g_j)` one gets
///
/// ```text
/// m g0^(m-1) p_d(n) g_{n+d} = - sum_{k<d} p_k(n) sum_{j_1+..+j_m = n+k} g_j1..g_jm
///                              - p_d(n) sum_{j_1+..+j_m = n+d, j_t < n+d} g_j1..g_jm
/// ```
///
/// which after `n' = n + d - 1` has `sigma` running from `-1` to `d - 1`.
/// The denominator of `g0^(m-1)` moves into the rules so that they stay
/// integral.
pub fn root_recurrence(
    p: &[Poly],
    valid_from: usize,
    m: u32,
    g0: &BigRational,
    f: &RationalSeries,
    factorization: Option<&SplitFactorization>,
) -> Result<RecurrenceSpec, LinearError> {
    if m < 2 {
        return Err(LinearError::BadRootIndex);
    }
    let (leading, lower) = p.split_last().ok_or(LinearError::EmptyRecurrence)?;
    if lower.is_empty() {
        return Err(LinearError::EmptyRecurrence);
    }
    if f.order() == 0 || f.coeff(0).is_zero() {
        return Err(LinearError::ZeroConstantTerm);
    }
    if num_traits::pow(g0.clone(), m as usize) != *f.coeff(0) {
        return Err(LinearError::BranchMismatch);
    }
    let split = resolve_split(leading, factorization)?;
    let d = lower.len() as i64;
    let shift = d - 1;

    let g_pow = num_traits::pow(g0.clone(), m as usize - 1);
    let c = &split.c * BigInt::from(m) * g_pow.numer();
    let rule_scale = -g_pow.denom().clone();

    let a: Vec<i64> = split.factors.iter().map(|f| f.0).collect();
    let b: Vec<i64> = split.factors.iter().map(|&(u, v)| v - u * shift).collect();
    let mut start = valid_from + shift as usize;
    for (&ai, &bi) in a.iter().zip(&b) {
        if bi % ai == 0 && -bi / ai >= start as i64 {
            start = (-bi / ai) as usize + 1;
        }
    }

    let ones = vec![Poly::one(); m as usize];
    let mut rules = Vec::new();
    for (k, pk) in lower.iter().enumerate() {
        if pk.is_zero() {
            continue;
        }
        rules.push(CoefficientRule::new(
            d - 1 - k as i64,
            m as usize,
            vec![SeparableTerm::plain(pk.shift(-shift).scale(&rule_scale), ones.clone())],
        ));
    }
    rules.push(CoefficientRule::new(
        -1,
        m as usize,
        vec![SeparableTerm::plain(leading.shift(-shift).scale(&rule_scale), ones)],
    ));

    if f.order() < start + 1 {
        return Err(LinearError::InsufficientTerms {
            needed: start + 1,
            available: f.order(),
        });
    }
    let g = f.truncate(start + 1).mth_root(m, g0)?;
    Ok(RecurrenceSpec::new(
        c,
        Denominator::Split { a, b },
        -1,
        d - 1,
        m as usize,
        start,
        rules,
        g.into_coeffs(),
    )?)
}
