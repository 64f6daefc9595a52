//! Nonlinear convolution recurrences
//!
//! ```text
//! f_{n+1} = 1 / (C * prod_i (a_i n + b_i))
//!           * sum_{sigma, k} sum_{j_1 + ... + j_k = n - sigma, 0 <= j_t <= n}
//!                 P_{sigma,k}(n, j_1, ..., j_k) f_{j_1} ... f_{j_k}        (n >= N)
//! ```
//!
//! with each `P_{sigma,k}` a sum of [`SeparableTerm`]s. A recurrence may
//! instead carry an arbitrary integer polynomial `M(n)` in place of the
//! product of linear factors ([`Denominator::Poly`]); such specs evaluate
//! normally but are outside the reach of the denominator theorem.

mod dsl;
mod engine;
mod linear;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use dsl::{parse_spec, write_spec, ParseError, SpecError};
pub(crate) use engine::step_from_prefix;
pub use engine::{evaluate, evaluate_fast, fast_path_available, EvalError};
pub use linear::{linear_to_spec, root_recurrence, split_over_q, LinearError, LinearRecurrence, SplitFactorization};

use crate::arith::common_denominator;
use crate::poly::{integer_roots, Poly};
use crate::series::Expr;

/// One separable piece of a coefficient polynomial:
/// `n_poly(n) * prod_t slot_polys[t](j_t) * prod_t [j_t <= n - guards[t]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeparableTerm {
    pub n_poly: Poly,
    pub slot_polys: Vec<Poly>,
    /// `Some(u)` encodes the guard `j_t <= n - u`; `None` leaves only `j_t <= n`.
    pub guards: Vec<Option<u64>>,
}

impl SeparableTerm {
    pub fn new(n_poly: Poly, slot_polys: Vec<Poly>, guards: Vec<Option<u64>>) -> Self {
        SeparableTerm {
            n_poly,
            slot_polys,
            guards,
        }
    }

    /// A term without guards.
    pub fn plain(n_poly: Poly, slot_polys: Vec<Poly>) -> Self {
        let k = slot_polys.len();
        SeparableTerm::new(n_poly, slot_polys, vec![None; k])
    }

    /// `c` times the all-ones slots of arity `k`.
    pub fn constant(c: i64, k: usize) -> Self {
        SeparableTerm::plain(Poly::from_i64(&[c]), vec![Poly::one(); k])
    }

    pub fn k(&self) -> usize {
        self.slot_polys.len()
    }

    /// The guard on slot `t` once the ones implied by `j_1 + ... + j_k = n - sigma`
    /// are dropped: with `sigma >= u`, `j_t <= n - sigma <= n - u` always holds.
    pub fn effective_guard(&self, t: usize, sigma: i64) -> Option<u64> {
        self.guards[t].filter(|&u| (u as i64) > sigma)
    }

    pub fn has_effective_guards(&self, sigma: i64) -> bool {
        (0..self.k()).any(|t| self.effective_guard(t, sigma).is_some())
    }

    /// The term with `n_poly` multiplied by `m`.
    pub fn scaled(&self, m: &BigInt) -> Self {
        SeparableTerm {
            n_poly: self.n_poly.scale(m),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientRule {
    pub sigma: i64,
    pub k: usize,
    pub terms: Vec<SeparableTerm>,
}

impl CoefficientRule {
    pub fn new(sigma: i64, k: usize, terms: Vec<SeparableTerm>) -> Self {
        CoefficientRule { sigma, k, terms }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Denominator {
    /// `prod_i (a_i n + b_i)`.
    Split { a: Vec<i64>, b: Vec<i64> },
    /// An arbitrary `M(n)`.
    Poly(Poly),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceSpec {
    pub c: BigInt,
    pub denominator: Denominator,
    pub sigma1: i64,
    pub sigma2: i64,
    pub k0: usize,
    /// `N`: the recurrence gives `f_{n+1}` for `n >= N`.
    pub start: usize,
    pub rules: BTreeMap<(i64, usize), CoefficientRule>,
    /// `f_0 .. f_N`.
    pub initial: Vec<BigRational>,
    /// Differential equation the series is expected to satisfy, if known.
    pub ode: Option<Expr>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TheoremEligibility {
    pub nonneg_sigma: bool,
    pub start_condition: bool,
    pub split: bool,
}

impl TheoremEligibility {
    pub fn eligible(&self) -> bool {
        self.nonneg_sigma && self.start_condition && self.split
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("C must be nonzero")]
    ZeroC,
    #[error("a has {a} entries but b has {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("a_{i} = {value} must be positive")]
    NonPositiveA { i: usize, value: i64 },
    #[error("gcd(a_{i}, b_{i}) = gcd({a}, {b}) != 1")]
    NotCoprime { i: usize, a: i64, b: i64 },
    #[error("factor {a} n + {b} vanishes at n = {n} >= N")]
    VanishingFactor { a: i64, b: i64, n: i64 },
    #[error("denominator polynomial vanishes at n = {n} >= N")]
    VanishingPolyDenominator { n: BigInt },
    #[error("denominator polynomial is zero")]
    ZeroPolyDenominator,
    #[error("sigma1 = {sigma1} exceeds sigma2 = {sigma2}")]
    SigmaRange { sigma1: i64, sigma2: i64 },
    #[error("k0 must be positive")]
    ZeroK0,
    #[error("rule (sigma={sigma}, k={k}) lies outside sigma1..sigma2 x 1..k0")]
    RuleOutOfRange { sigma: i64, k: usize },
    #[error("rule keyed (sigma={sigma}, k={k}) is labelled (sigma={label_sigma}, k={label_k})")]
    RuleKeyMismatch {
        sigma: i64,
        k: usize,
        label_sigma: i64,
        label_k: usize,
    },
    #[error("a term of rule (sigma={sigma}, k={k}) has {slots} slot polynomials and {guards} guards")]
    SlotArity {
        sigma: i64,
        k: usize,
        slots: usize,
        guards: usize,
    },
    #[error("expected N + 1 = {expected} initial values, found {found}")]
    InitialLength { expected: usize, found: usize },
}

impl RecurrenceSpec {
    /// Builds a spec and checks every invariant.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        c: BigInt,
        denominator: Denominator,
        sigma1: i64,
        sigma2: i64,
        k0: usize,
        start: usize,
        rules: Vec<CoefficientRule>,
        initial: Vec<BigRational>,
    ) -> Result<Self, ValidationError> {
        let spec = RecurrenceSpec {
            c,
            denominator,
            sigma1,
            sigma2,
            k0,
            start,
            rules: rules.into_iter().map(|r| ((r.sigma, r.k), r)).collect(),
            initial,
            ode: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_ode(mut self, ode: Expr) -> Self {
        self.ode = Some(ode);
        self
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.c.is_zero() {
            return Err(ValidationError::ZeroC);
        }
        match &self.denominator {
            Denominator::Split { a, b } => {
                if a.len() != b.len() {
                    return Err(ValidationError::LengthMismatch { a: a.len(), b: b.len() });
                }
                for (i, (&ai, &bi)) in a.iter().zip(b).enumerate() {
                    if ai <= 0 {
                        return Err(ValidationError::NonPositiveA { i: i + 1, value: ai });
                    }
                    if ai.gcd(&bi) != 1 {
                        return Err(ValidationError::NotCoprime { i: i + 1, a: ai, b: bi });
                    }
                    if bi % ai == 0 && -bi / ai >= self.start as i64 {
                        return Err(ValidationError::VanishingFactor {
                            a: ai,
                            b: bi,
                            n: -bi / ai,
                        });
                    }
                }
            }
            Denominator::Poly(m) => {
                if m.is_zero() {
                    return Err(ValidationError::ZeroPolyDenominator);
                }
                if let Some(r) = integer_roots(m).into_iter().find(|r| *r >= BigInt::from(self.start)) {
                    return Err(ValidationError::VanishingPolyDenominator { n: r });
                }
            }
        }
        if self.sigma1 > self.sigma2 {
            return Err(ValidationError::SigmaRange {
                sigma1: self.sigma1,
                sigma2: self.sigma2,
            });
        }
        if self.k0 == 0 {
            return Err(ValidationError::ZeroK0);
        }
        for (&(sigma, k), rule) in &self.rules {
            if rule.sigma != sigma || rule.k != k {
                return Err(ValidationError::RuleKeyMismatch {
                    sigma,
                    k,
                    label_sigma: rule.sigma,
                    label_k: rule.k,
                });
            }
            if sigma < self.sigma1 || sigma > self.sigma2 || k == 0 || k > self.k0 {
                return Err(ValidationError::RuleOutOfRange { sigma, k });
            }
            for term in &rule.terms {
                if term.slot_polys.len() != k || term.guards.len() != k {
                    return Err(ValidationError::SlotArity {
                        sigma,
                        k,
                        slots: term.slot_polys.len(),
                        guards: term.guards.len(),
                    });
                }
            }
        }
        if self.initial.len() != self.start + 1 {
            return Err(ValidationError::InitialLength {
                expected: self.start + 1,
                found: self.initial.len(),
            });
        }
        Ok(())
    }

    pub fn is_split(&self) -> bool {
        matches!(self.denominator, Denominator::Split { .. })
    }

    /// `(a, b)` in split mode.
    pub fn split_factors(&self) -> Option<(&[i64], &[i64])> {
        match &self.denominator {
            Denominator::Split { a, b } => Some((a, b)),
            Denominator::Poly(_) => None,
        }
    }

    /// Number of linear factors (the degree of `M` in polynomial mode).
    pub fn s(&self) -> usize {
        match &self.denominator {
            Denominator::Split { a, .. } => a.len(),
            Denominator::Poly(m) => m.degree().unwrap_or(0),
        }
    }

    /// Least common denominator `D` of the initial values.
    pub fn d(&self) -> BigInt {
        common_denominator(&self.initial)
    }

    /// `C * prod (a_i n + b_i)`, or `C * M(n)`.
    pub fn leading(&self, n: i64) -> BigInt {
        let m = match &self.denominator {
            Denominator::Split { a, b } => a
                .iter()
                .zip(b)
                .fold(BigInt::one(), |acc, (&ai, &bi)| acc * BigInt::from(ai * n + bi)),
            Denominator::Poly(m) => m.eval_i64(n),
        };
        &self.c * m
    }

    pub fn eligibility(&self) -> TheoremEligibility {
        let start_condition = match &self.denominator {
            Denominator::Split { a, b } => a.iter().zip(b).all(|(&ai, &bi)| ai * self.start as i64 + bi - ai >= 0),
            Denominator::Poly(_) => false,
        };
        TheoremEligibility {
            nonneg_sigma: self.sigma1 >= 0,
            start_condition,
            split: self.is_split(),
        }
    }

    /// Same recurrence with `C` and every rule multiplied by `m`.
    pub fn rescaled(&self, m: &BigInt) -> Self {
        assert!(!m.is_zero(), "rescaling by zero");
        let mut out = self.clone();
        out.c = &self.c * m;
        for rule in out.rules.values_mut() {
            for term in &mut rule.terms {
                *term = term.scaled(m);
            }
        }
        out
    }

    /// Removes the sign from `C` by negating every rule.
    pub fn normalized_sign(&self) -> Self {
        if self.c.is_negative() {
            self.rescaled(&-BigInt::one())
        } else {
            self.clone()
        }
    }

    pub fn rule(&self, sigma: i64, k: usize) -> Option<&CoefficientRule> {
        self.rules.get(&(sigma, k))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &SeparableTerm)> {
        self.rules
            .values()
            .flat_map(|r| r.terms.iter().map(move |t| (r.sigma, t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    fn tangent_like(a: Vec<i64>, b: Vec<i64>, start: usize) -> Result<RecurrenceSpec, ValidationError> {
        RecurrenceSpec::new(
            BigInt::one(),
            Denominator::Split { a, b },
            0,
            0,
            2,
            start,
            vec![CoefficientRule::new(0, 2, vec![SeparableTerm::constant(1, 2)])],
            (0..=start as i64).map(rat_int).collect(),
        )
    }

    #[test]
    fn invariants_are_checked() {
        assert!(tangent_like(vec![1], vec![1], 1).is_ok());
        assert_eq!(
            tangent_like(vec![2], vec![4], 1),
            Err(ValidationError::NotCoprime { i: 1, a: 2, b: 4 })
        );
        assert_eq!(
            tangent_like(vec![1], vec![-3], 1),
            Err(ValidationError::VanishingFactor { a: 1, b: -3, n: 3 })
        );
        assert!(tangent_like(vec![1], vec![-3], 4).is_ok());
        assert_eq!(
            tangent_like(vec![1, 2], vec![1], 1),
            Err(ValidationError::LengthMismatch { a: 2, b: 1 })
        );
    }

    #[test]
    fn eligibility_and_leading() {
        let spec = tangent_like(vec![1], vec![1], 1).unwrap();
        assert!(spec.eligibility().eligible());
        assert_eq!(spec.leading(4), BigInt::from(5));
        let shifted = tangent_like(vec![2], vec![-1], 1).unwrap();
        assert!(!shifted.eligibility().start_condition);
        assert_eq!(spec.rescaled(&BigInt::from(3)).c, BigInt::from(3));
    }

    #[test]
    fn vacuous_guards() {
        let t = SeparableTerm::new(Poly::one(), vec![Poly::one(); 2], vec![Some(0), Some(2)]);
        assert_eq!(t.effective_guard(0, 0), None);
        assert_eq!(t.effective_guard(1, 0), Some(2));
        assert_eq!(t.effective_guard(1, 2), None);
        assert!(!t.has_effective_guards(2));
    }
}
