//! Factorial-type denominator bounds and their prime-by-prime verification.
//!
//! For a recurrence with `sigma1 >= 0` and `a_i N + b_i - a_i >= 0`,
//!
//! ```text
//! d_n = |C|^n D^((k0-1) n + 1) Pi^n prod_i (a_i n)! (a_i n + b_i - a_i)!     (n > N)
//! d_n = |C|^n D^((k0-1) n + 1) Pi^n                                          (n <= N)
//! ```
//!
//! is a multiple of the denominator of `f_n`, and `d_n` in turn divides
//! `delta^(n+1) ((nu n + nu)!)^(2s)` for `delta = |C| D^k0 Pi` and
//! `nu = max_i max(a_i, b_i - a_i, 1)`. Divisors are kept in factored form;
//! only their valuations are ever computed.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::ln_biguint;
use crate::par::Exec;
use crate::recurrence::{RecurrenceSpec, TheoremEligibility};
use crate::series::RationalSeries;
use crate::valuation::{ceil_log, is_prime, legendre_unchecked, primes_upto, trial_factor, vp_biguint};

pub use crate::valuation::legendre;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("spec is not eligible for the denominator theorem ({0})")]
    NotEligible(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("certificate check failed at n = {n}, p = {p}")]
    Unsound { n: usize, p: u64 },
}

fn require_eligible(spec: &RecurrenceSpec) -> Result<(), CertifyError> {
    let e: TheoremEligibility = spec.eligibility();
    if e.eligible() {
        return Ok(());
    }
    let mut why = Vec::new();
    if !e.split {
        why.push("denominator is not a product of linear factors");
    }
    if !e.nonneg_sigma {
        why.push("sigma1 < 0");
    }
    if e.split && !e.start_condition {
        why.push("a_i N + b_i - a_i < 0 for some i");
    }
    Err(CertifyError::NotEligible(why.join(", ")))
}

fn split_of(spec: &RecurrenceSpec) -> Result<(&[i64], &[i64]), CertifyError> {
    spec.split_factors()
        .ok_or_else(|| CertifyError::NotEligible("denominator is not a product of linear factors".into()))
}

/// The small-prime correction constant
/// `prod_i max(b_i - a_i, 0)!^(k0-1) prod_{p < 2 max_j (b_j - a_j)} p^ceil(log_p max(b_i - a_i, 1))`.
pub fn pi_constant(spec: &RecurrenceSpec) -> Result<BigUint, CertifyError> {
    let (a, b) = split_of(spec)?;
    let diffs: Vec<i64> = a.iter().zip(b).map(|(&ai, &bi)| bi - ai).collect();
    let max_diff = diffs.iter().copied().max().unwrap_or(0);
    let prime_bound = 2 * max_diff;
    let primes: Vec<u64> = if prime_bound > 2 {
        primes_upto(prime_bound as u64 - 1)
    } else {
        Vec::new()
    };
    let mut pi = BigUint::one();
    for &d in &diffs {
        let f = crate::arith::factorial(d.max(0) as u64);
        pi *= num_traits::pow(f, spec.k0 - 1);
        let x = d.max(1) as u64;
        for &p in &primes {
            pi *= num_traits::pow(BigUint::from(p), ceil_log(p, x) as usize);
        }
    }
    Ok(pi)
}

/// `|C|^c_exp D^d_exp Pi^pi_exp prod (factorials[i])!`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactoredDivisor {
    pub n: usize,
    #[serde(serialize_with = "ser_big")]
    pub c: BigUint,
    pub c_exp: u64,
    #[serde(serialize_with = "ser_big")]
    pub d: BigUint,
    pub d_exp: u64,
    #[serde(serialize_with = "ser_big")]
    pub pi: BigUint,
    pub pi_exp: u64,
    /// Arguments of the factorial atoms.
    pub factorials: Vec<u64>,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl FactoredDivisor {
    /// `v_p` of the divisor for a prime `p`, via Legendre's formula.
    pub fn vp(&self, p: u64) -> u64 {
        let base = |v: &BigUint| if v.is_zero() { 0 } else { vp_biguint(p, v) };
        self.c_exp * base(&self.c)
            + self.d_exp * base(&self.d)
            + self.pi_exp * base(&self.pi)
            + self.factorials.iter().map(|&m| legendre_unchecked(p, m)).sum::<u64>()
    }

    /// Expands the divisor. Meant for small `n` and tests.
    pub fn value(&self) -> BigUint {
        let mut v = num_traits::pow(self.c.clone(), self.c_exp as usize)
            * num_traits::pow(self.d.clone(), self.d_exp as usize)
            * num_traits::pow(self.pi.clone(), self.pi_exp as usize);
        for &m in &self.factorials {
            v *= crate::arith::factorial(m);
        }
        v
    }

    /// Natural logarithm of the divisor.
    pub fn ln(&self) -> f64 {
        let ln = |v: &BigUint| if v.is_zero() { 0.0 } else { ln_biguint(v) };
        self.c_exp as f64 * ln(&self.c)
            + self.d_exp as f64 * ln(&self.d)
            + self.pi_exp as f64 * ln(&self.pi)
            + self.factorials.iter().map(|&m| ln_factorial(m)).sum::<f64>()
    }
}

impl fmt::Display for FactoredDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}^{} * {}^{} * {}^{}",
            self.c, self.c_exp, self.d, self.d_exp, self.pi, self.pi_exp
        )?;
        for m in &self.factorials {
            write!(f, " * {m}!")?;
        }
        Ok(())
    }
}

pub fn ln_factorial(m: u64) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

/// The factored divisor `d_n` of the denominator of `f_n`.
pub fn dn_divisor(spec: &RecurrenceSpec, n: usize) -> Result<FactoredDivisor, CertifyError> {
    require_eligible(spec)?;
    let (a, b) = split_of(spec)?;
    let pi = pi_constant(spec)?;
    let d = spec.d().magnitude().clone();
    let mut factorials = Vec::new();
    if n > spec.start {
        for (&ai, &bi) in a.iter().zip(b) {
            let n = n as i64;
            factorials.push((ai * n) as u64);
            factorials.push((ai * n + bi - ai) as u64);
        }
    }
    Ok(FactoredDivisor {
        n,
        c: spec.c.magnitude().clone(),
        c_exp: n as u64,
        d,
        d_exp: ((spec.k0 as u64 - 1) * n as u64) + 1,
        pi,
        pi_exp: n as u64,
        factorials,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DenominatorCertificate {
    #[serde(serialize_with = "ser_big")]
    pub delta: BigUint,
    pub nu: u64,
    pub s: u64,
    pub provenance: String,
}

impl DenominatorCertificate {
    pub fn new(delta: BigUint, nu: u64, s: u64, provenance: impl Into<String>) -> Self {
        DenominatorCertificate {
            delta,
            nu,
            s,
            provenance: provenance.into(),
        }
    }

    /// `v_p(delta^(n+1) ((nu n + nu)!)^(2s))`.
    pub fn bound_vp(&self, p: u64, n: usize) -> u64 {
        (n as u64 + 1) * vp_biguint(p, &self.delta) + 2 * self.s * legendre_unchecked(p, self.nu * (n as u64 + 1))
    }

    /// `ln(delta^(n+1) ((nu n + nu)!)^(2s))`.
    pub fn ln_bound(&self, n: usize) -> f64 {
        (n as f64 + 1.0) * ln_biguint(&self.delta) + 2.0 * self.s as f64 * ln_factorial(self.nu * (n as u64 + 1))
    }
}

/// Prime factors of `v` below `limit`, plus the unfactored remainder.
fn small_primes_of(v: &BigUint, limit: u64) -> (Vec<u64>, BigUint) {
    let (found, rest) = trial_factor(v, &primes_upto(limit));
    (found.into_iter().map(|(p, _)| p).collect(), rest)
}

/// Probe length used to check a certificate against `d_n` symbolically.
pub const DERIVE_PROBE: usize = 64;

/// `delta = |C| D^k0 Pi`, `nu = max_i max(a_i, b_i - a_i, 1)`, with the
/// inequality `v_p(d_n) <= v_p(delta^(n+1) ((nu n + nu)!)^(2s))` checked for
/// every `n` in a probe window and every prime that can divide either side.
pub fn derive_delta_nu(spec: &RecurrenceSpec) -> Result<DenominatorCertificate, CertifyError> {
    require_eligible(spec)?;
    let (a, b) = split_of(spec)?;
    let pi = pi_constant(spec)?;
    let d = spec.d().magnitude().clone();
    let delta = spec.c.magnitude() * num_traits::pow(d, spec.k0) * &pi;
    let nu = a
        .iter()
        .zip(b)
        .map(|(&ai, &bi)| ai.max(bi - ai).max(1))
        .max()
        .unwrap_or(1) as u64;
    let s = a.len() as u64;
    let cert = DenominatorCertificate::new(delta.clone(), nu, s, "");

    let top = spec.start + DERIVE_PROBE;
    let (mut primes, _) = small_primes_of(&delta, 1 << 16);
    primes.extend(primes_upto(nu * (top as u64 + 1)));
    primes.sort_unstable();
    primes.dedup();
    for n in 0..=top {
        let dn = dn_divisor(spec, n)?;
        for &p in &primes {
            if dn.vp(p) > cert.bound_vp(p, n) {
                return Err(CertifyError::Unsound { n, p });
            }
        }
    }
    Ok(DenominatorCertificate::new(
        delta,
        nu,
        s,
        format!(
            "delta = |C| * D^k0 * Pi = {} * {}^{} * {}; nu = max(a_i, b_i - a_i, 1) = {nu}; \
             d_n divides delta^(n+1) ((nu n + nu)!)^(2s) checked for n <= {top} at {} primes",
            spec.c.magnitude(),
            spec.d(),
            spec.k0,
            pi,
            primes.len()
        ),
    ))
}

/// One `(n, p)` comparison in `v`-adic form: `actual = v_p(f_n)` against the
/// lower bound `-v_p(delta^(n+1) ((nu n + nu)!)^(2s))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationRecord {
    pub n: usize,
    /// The prime, or an unfactored cofactor of the denominator all of whose
    /// primes lie outside the certified range.
    #[serde(serialize_with = "ser_big")]
    pub p: BigUint,
    pub actual: i64,
    pub bound: i64,
}

impl ValuationRecord {
    pub fn margin(&self) -> i64 {
        self.actual - self.bound
    }

    pub fn is_violation(&self) -> bool {
        self.margin() < 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValuationReport {
    pub records: Vec<ValuationRecord>,
    pub indices_checked: usize,
}

impl ValuationReport {
    pub fn violations(&self) -> Vec<&ValuationRecord> {
        self.records.iter().filter(|r| r.is_violation()).collect()
    }

    pub fn is_clean(&self) -> bool {
        self.records.iter().all(|r| !r.is_violation())
    }

    fn merge(parts: Vec<Vec<ValuationRecord>>, indices_checked: usize) -> Self {
        ValuationReport {
            records: parts.into_iter().flatten().collect(),
            indices_checked,
        }
    }
}

fn check_index(
    series: &RationalSeries,
    cert: &DenominatorCertificate,
    n: usize,
    delta_primes: &[u64],
) -> Vec<ValuationRecord> {
    let fn_ = series.coeff(n);
    let den = fn_.denom().magnitude();
    if den.is_one() {
        return Vec::new();
    }
    let limit = cert.nu * (n as u64 + 1);
    let mut primes = primes_upto(limit);
    primes.extend(delta_primes.iter().copied().filter(|&p| p > limit));
    let (found, rest) = trial_factor(den, &primes);
    let mut out: Vec<ValuationRecord> = found
        .into_iter()
        .map(|(p, e)| ValuationRecord {
            n,
            p: BigUint::from(p),
            actual: -(e as i64),
            bound: -(cert.bound_vp(p, n) as i64),
        })
        .collect();
    if !rest.is_one() {
        // Every prime of `rest` exceeds nu n + nu, so only delta^(n+1) can
        // cover it.
        let covered = num_traits::pow(cert.delta.clone(), n + 1) % &rest;
        let mut e = 0i64;
        let mut r = den.clone();
        while (&r % &rest).is_zero() {
            r /= &rest;
            e += 1;
        }
        out.push(ValuationRecord {
            n,
            p: rest,
            actual: -e,
            bound: if covered.is_zero() { -e } else { 0 },
        });
    }
    out
}

/// Checks that the denominator of every `f_n`, `n` in `range`, divides
/// `delta^(n+1) ((nu n + nu)!)^(2s)`.
pub fn verify_divisibility(
    series: &RationalSeries,
    cert: &DenominatorCertificate,
    range: RangeInclusive<usize>,
) -> ValuationReport {
    verify_divisibility_with(series, cert, range, Exec::default())
}

pub fn verify_divisibility_with(
    series: &RationalSeries,
    cert: &DenominatorCertificate,
    range: RangeInclusive<usize>,
    exec: Exec,
) -> ValuationReport {
    let (delta_primes, _) = small_primes_of(&cert.delta, 1 << 16);
    let indices: Vec<usize> = range.filter(|&n| n < series.order()).collect();
    let count = indices.len();
    let parts = exec.map(indices, |n| check_index(series, cert, n, &delta_primes));
    ValuationReport::merge(parts, count)
}

/// `v_p(f_n) >= -(n+1) v_p(delta) - 2s legendre(p, nu n + nu)` for each `n`.
pub fn vadic_check(
    series: &RationalSeries,
    cert: &DenominatorCertificate,
    p: u64,
    range: RangeInclusive<usize>,
) -> Result<ValuationReport, CertifyError> {
    if !is_prime(p) {
        return Err(CertifyError::NotPrime(p));
    }
    let mut report = ValuationReport::default();
    for n in range.filter(|&n| n < series.order()) {
        report.indices_checked += 1;
        let Some(actual) = crate::valuation::vp_rational(p, series.coeff(n)) else {
            continue;
        };
        report.records.push(ValuationRecord {
            n,
            p: BigUint::from(p),
            actual,
            bound: -(cert.bound_vp(p, n) as i64),
        });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessRecord {
    pub n: usize,
    pub ln_actual: f64,
    pub ln_certified: f64,
    /// `ln(actual denominator) / ln(certified divisor)`; 0 when both are 1.
    pub ratio: f64,
}

/// How much of the certified divisor the actual denominators use.
pub fn sharpness_probe(
    series: &RationalSeries,
    cert: &DenominatorCertificate,
    range: RangeInclusive<usize>,
) -> Vec<SharpnessRecord> {
    range
        .filter(|&n| n < series.order())
        .map(|n| {
            let den = series.coeff(n).denom().magnitude();
            let ln_actual = ln_biguint(den);
            let ln_certified = cert.ln_bound(n);
            let ratio = if ln_certified > 0.0 {
                ln_actual / ln_certified
            } else {
                0.0
            };
            SharpnessRecord {
                n,
                ln_actual,
                ln_certified,
                ratio,
            }
        })
        .collect()
}

/// Greedily divides primes out of `delta` while `verify_divisibility` stays
/// clean on `probe`.
pub fn minimize_delta(
    series: &RationalSeries,
    cert: &DenominatorCertificate,
    probe: RangeInclusive<usize>,
) -> DenominatorCertificate {
    let (primes, _) = small_primes_of(&cert.delta, 1 << 16);
    let mut delta = cert.delta.clone();
    let mut removed = Vec::new();
    for p in primes {
        let bp = BigUint::from(p);
        while (&delta % &bp).is_zero() {
            let trial = DenominatorCertificate::new(&delta / &bp, cert.nu, cert.s, "");
            if verify_divisibility(series, &trial, probe.clone()).is_clean() {
                delta = trial.delta;
                removed.push(p);
            } else {
                break;
            }
        }
    }
    let note = format!(
        "{}; minimized on n in {}..={} by removing {:?}",
        cert.provenance,
        probe.start(),
        probe.end(),
        removed
    );
    DenominatorCertificate::new(delta, cert.nu, cert.s, note)
}
