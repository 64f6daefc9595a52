//! Forward evaluation: direct enumeration of compositions, and an
//! incremental path built on running weighted Cauchy products.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{RecurrenceSpec, SeparableTerm};
use crate::poly::Poly;
use crate::series::RationalSeries;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("C * M(n) vanishes at n = {0}")]
    VanishingDenominator(usize),
    #[error("fast path unavailable: {0}")]
    FastPathUnavailable(String),
}

/// `slot_poly(j) * f_j`, grown as new `f_j` become known.
#[derive(Default)]
struct Weights {
    table: HashMap<Poly, Vec<BigRational>>,
}

impl Weights {
    fn ensure(&mut self, p: &Poly, f: &[BigRational]) -> &[BigRational] {
        let v = self.table.entry(p.clone()).or_default();
        for (j, fj) in f.iter().enumerate().skip(v.len()) {
            let w = if fj.is_zero() {
                BigRational::zero()
            } else if p.is_one() {
                fj.clone()
            } else {
                fj * p.eval_i64(j as i64)
            };
            v.push(w);
        }
        v
    }
}

fn step_value(spec: &RecurrenceSpec, n: usize, sum: BigRational) -> Result<BigRational, EvalError> {
    let lead = spec.leading(n as i64);
    if lead.is_zero() {
        return Err(EvalError::VanishingDenominator(n));
    }
    Ok(sum / lead)
}

fn seed(spec: &RecurrenceSpec, n_max: usize) -> Vec<BigRational> {
    let mut f = spec.initial.clone();
    f.truncate(n_max + 1);
    f.reserve(n_max + 1 - f.len());
    f
}

/// `f_0 .. f_{n_max}` by enumerating every composition.
pub fn evaluate(spec: &RecurrenceSpec, n_max: usize) -> Result<RationalSeries, EvalError> {
    let mut f = seed(spec, n_max);
    let mut weights = Weights::default();
    for n in spec.start..n_max {
        let next = naive_step(spec, n, &f, &mut weights)?;
        f.push(next);
    }
    Ok(RationalSeries::new(f))
}

/// The value the recurrence assigns to `f_{n+1}` given `f_0 .. f_n`,
/// whether or not `n >= N`.
pub(crate) fn step_from_prefix(spec: &RecurrenceSpec, n: usize, f: &[BigRational]) -> Result<BigRational, EvalError> {
    naive_step(spec, n, &f[..=n], &mut Weights::default())
}

fn naive_step(
    spec: &RecurrenceSpec,
    n: usize,
    f: &[BigRational],
    weights: &mut Weights,
) -> Result<BigRational, EvalError> {
    let mut total = BigRational::zero();
    for (sigma, term) in spec.terms() {
        let target = n as i64 - sigma;
        if target < 0 {
            continue;
        }
        let Some(inner) = composition_sum(term, n, target as usize, f, weights) else {
            continue;
        };
        if !inner.is_zero() {
            total += inner * term.n_poly.eval_i64(n as i64);
        }
    }
    step_value(spec, n, total)
}

/// `sum prod_t slot_t(j_t) f_{j_t}` over compositions of `target` respecting
/// the caps `j_t <= n - u_t`.
fn composition_sum(
    term: &SeparableTerm,
    n: usize,
    target: usize,
    f: &[BigRational],
    weights: &mut Weights,
) -> Option<BigRational> {
    let mut caps = Vec::with_capacity(term.k());
    for g in &term.guards {
        match g {
            Some(u) if *u as usize > n => return None,
            Some(u) => caps.push(n - *u as usize),
            None => caps.push(n),
        }
    }
    if caps.iter().sum::<usize>() < target {
        return None;
    }
    for p in &term.slot_polys {
        weights.ensure(p, f);
    }
    let slots: Vec<&[BigRational]> = term.slot_polys.iter().map(|p| &weights.table[p][..=n]).collect();
    // suffix_caps[t] = caps[t] + ... + caps[k-1]
    let mut suffix_caps = vec![0; caps.len() + 1];
    for t in (0..caps.len()).rev() {
        suffix_caps[t] = suffix_caps[t + 1] + caps[t];
    }
    let mut out = BigRational::zero();
    dfs(&slots, &caps, &suffix_caps, target, None, &mut out);
    Some(out)
}

fn dfs(
    slots: &[&[BigRational]],
    caps: &[usize],
    suffix_caps: &[usize],
    rem: usize,
    acc: Option<&BigRational>,
    out: &mut BigRational,
) {
    if slots.len() == 1 {
        if rem <= caps[0] {
            let w = &slots[0][rem];
            if !w.is_zero() {
                match acc {
                    Some(a) => *out += a * w,
                    None => *out += w,
                }
            }
        }
        return;
    }
    let lo = rem.saturating_sub(suffix_caps[1]);
    for j in lo..=rem.min(caps[0]) {
        let w = &slots[0][j];
        if w.is_zero() {
            continue;
        }
        let next = match acc {
            Some(a) => a * w,
            None => w.clone(),
        };
        dfs(&slots[1..], &caps[1..], &suffix_caps[1..], rem - j, Some(&next), out);
    }
}

/// Whether [`evaluate_fast`] accepts `spec`.
pub fn fast_path_available(spec: &RecurrenceSpec) -> Result<(), EvalError> {
    if spec.sigma1 < 0 {
        return Err(EvalError::FastPathUnavailable(format!(
            "sigma1 = {} is negative",
            spec.sigma1
        )));
    }
    for (sigma, term) in spec.terms() {
        if term.has_effective_guards(sigma) {
            return Err(EvalError::FastPathUnavailable(format!(
                "rule sigma={sigma} k={} has guarded slots",
                term.k()
            )));
        }
    }
    Ok(())
}

/// A sequence kept as integer numerators over the running lcm of its
/// denominators, so a convolution entry costs one reduction instead of one
/// per product.
#[derive(Default)]
struct Scaled {
    lcm: BigInt,
    nums: Vec<BigInt>,
}

impl Scaled {
    fn extend(&mut self, vals: &[BigRational]) {
        if self.lcm.is_zero() {
            self.lcm = BigInt::one();
        }
        for v in &vals[self.nums.len()..] {
            let d = v.denom();
            if !(&self.lcm % d).is_zero() {
                let grown = self.lcm.lcm(d);
                let r = &grown / &self.lcm;
                for x in &mut self.nums {
                    *x *= &r;
                }
                self.lcm = grown;
            }
            self.nums.push(v.numer() * (&self.lcm / d));
        }
    }
}

fn convolve(u: &Scaled, w: &Scaled, m: usize) -> BigRational {
    let mut acc = BigInt::zero();
    for i in 0..=m {
        let (x, y) = (&u.nums[i], &w.nums[m - i]);
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    BigRational::new(acc, &u.lcm * &w.lcm)
}

/// Running convolutions `w_1 * ... * w_t` keyed by the sorted slot
/// polynomials, shared between terms with a common prefix.
#[derive(Default)]
struct Products {
    weights: Weights,
    table: HashMap<Vec<Poly>, Vec<BigRational>>,
    scaled: HashMap<Vec<Poly>, Scaled>,
}

impl Products {
    fn ensure(&mut self, key: &[Poly], len: usize, f: &[BigRational]) {
        let last = &key[key.len() - 1];
        self.weights.ensure(last, f);
        if key.len() == 1 {
            return;
        }
        let prefix = &key[..key.len() - 1];
        self.ensure(prefix, len, f);
        let single = vec![last.clone()];
        self.sync(prefix);
        self.sync(&single);
        let mut cur = self.table.remove(key).unwrap_or_default();
        let (u, w) = (&self.scaled[prefix], &self.scaled[&single]);
        for m in cur.len()..len {
            cur.push(convolve(u, w, m));
        }
        self.table.insert(key.to_vec(), cur);
    }

    fn sync(&mut self, key: &[Poly]) {
        let vals = if key.len() == 1 {
            &self.weights.table[&key[0]]
        } else {
            &self.table[key]
        };
        self.scaled.entry(key.to_vec()).or_default().extend(vals);
    }

    fn prefix(&self, key: &[Poly]) -> &[BigRational] {
        if key.len() == 1 {
            &self.weights.table[&key[0]]
        } else {
            &self.table[key]
        }
    }
}

/// Same output as [`evaluate`], computed from incremental weighted Cauchy
/// products in `O(k n)` work per term and step.
pub fn evaluate_fast(spec: &RecurrenceSpec, n_max: usize) -> Result<RationalSeries, EvalError> {
    fast_path_available(spec)?;
    let keyed: Vec<(i64, Vec<Poly>, &Poly)> = spec
        .terms()
        .map(|(sigma, t)| {
            let mut key = t.slot_polys.clone();
            key.sort();
            (sigma, key, &t.n_poly)
        })
        .collect();
    let mut f = seed(spec, n_max);
    let mut products = Products::default();
    for n in spec.start..n_max {
        let mut total = BigRational::zero();
        for (sigma, key, n_poly) in &keyed {
            let target = n as i64 - sigma;
            if target < 0 {
                continue;
            }
            let target = target as usize;
            products.ensure(key, target + 1, &f);
            let v = &products.prefix(key)[target];
            if !v.is_zero() {
                total += v * n_poly.eval_i64(n as i64);
            }
        }
        f.push(step_value(spec, n, total)?);
    }
    Ok(RationalSeries::new(f))
}
