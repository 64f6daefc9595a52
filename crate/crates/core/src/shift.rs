//! Removing negative convolution offsets.
//!
//! With `r = -sigma1 > 0` put `g_m = f_{m+r}` and `n = n' + r`. Each slot of
//! a product `f_{j_1} ... f_{j_k}` either takes a small index `j < r`, in
//! which case `f_j` is a known constant folded into the coefficient, or a
//! large one `j = h + r` with `f_j = g_h`. Choosing the set of small slots
//! and their values turns every old term into a term in `g` with
//!
//! ```text
//! k'     = k - #small slots
//! sigma' = sigma + sum(small values) + (k' - 1) r  >= 0   (for k' >= 2)
//! ```
//!
//! Terms with `k' = 0`, or `k' = 1` and `sigma' < 0`, vanish for large
//! `n'`, which is where the start bound comes from.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::common_denominator;
use crate::poly::Poly;
use crate::recurrence::{
    evaluate, evaluate_fast, fast_path_available, step_from_prefix, CoefficientRule, Denominator, EvalError,
    RecurrenceSpec, SeparableTerm, ValidationError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShiftError {
    #[error("sigma1 = {0} is already non-negative")]
    AlreadyNonnegative(i64),
    #[error("cannot extend the initial values: {0}")]
    InsufficientInitial(#[from] EvalError),
    #[error("shifted spec is invalid: {0}")]
    Invalid(#[from] ValidationError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftResult {
    /// Recurrence for `g_m = f_{m + offset}`.
    pub shifted_spec: RecurrenceSpec,
    pub offset: usize,
    /// Start index guaranteed by the construction.
    pub n_bar: usize,
    /// Smallest start index from which the shifted recurrence was checked to
    /// reproduce `g`; this is the `N` of `shifted_spec`.
    pub tightened_start: usize,
    pub provenance: String,
}

/// Key for merging: terms that agree up to a rational factor.
type TermKey = (i64, usize, Poly, Vec<(Poly, Option<u64>)>);

pub fn shift_to_nonnegative(spec: &RecurrenceSpec) -> Result<ShiftResult, ShiftError> {
    if spec.sigma1 >= 0 {
        return Err(ShiftError::AlreadyNonnegative(spec.sigma1));
    }
    let r = (-spec.sigma1) as usize;
    let ri = r as i64;

    // Low values f_0 .. f_{r-1} are needed as constants; they are either
    // initial values or reachable by evaluation.
    let low_needed = r.saturating_sub(1);
    let low = evaluate(spec, low_needed.max(spec.start))?;

    let mut n_bar = (spec.sigma2 + spec.k0 as i64 * ri).max(spec.start as i64);
    let mut merged: BTreeMap<TermKey, BigRational> = BTreeMap::new();

    for (sigma, term) in spec.terms() {
        let k = term.k();
        for mask in 0u32..(1 << k) {
            let small: Vec<usize> = (0..k).filter(|t| mask & (1 << t) != 0).collect();
            let large: Vec<usize> = (0..k).filter(|t| mask & (1 << t) == 0).collect();
            let k_new = large.len();
            if k_new == 0 {
                continue;
            }
            let mut values = vec![0usize; small.len()];
            loop {
                let sum_small: i64 = values.iter().map(|&v| v as i64).sum();
                let sigma_new = sigma + sum_small + (k_new as i64 - 1) * ri;
                if sigma_new >= 0 {
                    let mut coeff = BigRational::one();
                    for (&t, &j) in small.iter().zip(&values) {
                        let w = low.coeff(j) * term.slot_polys[t].eval_i64(j as i64);
                        coeff *= w;
                        if let Some(u) = term.guards[t] {
                            // j <= n - u  <=>  n' >= u + j - r
                            n_bar = n_bar.max(u as i64 + j as i64 - ri);
                        }
                    }
                    if !coeff.is_zero() {
                        let mut slots: Vec<(Poly, Option<u64>)> = large
                            .iter()
                            .map(|&t| {
                                let guard = term.guards[t].filter(|&u| u as i64 > sigma_new);
                                (term.slot_polys[t].shift(ri), guard)
                            })
                            .collect();
                        slots.sort();
                        let key = (sigma_new, k_new, term.n_poly.shift(ri), slots);
                        *merged.entry(key).or_insert_with(BigRational::zero) += coeff;
                    }
                }
                if !advance(&mut values, r) {
                    break;
                }
            }
        }
    }
    merged.retain(|_, c| !c.is_zero());

    // Clear the denominators of the frozen constants into C.
    let lcm = common_denominator(merged.values());
    let mut c = &spec.c * &lcm;
    let mut rules: BTreeMap<(i64, usize), Vec<SeparableTerm>> = BTreeMap::new();
    for ((sigma, k, n_poly, slots), coeff) in &merged {
        let scaled = coeff * BigRational::from_integer(lcm.clone());
        debug_assert!(scaled.is_integer());
        let (slot_polys, guards) = slots.iter().cloned().unzip();
        rules.entry((*sigma, *k)).or_default().push(SeparableTerm::new(
            n_poly.scale(&scaled.to_integer()),
            slot_polys,
            guards,
        ));
    }
    let content = rules
        .values()
        .flatten()
        .fold(c.clone(), |acc, t| acc.gcd(&t.n_poly.content()));
    if !content.is_zero() && !content.abs().is_one() {
        let g = content.abs();
        c = &c / &g;
        for terms in rules.values_mut() {
            for t in terms.iter_mut() {
                t.n_poly = t.n_poly.div_exact(&g);
            }
        }
    }

    let denominator = match &spec.denominator {
        Denominator::Split { a, b } => Denominator::Split {
            a: a.clone(),
            b: a.iter().zip(b).map(|(&ai, &bi)| bi + ai * ri).collect(),
        },
        Denominator::Poly(m) => Denominator::Poly(m.shift(ri)),
    };
    let sigma2 = rules.keys().map(|k| k.0).max().unwrap_or(0);
    let k0 = rules.keys().map(|k| k.1).max().unwrap_or(1);
    let n_bar = n_bar.max(0) as usize;

    let f = evaluate(spec, n_bar + r + 1)?;
    let g: Vec<BigRational> = f.coeffs()[r..].to_vec();

    let mut shifted = RecurrenceSpec {
        c,
        denominator,
        sigma1: 0,
        sigma2,
        k0,
        start: n_bar,
        rules: rules
            .into_iter()
            .map(|((s, k), terms)| ((s, k), CoefficientRule::new(s, k, terms)))
            .collect(),
        initial: g[..=n_bar].to_vec(),
        ode: None,
    };
    shifted.validate()?;

    // Walk the start down while the recurrence still reproduces g.
    let mut start = n_bar;
    while start > 0 {
        let n = start - 1;
        let mut candidate = shifted.clone();
        candidate.start = n;
        candidate.initial.truncate(n + 1);
        if candidate.validate().is_err() {
            break;
        }
        match step_from_prefix(&candidate, n, &g) {
            Ok(v) if v == g[n + 1] => start = n,
            _ => break,
        }
    }
    shifted.start = start;
    shifted.initial.truncate(start + 1);
    shifted.validate()?;

    let provenance = format!(
        "offset r = {r}; start bound max(N, sigma2 + k0*r, low-slot guard thresholds) = {n_bar} \
         (k0 = {} taken as the multiplier of r); tightened to N = {start} by checking the shifted \
         recurrence against direct evaluation of the original on [{start}, {n_bar})",
        spec.k0
    );
    Ok(ShiftResult {
        shifted_spec: shifted,
        offset: r,
        n_bar,
        tightened_start: start,
        provenance,
    })
}

/// `f_0 .. f_{n_max}` by the quickest route: the incremental engine when
/// the spec allows it, else the incremental engine on the shifted spec with
/// the first `offset` values prepended, else direct enumeration.
pub fn evaluate_auto(spec: &RecurrenceSpec, n_max: usize) -> Result<crate::series::RationalSeries, ShiftError> {
    if fast_path_available(spec).is_ok() {
        return Ok(evaluate_fast(spec, n_max)?);
    }
    if spec.sigma1 < 0 && n_max > 0 {
        let res = shift_to_nonnegative(spec)?;
        if fast_path_available(&res.shifted_spec).is_ok() {
            let r = res.offset;
            if n_max < r {
                return Ok(evaluate(spec, n_max)?);
            }
            let head = evaluate(spec, r - 1)?;
            let tail = evaluate_fast(&res.shifted_spec, n_max - r)?;
            let mut coeffs = head.into_coeffs();
            coeffs.truncate(r);
            coeffs.extend(tail.into_coeffs());
            return Ok(crate::series::RationalSeries::new(coeffs));
        }
    }
    Ok(evaluate(spec, n_max)?)
}

/// Odometer over `{0, .., r-1}^len`.
fn advance(values: &mut [usize], r: usize) -> bool {
    for v in values.iter_mut() {
        *v += 1;
        if *v < r {
            return true;
        }
        *v = 0;
    }
    false
}
