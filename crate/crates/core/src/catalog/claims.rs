//! Reusable claim checks.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{abs_denominator, bernoulli_series, laurent_tail, Claim, ClaimResult};
use crate::arith::{factorial, rational_to_f64};
use crate::certify::{derive_delta_nu, verify_divisibility, CertifyError};
use crate::recurrence::RecurrenceSpec;
use crate::series::RationalSeries;
use crate::shift::shift_to_nonnegative;
use crate::valuation::{primes_upto, vp_rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimOutcome {
    pub passed: bool,
    pub range: String,
    pub detail: String,
}

impl ClaimOutcome {
    pub fn pass(range: impl Into<String>, detail: impl Into<String>) -> Self {
        ClaimOutcome {
            passed: true,
            range: range.into(),
            detail: detail.into(),
        }
    }

    pub fn fail(range: impl Into<String>, detail: impl Into<String>) -> Self {
        ClaimOutcome {
            passed: false,
            range: range.into(),
            detail: detail.into(),
        }
    }

    pub(super) fn into_result(self, id: &str, statement: &str) -> ClaimResult {
        ClaimResult {
            id: id.to_string(),
            statement: statement.to_string(),
            passed: self.passed,
            range: self.range,
            detail: self.detail,
        }
    }
}

/// Runs `check` on `lo..=hi` and reports the first failure.
fn over_range(lo: usize, hi: usize, check: impl Fn(usize) -> Result<(), String>) -> ClaimOutcome {
    let range = format!("n in {lo}..={hi}");
    if hi < lo {
        return ClaimOutcome::fail(range, "series too short");
    }
    match (lo..=hi).find_map(|n| check(n).err().map(|e| (n, e))) {
        None => ClaimOutcome::pass(range, ""),
        Some((n, e)) => ClaimOutcome::fail(range, format!("n = {n}: {e}")),
    }
}

fn divides(den: &BigUint, m: &BigUint) -> bool {
    (m % den).is_zero()
}

/// The denominator certificate from the general theorem, after shifting
/// when `sigma1 < 0`. Checked to `n = 200`, or `n = 100` when `k0 >= 3`.
pub fn certificate(spec: &RecurrenceSpec) -> Claim {
    let spec = spec.clone();
    let limit = if spec.k0 >= 3 { 100 } else { 200 };
    Claim::new(
        "certificate",
        "denominator of f_n divides delta^(n+1) ((nu n + nu)!)^(2s)",
        limit,
        Arc::new(move |f: &RationalSeries, top: usize| {
            let (target, offset) = if spec.sigma1 < 0 {
                match shift_to_nonnegative(&spec) {
                    Ok(res) => (res.shifted_spec, res.offset),
                    Err(e) => return ClaimOutcome::fail("", e.to_string()),
                }
            } else {
                (spec.clone(), 0)
            };
            let cert = match derive_delta_nu(&target) {
                Ok(c) => c,
                Err(e) => return ClaimOutcome::fail("", e.to_string()),
            };
            if top < offset {
                return ClaimOutcome::fail("", "series too short");
            }
            let g = RationalSeries::new(f.coeffs()[offset..=top].to_vec());
            let report = verify_divisibility(&g, &cert, 0..=top - offset);
            let shifted = if offset > 0 {
                format!(" (on g_m = f_(m+{offset}))")
            } else {
                String::new()
            };
            let range = format!("n in 0..={}{shifted}", top - offset);
            let about = format!("delta = {}, nu = {}, s = {}", cert.delta, cert.nu, cert.s);
            match report.violations().first() {
                None => ClaimOutcome::pass(range, about),
                Some(v) => ClaimOutcome::fail(
                    range,
                    format!(
                        "{about}; violated at n = {}, p = {}: {} < {}",
                        v.n, v.p, v.actual, v.bound
                    ),
                ),
            }
        }),
    )
}

/// The certifier must refuse the spec.
pub fn not_eligible(spec: &RecurrenceSpec) -> Claim {
    let spec = spec.clone();
    Claim::new(
        "not-eligible",
        "the certifier reports NotEligible",
        0,
        Arc::new(move |_: &RationalSeries, _| match derive_delta_nu(&spec) {
            Err(CertifyError::NotEligible(why)) => ClaimOutcome::pass("", why),
            Ok(c) => ClaimOutcome::fail("", format!("certificate produced: delta = {}", c.delta)),
            Err(e) => ClaimOutcome::fail("", e.to_string()),
        }),
    )
}

/// `mult(n) f_n` is an integer for `n` in `lo..=limit`.
pub fn integral(
    id: impl Into<String>,
    statement: impl Into<String>,
    limit: usize,
    lo: usize,
    mult: impl Fn(usize) -> BigUint + Send + Sync + 'static,
) -> Claim {
    Claim::new(
        id,
        statement,
        limit,
        Arc::new(move |f: &RationalSeries, top: usize| {
            over_range(lo, top, |n| {
                let den = abs_denominator(f.coeff(n));
                if divides(&den, &mult(n)) {
                    Ok(())
                } else {
                    Err(format!("f_n = {} is not cleared", f.coeff(n)))
                }
            })
        }),
    )
}

/// Exact values at fixed indices.
pub fn values(id: &str, statement: &str, expected: Vec<(usize, BigRational)>) -> Claim {
    let limit = expected.iter().map(|(n, _)| *n).max().unwrap_or(0);
    Claim::new(
        id,
        statement,
        limit,
        Arc::new(move |f: &RationalSeries, top: usize| {
            let range = index_set(expected.iter().map(|(n, _)| *n));
            for (n, v) in &expected {
                if *n > top {
                    return ClaimOutcome::fail(range, "series too short");
                }
                if f.coeff(*n) != v {
                    return ClaimOutcome::fail(range, format!("f_{n} = {}, expected {v}", f.coeff(*n)));
                }
            }
            ClaimOutcome::pass(range, "")
        }),
    )
}

fn index_set(ns: impl Iterator<Item = usize>) -> String {
    let ns: Vec<usize> = ns.collect();
    match (ns.first(), ns.last()) {
        (Some(&lo), Some(&hi)) if ns.len() > 2 && ns.windows(2).all(|w| w[1] == w[0] + 1) => {
            format!("n in {lo}..={hi}")
        }
        _ => format!(
            "n in {{{}}}",
            ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
        ),
    }
}

/// Denominator of `B_{2n}` is the product of the primes `p` with `p - 1 | 2n`.
pub fn clausen_von_staudt(limit: usize) -> Claim {
    Claim::new(
        "clausen-von-staudt",
        "denominator of B_2n is the product of primes p with p - 1 | 2n",
        limit,
        Arc::new(|f: &RationalSeries, top: usize| {
            over_range(1, top / 2, |n| {
                let b = f.coeff(2 * n) * BigRational::from_integer(BigInt::from(factorial(2 * n as u64)));
                let expect = primes_upto(2 * n as u64 + 1)
                    .into_iter()
                    .filter(|p| (2 * n as u64).is_multiple_of(p - 1))
                    .fold(BigUint::one(), |acc, p| acc * p);
                if abs_denominator(&b) == expect {
                    Ok(())
                } else {
                    Err(format!("B_{} = {b}, expected denominator {expect}", 2 * n))
                }
            })
        }),
    )
}

/// `t_{2n-1} = (-1)^(n-1) 4^n (4^n - 1) B_{2n} / (2n)!` and `t_{2n} = 0`,
/// with `B_{2n}` from the Bernoulli series oracle.
pub fn tangent_bernoulli(limit: usize) -> Claim {
    Claim::new(
        "tangent-bernoulli",
        "t_(2n-1) = (-1)^(n-1) 4^n (4^n - 1) B_2n / (2n)! and t_2n = 0",
        limit,
        Arc::new(|t: &RationalSeries, top: usize| {
            let b = match bernoulli_series(top + 2) {
                Ok(b) => b,
                Err(e) => return ClaimOutcome::fail("", e.to_string()),
            };
            over_range(1, top.div_ceil(2), |n| {
                let four = BigInt::from(4).pow(n as u32);
                let sign = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
                // B_2n / (2n)! is the series coefficient b_2n itself.
                let expect = b.coeff(2 * n) * BigRational::from_integer(sign * &four * (&four - 1));
                if t.coeff(2 * n - 1) != &expect {
                    return Err(format!("t_{} = {}, expected {expect}", 2 * n - 1, t.coeff(2 * n - 1)));
                }
                if 2 * n <= top && !t.coeff(2 * n).is_zero() {
                    return Err(format!("t_{} != 0", 2 * n));
                }
                Ok(())
            })
        }),
    )
}

/// `D^(n+1) Pi^n (n-1)! n! (2n)! (2n+5)! u_n` is an integer with the
/// display constant `Pi = 2520` rather than the derived one.
pub fn weierstrass_display(d: BigUint, limit: usize) -> Claim {
    integral(
        "display",
        "D^(n+1) 2520^n (n-1)! n! (2n)! (2n+5)! p_(n+2) is an integer (n >= 1)",
        limit,
        1,
        move |n| {
            let m = n as u64;
            num_traits::pow(d.clone(), n + 1)
                * num_traits::pow(BigUint::from(2520u32), n)
                * factorial(m - 1)
                * factorial(m)
                * factorial(2 * m)
                * factorial(2 * m + 5)
        },
    )
}

/// `C^n D^(2n+1) (n-1)! n!^3 u_n` is an integer for `n >= 2`.
pub fn painleve_display(c: BigUint, d: BigUint, limit: usize) -> Claim {
    integral(
        "display",
        format!("C^n D^(2n+1) (n-1)! n!^3 u_n is an integer (n >= 2; C = {c}, D = {d})"),
        limit,
        2,
        move |n| {
            let f = factorial(n as u64);
            num_traits::pow(c.clone(), n)
                * num_traits::pow(d.clone(), 2 * n + 1)
                * factorial(n as u64 - 1)
                * &f
                * &f
                * &f
        },
    )
}

/// `E_n = p_(2n) 4n (4n-2)! / 2^(4n)`.
pub fn hurwitz_e(u: &RationalSeries, n: usize) -> BigRational {
    let p = u.coeff(2 * n - 2);
    let m = 4 * n as u64;
    p * BigRational::new(
        BigInt::from(m) * BigInt::from(factorial(m - 2)),
        BigInt::from(2).pow(m as u32),
    )
}

/// The three properties of the lemniscatic coefficients.
pub fn hurwitz(limit: usize) -> Vec<Claim> {
    let top_of = |top: usize| (top + 2) / 2;
    vec![
        Claim::new(
            "hurwitz-v2",
            "v_2(E_n) = -1",
            2 * limit - 2,
            Arc::new(move |u: &RationalSeries, top: usize| {
                over_range(1, top_of(top), |n| match vp_rational(2, &hurwitz_e(u, n)) {
                    Some(-1) => Ok(()),
                    v => Err(format!("v_2(E_n) = {v:?}")),
                })
            }),
        ),
        Claim::new(
            "hurwitz-primes",
            "denominator of E_n is squarefree, its odd primes are 1 mod 4, and p - 1 | 4n",
            2 * limit - 2,
            Arc::new(move |u: &RationalSeries, top: usize| {
                over_range(1, top_of(top), |n| {
                    let e = hurwitz_e(u, n);
                    let mut den = abs_denominator(&e);
                    for p in primes_upto(4 * n as u64 + 1) {
                        let bp = BigUint::from(p);
                        if !(&den % &bp).is_zero() {
                            continue;
                        }
                        den /= &bp;
                        if (&den % &bp).is_zero() {
                            return Err(format!("{p}^2 divides the denominator of E_n = {e}"));
                        }
                        if p % 4 == 3 {
                            return Err(format!("{p} = 3 mod 4 divides the denominator of E_n = {e}"));
                        }
                        if !(4 * n as u64).is_multiple_of(p - 1) {
                            return Err(format!("{p} divides the denominator but p - 1 does not divide 4n"));
                        }
                    }
                    if den.is_one() {
                        Ok(())
                    } else {
                        Err(format!("denominator of E_n = {e} has a prime factor above 4n + 1"))
                    }
                })
            }),
        ),
        Claim::new(
            "hurwitz-e",
            "e_n is an integer, where 1/(2p) = sum e_n x^(4n+2) / (4n+2)!",
            2 * limit - 2,
            Arc::new(move |u: &RationalSeries, top: usize| {
                let f = laurent_tail(u);
                let half =
                    match RationalSeries::one(f.order()).div(&f.scale(&BigRational::from_integer(BigInt::from(2)))) {
                        Ok(h) => h,
                        Err(e) => return ClaimOutcome::fail("", e.to_string()),
                    };
                over_range(0, top_of(top) - 1, |n| {
                    let e = half.coeff(4 * n) * BigRational::from_integer(BigInt::from(factorial(4 * n as u64 + 2)));
                    if e.is_integer() {
                        Ok(())
                    } else {
                        Err(format!("e_n = {e}"))
                    }
                })
            }),
        ),
    ]
}

/// `pi^2 / 6`.
pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// `|l_n / l_(n+1) - pi^2/6|`.
pub fn drift_gap(l: &RationalSeries, n: usize) -> f64 {
    (rational_to_f64(&(l.coeff(n) / l.coeff(n + 1))) - ZETA2).abs()
}

/// `l_n / l_(n+1)` ends closer to `pi^2/6` than it was a decade earlier.
pub fn dilog_drift(limit: usize) -> Claim {
    Claim::new(
        "drift",
        "|l_n / l_(n+1) - pi^2/6| at the last n is below its value at n / 10",
        limit,
        Arc::new(|l: &RationalSeries, top: usize| {
            if top < 20 {
                return ClaimOutcome::fail("", "needs n >= 20");
            }
            let late = top - 1;
            let early = top / 10;
            let (g_early, g_late) = (drift_gap(l, early), drift_gap(l, late));
            let range = format!("n in {{{early}, {late}}}");
            let detail = format!("gap({early}) = {g_early:.3e}, gap({late}) = {g_late:.3e}");
            if g_late < g_early {
                ClaimOutcome::pass(range, detail)
            } else {
                ClaimOutcome::fail(range, detail)
            }
        }),
    )
}

/// `prod_{k <= n/2} (k^2 + 1)` divides `2^n d_n`.
pub fn nonsplit_product(limit: usize) -> Claim {
    Claim::new(
        "product",
        "prod_{k <= n/2} (k^2 + 1) divides 2^n d_n",
        limit,
        Arc::new(|f: &RationalSeries, top: usize| {
            over_range(0, top, |n| {
                let lhs = super::nonsplit_product(n).magnitude().clone();
                let rhs = num_traits::pow(BigUint::from(2u32), n) * abs_denominator(f.coeff(n));
                if divides(&lhs, &rhs) {
                    Ok(())
                } else {
                    Err(format!("d_n = {}", abs_denominator(f.coeff(n))))
                }
            })
        }),
    )
}
