//! Exhaustive falsification of the factorial-ratio valuation inequalities
//!
//! ```text
//! v_p( prod_i (a_i n + a_i)! (a_i n + b_i - 1)!
//!             / prod_{t > tau_i} (a_i j_t)! (a_i j_t + b_i - a_i)! )
//!   >= 2 sum_i v_p((a_i - 1)! (a_i sigma)!)                          p >= T
//!   >= sum_i ( -ceil(log_p max(b_i - a_i, 1))
//!              - (k - 1) v_p(max(b_i - a_i, 0)!)
//!              + 2 v_p((a_i - 1)! (a_i sigma)!) )                   p <  T
//! ```
//!
//! with `T = max_i 2 (b_i - a_i)`, `j` sorted ascending and summing to
//! `n - sigma`, and `tau_i` the number of `j_t` with `a_i j_t + b_i - a_i < 0`.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::arith::factorial;
use crate::par::Exec;
use crate::valuation::{ceil_log, is_prime, legendre_unchecked, vp_rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("bad grid spec: {0}")]
    Grid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropParams {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub n: i64,
    pub sigma: i64,
    /// Sorted ascending, summing to `n - sigma`.
    pub j: Vec<i64>,
    pub tau: Vec<usize>,
}

impl PropParams {
    pub fn new(a: Vec<i64>, b: Vec<i64>, n: i64, sigma: i64, j: Vec<i64>) -> Result<Self, PropError> {
        let bad = |m: String| Err(PropError::InvalidParams(m));
        if a.is_empty() || a.len() != b.len() {
            return bad(format!("need s >= 1 with |a| = |b|, got {} and {}", a.len(), b.len()));
        }
        if a.iter().any(|&x| x <= 0) {
            return bad("a_i must be positive".into());
        }
        if j.len() < 2 {
            return bad("k must be at least 2".into());
        }
        if n < 1 || sigma < 0 {
            return bad(format!("need n >= 1 and sigma >= 0, got n = {n}, sigma = {sigma}"));
        }
        if j.iter().any(|&x| x < 0) || j.windows(2).any(|w| w[0] > w[1]) {
            return bad(format!("j = {j:?} is not sorted and non-negative"));
        }
        if j.iter().sum::<i64>() != n - sigma {
            return bad(format!("j = {j:?} does not sum to n - sigma = {}", n - sigma));
        }
        if let Some(i) = (0..a.len()).find(|&i| a[i] * n + b[i] - 1 < 0) {
            return bad(format!("(a_{0} n + b_{0} - 1)! has a negative argument", i + 1));
        }
        let tau = a
            .iter()
            .zip(&b)
            .map(|(&ai, &bi)| j.iter().take_while(|&&jt| ai * jt + bi - ai < 0).count())
            .collect::<Vec<usize>>();
        // The largest slot must survive: the argument eliminates j_k through
        // j_1 + ... + j_k = n - sigma.
        if tau.iter().any(|&t| t >= j.len()) {
            return bad(format!("tau = {tau:?} drops every slot of j = {j:?}"));
        }
        Ok(PropParams { a, b, n, sigma, j, tau })
    }

    pub fn s(&self) -> usize {
        self.a.len()
    }

    pub fn k(&self) -> usize {
        self.j.len()
    }

    /// `T = max_i 2 (b_i - a_i)`.
    pub fn threshold(&self) -> i64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(&a, &b)| 2 * (b - a))
            .max()
            .unwrap_or(0)
    }

    /// Numerator and denominator factorial arguments of the ratio.
    fn atoms(&self) -> (Vec<u64>, Vec<u64>) {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for i in 0..self.s() {
            let (a, b) = (self.a[i], self.b[i]);
            num.push((a * self.n + a) as u64);
            num.push((a * self.n + b - 1) as u64);
            for &jt in &self.j[self.tau[i]..] {
                den.push((a * jt) as u64);
                den.push((a * jt + b - a) as u64);
            }
        }
        (num, den)
    }
}

impl fmt::Display for PropParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={:?} b={:?} n={} sigma={} j={:?} tau={:?}",
            self.a, self.b, self.n, self.sigma, self.j, self.tau
        )
    }
}

fn check_prime(p: u64) -> Result<(), PropError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(PropError::NotPrime(p))
    }
}

/// `v_p` of the factorial ratio, by Legendre's formula on each atom.
pub fn lhs_valuation(params: &PropParams, p: u64) -> Result<i64, PropError> {
    check_prime(p)?;
    let (num, den) = params.atoms();
    let v = |xs: &[u64]| xs.iter().map(|&m| legendre_unchecked(p, m) as i64).sum::<i64>();
    Ok(v(&num) - v(&den))
}

/// The same valuation from the ratio expanded as an exact rational.
pub fn lhs_valuation_expanded(params: &PropParams, p: u64) -> Result<i64, PropError> {
    check_prime(p)?;
    let (num, den) = params.atoms();
    let prod = |xs: &[u64]| {
        xs.iter().fold(num_bigint::BigInt::one(), |acc, &m| {
            acc * num_bigint::BigInt::from(factorial(m))
        })
    };
    let ratio = BigRational::new(prod(&num), prod(&den));
    Ok(vp_rational(p, &ratio).expect("factorial ratio is nonzero"))
}

/// The right-hand side for `p`, picking the case by `p >= T`.
pub fn rhs_bound(params: &PropParams, p: u64) -> Result<i64, PropError> {
    check_prime(p)?;
    let large = p as i64 >= params.threshold();
    let k = params.k() as i64;
    let mut total = 0i64;
    for (&a, &b) in params.a.iter().zip(&params.b) {
        let base =
            2 * (legendre_unchecked(p, (a - 1) as u64) + legendre_unchecked(p, (a * params.sigma) as u64)) as i64;
        total += base;
        if !large {
            let d = b - a;
            total -= ceil_log(p, d.max(1) as u64) as i64;
            total -= (k - 1) * legendre_unchecked(p, d.max(0) as u64) as i64;
        }
    }
    Ok(total)
}

/// Parameter ranges for [`check_grid`]. Each `a_i` runs over `a`, each
/// `b_i` over `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub s: RangeInclusive<usize>,
    pub a: RangeInclusive<i64>,
    pub b: RangeInclusive<i64>,
    pub k: RangeInclusive<usize>,
    pub n: RangeInclusive<i64>,
    pub sigma: RangeInclusive<i64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            s: 1..=2,
            a: 1..=3,
            b: -4..=4,
            k: 2..=3,
            n: 1..=12,
            sigma: 0..=2,
        }
    }
}

impl Grid {
    /// Every `(a, b)` tuple pair of every length in `s`.
    fn denominators(&self) -> Vec<(Vec<i64>, Vec<i64>)> {
        let mut out = Vec::new();
        for s in self.s.clone() {
            let a_all = tuples(&self.a, s);
            let b_all = tuples(&self.b, s);
            for a in &a_all {
                for b in &b_all {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }
}

/// `key=lo..hi` items separated by commas; `key=v` fixes a value. Keys are
/// `s`, `a`, `b`, `k`, `n`, `sigma`; missing keys keep their defaults.
impl FromStr for Grid {
    type Err = PropError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut g = Grid::default();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, val) = item
                .split_once('=')
                .ok_or_else(|| PropError::Grid(format!("`{item}` is not key=range")))?;
            let (lo, hi) = parse_range(val.trim())?;
            let to_usize =
                |v: i64| usize::try_from(v).map_err(|_| PropError::Grid(format!("`{item}` must be non-negative")));
            match key.trim() {
                "s" => g.s = to_usize(lo)?..=to_usize(hi)?,
                "a" => g.a = lo..=hi,
                "b" => g.b = lo..=hi,
                "k" => g.k = to_usize(lo)?..=to_usize(hi)?,
                "n" => g.n = lo..=hi,
                "sigma" => g.sigma = lo..=hi,
                other => return Err(PropError::Grid(format!("unknown key `{other}`"))),
            }
        }
        Ok(g)
    }
}

fn parse_range(text: &str) -> Result<(i64, i64), PropError> {
    let num = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|_| PropError::Grid(format!("`{s}` is not an integer")))
    };
    match text.split_once("..") {
        Some((lo, hi)) => Ok((num(lo)?, num(hi.trim_start_matches('='))?)),
        None => {
            let v = num(text)?;
            Ok((v, v))
        }
    }
}

fn tuples(range: &RangeInclusive<i64>, len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                range.clone().map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Non-decreasing sequences of `k` non-negative integers summing to `total`.
pub fn sorted_compositions(total: i64, k: usize) -> Vec<Vec<i64>> {
    fn go(rem: i64, left: usize, min: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 1 {
            if rem >= min {
                cur.push(rem);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let mut v = min;
        while v * left as i64 <= rem {
            cur.push(v);
            go(rem - v, left - 1, v, cur, out);
            cur.pop();
            v += 1;
        }
    }
    let mut out = Vec::new();
    if total >= 0 && k > 0 {
        go(total, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub params: PropParams,
    pub p: u64,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropReport {
    /// `(params, p)` pairs compared.
    pub checked: u64,
    /// Points dropped because `a_i n + b_i - 1 < 0`.
    pub skipped: u64,
    /// Points dropped because some `tau_i = k`.
    pub all_slots_dropped: u64,
    pub counterexamples: Vec<Counterexample>,
    /// Points where the Legendre and expanded valuations disagree.
    pub oracle_mismatches: Vec<Counterexample>,
    /// Points compared against the expanded ratio.
    pub oracle_checked: u64,
    /// Smallest `lhs - rhs` seen, if anything was checked.
    pub min_margin: Option<i64>,
}

impl PropReport {
    fn absorb(&mut self, other: PropReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.all_slots_dropped += other.all_slots_dropped;
        self.oracle_checked += other.oracle_checked;
        self.counterexamples.extend(other.counterexamples);
        self.oracle_mismatches.extend(other.oracle_mismatches);
        self.min_margin = match (self.min_margin, other.min_margin) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
    }

    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty() && self.oracle_mismatches.is_empty()
    }
}

/// Largest `n` at which the expanded-ratio oracle is run.
pub const DOUBLE_ORACLE_MAX_N: i64 = 8;

#[derive(Clone, Debug, Default)]
pub struct GridOptions {
    pub double_oracle: bool,
    pub exec: Exec,
}

/// Checks the inequality at every grid point and prime. Non-primes in
/// `primes` are an error.
pub fn check_grid(grid: &Grid, primes: &[u64], opts: &GridOptions) -> Result<PropReport, PropError> {
    for &p in primes {
        check_prime(p)?;
    }
    let denoms = grid.denominators();
    let mut cells = Vec::new();
    for n in grid.n.clone() {
        for sigma in grid.sigma.clone() {
            for k in grid.k.clone() {
                if n >= 1 && sigma >= 0 && sigma <= n && k >= 2 {
                    cells.push((n, sigma, k));
                }
            }
        }
    }
    let parts = opts.exec.map(cells, |(n, sigma, k)| {
        check_cell(n, sigma, k, &denoms, primes, opts.double_oracle)
    });
    let mut report = PropReport::default();
    for part in parts {
        report.absorb(part);
    }
    Ok(report)
}

fn check_cell(
    n: i64,
    sigma: i64,
    k: usize,
    denoms: &[(Vec<i64>, Vec<i64>)],
    primes: &[u64],
    double_oracle: bool,
) -> PropReport {
    let mut rep = PropReport::default();
    let comps = sorted_compositions(n - sigma, k);
    for (a, b) in denoms {
        if a.iter().zip(b).any(|(&ai, &bi)| ai * n + bi - 1 < 0) {
            rep.skipped += (comps.len() * primes.len()) as u64;
            continue;
        }
        for j in &comps {
            let largest = j[j.len() - 1];
            if a.iter().zip(b).any(|(&ai, &bi)| ai * largest + bi - ai < 0) {
                rep.all_slots_dropped += primes.len() as u64;
                continue;
            }
            let params = PropParams::new(a.clone(), b.clone(), n, sigma, j.clone())
                .expect("grid points are valid by construction");
            for &p in primes {
                let lhs = lhs_valuation(&params, p).expect("prime checked");
                let rhs = rhs_bound(&params, p).expect("prime checked");
                rep.checked += 1;
                let margin = lhs - rhs;
                rep.min_margin = Some(rep.min_margin.map_or(margin, |m| m.min(margin)));
                if margin < 0 {
                    rep.counterexamples.push(Counterexample {
                        params: params.clone(),
                        p,
                        lhs,
                        rhs,
                    });
                }
                if double_oracle && n <= DOUBLE_ORACLE_MAX_N {
                    rep.oracle_checked += 1;
                    let expanded = lhs_valuation_expanded(&params, p).expect("prime checked");
                    if expanded != lhs {
                        rep.oracle_mismatches.push(Counterexample {
                            params: params.clone(),
                            p,
                            lhs,
                            rhs: expanded,
                        });
                    }
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_one() -> PropParams {
        PropParams::new(vec![1], vec![1], 3, 0, vec![1, 2]).unwrap()
    }

    #[test]
    fn worked_values() {
        assert_eq!(lhs_valuation(&one_one(), 2), Ok(2));
        assert_eq!(lhs_valuation(&one_one(), 3), Ok(2));
        assert_eq!(rhs_bound(&one_one(), 2), Ok(0));
        let p = PropParams::new(vec![1], vec![3], 2, 1, vec![0, 1]).unwrap();
        assert_eq!(rhs_bound(&p, 5), Ok(0));
        let q = PropParams::new(vec![1], vec![4], 2, 0, vec![1, 1]).unwrap();
        assert_eq!(rhs_bound(&q, 2), Ok(-3));
        assert!(lhs_valuation(&q, 2).unwrap() >= -3);
        assert_eq!(lhs_valuation(&one_one(), 4), Err(PropError::NotPrime(4)));
    }

    #[test]
    fn tau_is_prefix_count() {
        let p = PropParams::new(vec![2], vec![-3], 4, 0, vec![0, 1, 3]).unwrap();
        // 2j - 5 < 0 for j = 0, 1
        assert_eq!(p.tau, vec![2]);
        assert_eq!(one_one().tau, vec![0]);
        assert!(PropParams::new(vec![1], vec![1], 3, 0, vec![2, 1]).is_err());
        assert!(PropParams::new(vec![1], vec![1], 3, 0, vec![1, 1]).is_err());
        assert!(PropParams::new(vec![1], vec![-1], 2, 2, vec![0, 0]).is_err());
    }

    #[test]
    fn compositions() {
        assert_eq!(sorted_compositions(4, 2), vec![vec![0, 4], vec![1, 3], vec![2, 2]]);
        assert_eq!(sorted_compositions(0, 3), vec![vec![0, 0, 0]]);
        assert_eq!(sorted_compositions(6, 3).len(), 7);
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "s=1, n=2..5, b=-1..=1, sigma=0".parse().unwrap();
        assert_eq!(g.s, 1..=1);
        assert_eq!(g.n, 2..=5);
        assert_eq!(g.b, -1..=1);
        assert_eq!(g.a, 1..=3);
        assert!("q=1".parse::<Grid>().is_err());
        assert!("s=-1".parse::<Grid>().is_err());
    }

    #[test]
    fn small_grid_with_oracle() {
        let g: Grid = "s=1..2,a=1..2,b=-2..3,n=1..6".parse().unwrap();
        let opts = GridOptions {
            double_oracle: true,
            ..GridOptions::default()
        };
        let rep = check_grid(&g, &[2, 3, 5, 7], &opts).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.counterexamples.first());
        assert!(rep.checked > 0 && rep.oracle_checked == rep.checked);
        let empty: Grid = "n=5..4".parse().unwrap();
        assert_eq!(check_grid(&empty, &[2], &opts).unwrap(), PropReport::default());
    }
}
