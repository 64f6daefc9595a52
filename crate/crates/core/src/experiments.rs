//! The two numerical experiments: denominator growth for the non-split
//! recurrence `f_{n+1} = sum f_k f_{n-k} / (n^2 + 1)`, and the drift of
//! `l_n / l_{n+1}` toward `pi^2 / 6` for the inverse dilogarithm.
//!
//! Records serialize to CSV or JSON with a fixed column order and fixed
//! precision, so the bytes depend only on the inputs.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{format_rational, ln_biguint, rational_to_decimal, rational_to_f64};
use crate::catalog;
use crate::par::Exec;
use crate::series::RationalSeries;
use crate::shift::{evaluate_auto, ShiftError};

pub use crate::catalog::ZETA2;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("n_max must be at least {min}, got {got}")]
    TooShort { min: usize, got: usize },
    #[error("no records to emit")]
    Empty,
    #[error("evaluation failed: {0}")]
    Evaluation(#[from] ShiftError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// A row type that can be written as CSV.
pub trait CsvRecord: Serialize {
    const HEADER: &'static str;
    fn csv_row(&self) -> String;
}

/// Growth statistics of `d_n = den(f_n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRecord {
    pub n: usize,
    /// `ln d_n`, rendered with 10 decimals.
    pub log_dn: String,
    /// `ln d_n / (n ln(n)^2)`.
    pub stat1: String,
    /// `ln d_2n / (2n ln 2n) - ln d_n / (n ln n)`, when `2n <= n_max`.
    pub stat2: Option<String>,
}

impl CsvRecord for GrowthRecord {
    const HEADER: &'static str = "n,log_dn,stat1,stat2";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.n,
            self.log_dn,
            self.stat1,
            self.stat2.as_deref().unwrap_or("")
        )
    }
}

/// Divisibility of `2^n d_n` by products of `k^2 + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisibilityVerdict {
    pub n: usize,
    /// `prod_{k=0}^{floor(n/2)} (k^2+1) | 2^n d_n`, the statement as given.
    pub stated: bool,
    /// The same with the product stopping at `floor(n/2) - 1`.
    pub shortened: bool,
    /// The same product divides `2^n lcm(d_0, ..., d_n)`.
    pub running_lcm: bool,
}

impl CsvRecord for DivisibilityVerdict {
    const HEADER: &'static str = "n,stated,shortened,running_lcm";

    fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.n, self.stated, self.shortened, self.running_lcm)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NonsplitReport {
    pub n_max: usize,
    pub records: Vec<GrowthRecord>,
    pub verdicts: Vec<DivisibilityVerdict>,
    /// `stat1` at `n_max` as a float.
    pub stat1_at_max: f64,
}

impl NonsplitReport {
    /// Indices where the stated divisibility fails.
    pub fn stated_failures(&self) -> Vec<usize> {
        self.verdicts.iter().filter(|v| !v.stated).map(|v| v.n).collect()
    }
}

fn fixed(x: f64) -> String {
    format!("{x:.10}")
}

/// `ln d_n` for `n = 0..=n_max`.
pub fn log_denominators(f: &RationalSeries) -> Vec<f64> {
    f.coeffs().iter().map(|c| ln_biguint(c.denom().magnitude())).collect()
}

fn ln_n_ln2(n: usize, log_d: f64) -> f64 {
    let l = (n as f64).ln();
    log_d / (n as f64 * l * l)
}

fn ln_n_ln(n: usize, log_d: f64) -> f64 {
    log_d / (n as f64 * (n as f64).ln())
}

/// `prod_{k=0}^{m-1} (k^2 + 1)` for `m = 0..=len`.
fn kk1_prefix_products(len: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(len + 1);
    let mut acc = BigUint::one();
    out.push(acc.clone());
    for k in 0..len as u64 {
        acc *= k * k + 1;
        out.push(acc.clone());
    }
    out
}

/// Evaluates the non-split recurrence to `n_max` and computes growth
/// statistics and divisibility verdicts for every `n`.
pub fn run_nonsplit_experiment(n_max: usize, exec: Exec) -> Result<NonsplitReport, ExperimentError> {
    if n_max < 10 {
        return Err(ExperimentError::TooShort { min: 10, got: n_max });
    }
    let entry = catalog::nonsplit_sq();
    let f = evaluate_auto(&entry.spec, n_max)?;
    let dens: Vec<BigUint> = f.coeffs().iter().map(|c| c.denom().magnitude().clone()).collect();
    let logs = log_denominators(&f);

    let records = (2..=n_max)
        .map(|n| GrowthRecord {
            n,
            log_dn: fixed(logs[n]),
            stat1: fixed(ln_n_ln2(n, logs[n])),
            stat2: (2 * n <= n_max).then(|| fixed(ln_n_ln(2 * n, logs[2 * n]) - ln_n_ln(n, logs[n]))),
        })
        .collect();

    let prods = kk1_prefix_products(n_max / 2 + 1);
    let mut lcms = Vec::with_capacity(dens.len());
    let mut running = BigUint::one();
    for d in &dens {
        running = running.lcm(d);
        lcms.push(running.clone());
    }
    let verdicts = exec.map_range(n_max + 1, |n| {
        let two_n = BigUint::one() << n;
        let scaled = &two_n * &dens[n];
        let divides = |p: &BigUint, m: &BigUint| (m % p).is_zero();
        DivisibilityVerdict {
            n,
            stated: divides(&prods[n / 2 + 1], &scaled),
            shortened: divides(&prods[n / 2], &scaled),
            running_lcm: divides(&prods[n / 2 + 1], &(&two_n * &lcms[n])),
        }
    });

    Ok(NonsplitReport {
        n_max,
        records,
        verdicts,
        stat1_at_max: ln_n_ln2(n_max, logs[n_max]),
    })
}

/// `l_n / l_{n+1}` and its distance to `pi^2 / 6`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftRecord {
    pub n: usize,
    #[serde(serialize_with = "ser_rational")]
    pub ratio: BigRational,
    /// `ratio` to 12 decimals.
    pub ratio_decimal: String,
    /// `|ratio - pi^2/6|` in scientific notation.
    pub gap: String,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

impl CsvRecord for DriftRecord {
    const HEADER: &'static str = "n,ratio,ratio_decimal,gap";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.n,
            format_rational(&self.ratio),
            self.ratio_decimal,
            self.gap
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftReport {
    pub n_max: usize,
    pub records: Vec<DriftRecord>,
    pub early: usize,
    pub late: usize,
    pub gap_early: f64,
    pub gap_late: f64,
}

impl DriftReport {
    /// The gap shrank between `early` and `late`.
    pub fn drifts(&self) -> bool {
        self.gap_late < self.gap_early
    }
}

/// `pi^2 / 6` to 11 decimals.
pub fn zeta2_rendered() -> String {
    format!("{ZETA2:.11}")
}

/// Drift records for `n = 1 .. n_max - 1`; the gap check compares the last
/// record with the one at `n_max / 10`.
pub fn run_dilog_drift(n_max: usize) -> Result<DriftReport, ExperimentError> {
    if n_max < 20 {
        return Err(ExperimentError::TooShort { min: 20, got: n_max });
    }
    let l = evaluate_auto(&catalog::dilog_inverse().spec, n_max)?;
    let records: Vec<DriftRecord> = (1..n_max)
        .map(|n| {
            let ratio = l.coeff(n) / l.coeff(n + 1);
            let gap = (rational_to_f64(&ratio) - ZETA2).abs();
            DriftRecord {
                n,
                ratio_decimal: rational_to_decimal(&ratio, 12),
                gap: format!("{gap:.6e}"),
                ratio,
            }
        })
        .collect();
    let (early, late) = (n_max / 10, n_max - 1);
    let gap_at = |n: usize| (rational_to_f64(&records[n - 1].ratio) - ZETA2).abs();
    Ok(DriftReport {
        n_max,
        early,
        late,
        gap_early: gap_at(early),
        gap_late: gap_at(late),
        records,
    })
}

/// Renders records as CSV (LF line endings, trailing newline) or pretty JSON.
pub fn render<R: CsvRecord>(records: &[R], format: Format) -> Result<String, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::Empty);
    }
    Ok(match format {
        Format::Csv => {
            let mut out = String::from(R::HEADER);
            out.push('\n');
            for r in records {
                let _ = writeln!(out, "{}", r.csv_row());
            }
            out
        }
        Format::Json => {
            let mut out = serde_json::to_string_pretty(records)?;
            out.push('\n');
            out
        }
    })
}

/// Writes [`render`]'s output to `path`.
pub fn emit<R: CsvRecord>(records: &[R], format: Format, path: &Path) -> Result<(), ExperimentError> {
    let text = render(records, format)?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn short_runs_are_rejected() {
        assert!(matches!(
            run_nonsplit_experiment(9, Exec::Sequential),
            Err(ExperimentError::TooShort { min: 10, got: 9 })
        ));
        assert!(matches!(run_dilog_drift(19), Err(ExperimentError::TooShort { .. })));
    }

    #[test]
    fn nonsplit_small_run() {
        let r = run_nonsplit_experiment(10, Exec::Sequential).unwrap();
        assert_eq!(r.records.first().unwrap().n, 2);
        assert_eq!(r.records.last().unwrap().n, 10);
        let row3 = &r.records[1];
        assert_eq!(row3.n, 3);
        let d3: f64 = row3.log_dn.parse().unwrap();
        assert!((d3.exp() - 5.0).abs() < 1e-9);
        assert_eq!(r.records.iter().filter(|g| g.stat2.is_some()).count(), 4);
        // n = 7: d_7 = 40885 holds a single 5 while the product holds 5^2.
        assert_eq!(r.stated_failures(), vec![7]);
        assert!(r.verdicts.iter().all(|v| v.shortened && v.running_lcm));
    }

    #[test]
    fn verdicts_do_not_depend_on_exec() {
        let a = run_nonsplit_experiment(60, Exec::Sequential).unwrap();
        let b = run_nonsplit_experiment(60, Exec::Parallel).unwrap();
        assert_eq!(a.verdicts, b.verdicts);
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn drift_ratio_at_five() {
        let r = run_dilog_drift(30).unwrap();
        assert_eq!(r.records[4].n, 5);
        assert_eq!(r.records[4].ratio, rat(372, 149));
        assert_eq!(r.records[4].ratio_decimal, "2.496644295302");
        assert_eq!(zeta2_rendered(), "1.64493406685");
    }

    #[test]
    fn csv_layout() {
        let r = run_nonsplit_experiment(10, Exec::Sequential).unwrap();
        let text = render(&r.records[..3], Format::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,log_dn,stat1,stat2");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("2,"));
        assert!(!text.contains('\r'));
        assert!(matches!(
            render::<GrowthRecord>(&[], Format::Csv),
            Err(ExperimentError::Empty)
        ));
        assert!(matches!(
            render::<GrowthRecord>(&[], Format::Json),
            Err(ExperimentError::Empty)
        ));
    }

    #[test]
    fn json_is_stable() {
        let r = run_dilog_drift(25).unwrap();
        let a = render(&r.records, Format::Json).unwrap();
        let b = render(&run_dilog_drift(25).unwrap().records, Format::Json).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v[4]["ratio"], "372/149");
    }
}
