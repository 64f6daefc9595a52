//! `da-denom`: evaluate recurrences, certify denominators, run the catalog
//! and the experiments.
//!
//! Exit status is 0 when every check passes, 1 when a check finds a
//! violation and 2 for usage, parse and eligibility errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use da_denom_core::arith::format_rational;
use da_denom_core::catalog;
use da_denom_core::certify::{self, CertifyError, DenominatorCertificate, ValuationRecord};
use da_denom_core::experiments::{self, CsvRecord, Format};
use da_denom_core::propcheck::{check_grid, Grid, GridOptions};
use da_denom_core::recurrence::{parse_spec, write_spec};
use da_denom_core::shift::{evaluate_auto, shift_to_nonnegative};
use da_denom_core::{Exec, RationalSeries, RecurrenceSpec};

#[derive(Parser)]
#[command(
    name = "da-denom",
    version,
    about = "Denominators of nonlinear convolution recurrences"
)]
struct Cli {
    /// Worker threads for parallel checks (1 runs sequentially).
    #[arg(long, global = true, env = "DA_DENOM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print f_0 .. f_n of a spec.
    Eval {
        #[command(flatten)]
        input: SpecInput,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Derive (delta, nu) and verify it against the computed denominators.
    Certify {
        #[command(flatten)]
        input: SpecInput,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        /// Strip primes from delta while the check stays clean.
        #[arg(long)]
        minimize_delta: bool,
        /// Comma-separated primes for the p-adic bound check.
        #[arg(long, value_delimiter = ',')]
        vadic: Vec<u64>,
        /// Write per-(n, p) valuation records in this format.
        #[arg(long, value_enum)]
        report: Option<Fmt>,
        /// Destination of the report (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a spec with negative sigma1 into one with sigma1 >= 0.
    Shift {
        #[command(flatten)]
        input: SpecInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force the factorial-ratio valuation inequality over a grid.
    PropCheck {
        /// Ranges such as `s=1..2,a=1..3,b=-4..4,k=2..3,n=1..12,sigma=0..2`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7,11,13")]
        primes: Vec<u64>,
        /// Cross-check Legendre valuations against expanded rationals.
        #[arg(long)]
        double_oracle: bool,
        #[command(flatten)]
        output: Output,
    },
    /// The worked examples and their claims.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// The growth and drift experiments.
    Experiment {
        #[arg(value_enum)]
        which: Experiment,
        #[arg(long)]
        n_max: Option<usize>,
        /// Run the non-split experiment to n = 2000 (slow).
        #[arg(long)]
        long: bool,
        /// Also write the divisibility verdicts of the non-split run here.
        #[arg(long)]
        verdicts: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Names and one-line summaries.
    List,
    /// Print an entry's spec in the DSL.
    Spec { name: String },
    /// Check the oracle and every claim of an entry (`all` for every entry).
    Run {
        name: String,
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Nonsplit,
    Drift,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fmt {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct SpecInput {
    /// Spec file in the recurrence DSL.
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Fmt::Text)]
    format: Fmt,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A command either passes or finds violations; errors are separate.
#[derive(PartialEq, Eq)]
enum Verdict {
    Pass,
    Violations,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let exec = match cli.threads {
        Some(1) => Exec::Sequential,
        _ => Exec::default(),
    };
    match run(cli.command, exec) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Violations) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(t) = threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) -> Result<()> {
    if threads == Some(0) {
        bail!("--threads must be positive");
    }
    Ok(())
}

fn run(command: Command, exec: Exec) -> Result<Verdict> {
    match command {
        Command::Eval { input, n_max, output } => eval(&load(&input.spec)?, n_max, &output),
        Command::Certify {
            input,
            n_max,
            minimize_delta,
            vadic,
            report,
            out,
        } => certify_cmd(
            &load(&input.spec)?,
            n_max,
            minimize_delta,
            &vadic,
            report,
            out.as_deref(),
            exec,
        ),
        Command::Shift { input, out } => {
            let res = shift_to_nonnegative(&load(&input.spec)?)?;
            let mut text = format!(
                "# g_m = f_(m+{}), checked from N = {}\n",
                res.offset, res.tightened_start
            );
            text.push_str(&write_spec(&res.shifted_spec));
            write_out(out.as_deref(), &text)?;
            Ok(Verdict::Pass)
        }
        Command::PropCheck {
            grid,
            primes,
            double_oracle,
            output,
        } => prop_check(grid.as_deref(), &primes, double_oracle, &output, exec),
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let mut text = String::new();
                for e in catalog::all() {
                    let _ = writeln!(text, "{:<44} {}", e.name, e.summary);
                }
                write_out(None, &text)?;
                Ok(Verdict::Pass)
            }
            CatalogAction::Spec { name } => {
                write_out(None, &write_spec(&catalog::by_name(&name)?.spec))?;
                Ok(Verdict::Pass)
            }
            CatalogAction::Run { name, n_max, output } => catalog_run(&name, n_max, &output),
        },
        Command::Experiment {
            which,
            n_max,
            long,
            verdicts,
            output,
        } => experiment(which, n_max, long, verdicts.as_deref(), &output, exec),
    }
}

fn load(path: &Path) -> Result<RecurrenceSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("in {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn data_format(fmt: Fmt) -> Result<Format> {
    match fmt {
        Fmt::Csv => Ok(Format::Csv),
        Fmt::Json => Ok(Format::Json),
        Fmt::Text => bail!("this output needs --format csv or --format json"),
    }
}

#[derive(serde::Serialize)]
struct Coefficient {
    n: usize,
    value: String,
}

impl CsvRecord for Coefficient {
    const HEADER: &'static str = "n,value";

    fn csv_row(&self) -> String {
        format!("{},{}", self.n, self.value)
    }
}

fn eval(spec: &RecurrenceSpec, n_max: usize, output: &Output) -> Result<Verdict> {
    let f = evaluate_auto(spec, n_max)?;
    let text = match output.format {
        Fmt::Text => f.coeffs().iter().enumerate().fold(String::new(), |mut s, (n, c)| {
            let _ = writeln!(s, "f_{n} = {}", format_rational(c));
            s
        }),
        fmt => {
            let rows: Vec<Coefficient> = f
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, c)| Coefficient {
                    n,
                    value: format_rational(c),
                })
                .collect();
            experiments::render(&rows, data_format(fmt)?)?
        }
    };
    write_out(output.out.as_deref(), &text)?;
    Ok(Verdict::Pass)
}

#[derive(serde::Serialize)]
struct ReportRow<'a> {
    check: &'static str,
    #[serde(flatten)]
    record: &'a ValuationRecord,
}

impl CsvRecord for ReportRow<'_> {
    const HEADER: &'static str = "check,n,p,actual,bound,margin";

    fn csv_row(&self) -> String {
        let r = self.record;
        format!("{},{},{},{},{},{}", self.check, r.n, r.p, r.actual, r.bound, r.margin())
    }
}

fn certify_cmd(
    spec: &RecurrenceSpec,
    n_max: usize,
    minimize: bool,
    vadic: &[u64],
    report: Option<Fmt>,
    out: Option<&Path>,
    exec: Exec,
) -> Result<Verdict> {
    // Negative sigma1: certify g_m = f_(m + offset) from the shifted spec.
    let (target, offset) = if spec.sigma1 < 0 {
        let res = shift_to_nonnegative(spec)?;
        (res.shifted_spec, res.offset)
    } else {
        (spec.clone(), 0)
    };
    let mut cert = match certify::derive_delta_nu(&target) {
        Ok(c) => c,
        Err(CertifyError::NotEligible(why)) => bail!("not eligible for certification: {why}"),
        Err(e) => return Err(e.into()),
    };
    let f = evaluate_auto(spec, n_max + offset)?;
    let g = RationalSeries::new(f.coeffs()[offset..].to_vec());
    if minimize {
        cert = certify::minimize_delta(&g, &cert, 0..=n_max.min(certify::DERIVE_PROBE));
    }
    let main = certify::verify_divisibility_with(&g, &cert, 0..=n_max, exec);
    let mut vadic_reports = Vec::new();
    for &p in vadic {
        vadic_reports.push((p, certify::vadic_check(&g, &cert, p, 0..=n_max)?));
    }

    let mut summary = String::new();
    if offset > 0 {
        let _ = writeln!(summary, "shifted: g_m = f_(m+{offset})");
    }
    describe(&mut summary, &cert);
    let _ = writeln!(
        summary,
        "divisibility n in 0..={n_max}: {} ({} indices, {} violations)",
        if main.is_clean() { "PASS" } else { "FAIL" },
        main.indices_checked,
        main.violations().len()
    );
    for v in main.violations().iter().take(10) {
        let _ = writeln!(
            summary,
            "  violation n = {} p = {}: v_p = {} < {}",
            v.n, v.p, v.actual, v.bound
        );
    }
    for (p, r) in &vadic_reports {
        let min = r.records.iter().map(|x| x.margin()).min();
        let _ = writeln!(
            summary,
            "{p}-adic bound: {} (min margin {})",
            if r.is_clean() { "PASS" } else { "FAIL" },
            min.map_or("-".to_string(), |m| m.to_string())
        );
    }
    let clean = main.is_clean() && vadic_reports.iter().all(|(_, r)| r.is_clean());

    match report {
        None | Some(Fmt::Text) => write_out(out, &summary)?,
        Some(fmt) => {
            let mut rows: Vec<ReportRow> = main
                .records
                .iter()
                .map(|record| ReportRow {
                    check: "divisibility",
                    record,
                })
                .collect();
            for (_, r) in &vadic_reports {
                rows.extend(r.records.iter().map(|record| ReportRow { check: "vadic", record }));
            }
            eprint!("{summary}");
            write_out(out, &experiments::render(&rows, data_format(fmt)?)?)?;
        }
    }
    Ok(if clean { Verdict::Pass } else { Verdict::Violations })
}

fn describe(out: &mut String, cert: &DenominatorCertificate) {
    let _ = writeln!(out, "delta = {}", cert.delta);
    let _ = writeln!(out, "nu = {}", cert.nu);
    let _ = writeln!(out, "s = {}", cert.s);
    let _ = writeln!(out, "provenance: {}", cert.provenance);
}

fn prop_check(grid: Option<&str>, primes: &[u64], double_oracle: bool, output: &Output, exec: Exec) -> Result<Verdict> {
    let grid: Grid = match grid {
        Some(g) => g.parse().map_err(|e| anyhow!("{e}"))?,
        None => Grid::default(),
    };
    let report = check_grid(&grid, primes, &GridOptions { double_oracle, exec })?;
    let text = match output.format {
        Fmt::Json => serde_json::to_string_pretty(&report)? + "\n",
        Fmt::Csv => bail!("prop-check supports --format text or json"),
        Fmt::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "checked: {}", report.checked);
            let _ = writeln!(s, "skipped (negative factorial argument): {}", report.skipped);
            let _ = writeln!(s, "skipped (all slots dropped): {}", report.all_slots_dropped);
            let _ = writeln!(s, "counterexamples: {}", report.counterexamples.len());
            for c in report.counterexamples.iter().take(10) {
                let _ = writeln!(s, "  {} p = {}: {} < {}", c.params, c.p, c.lhs, c.rhs);
            }
            if double_oracle {
                let _ = writeln!(
                    s,
                    "double oracle: {} compared, {} mismatches",
                    report.oracle_checked,
                    report.oracle_mismatches.len()
                );
            }
            if let Some(m) = report.min_margin {
                let _ = writeln!(s, "min margin: {m}");
            }
            s
        }
    };
    write_out(output.out.as_deref(), &text)?;
    Ok(if report.is_clean() {
        Verdict::Pass
    } else {
        Verdict::Violations
    })
}

fn catalog_run(name: &str, n_max: Option<usize>, output: &Output) -> Result<Verdict> {
    let entries = if name == "all" {
        catalog::all()
    } else {
        vec![catalog::by_name(name)?]
    };
    let mut reports = Vec::new();
    for e in &entries {
        reports.push(catalog::run(e, n_max)?);
    }
    let text = match output.format {
        Fmt::Text => reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"),
        Fmt::Json => serde_json::to_string_pretty(&reports)? + "\n",
        Fmt::Csv => bail!("catalog run supports --format text or json"),
    };
    write_out(output.out.as_deref(), &text)?;
    Ok(if reports.iter().all(|r| r.passed()) {
        Verdict::Pass
    } else {
        Verdict::Violations
    })
}

fn experiment(
    which: Experiment,
    n_max: Option<usize>,
    long: bool,
    verdicts: Option<&Path>,
    output: &Output,
    exec: Exec,
) -> Result<Verdict> {
    let fmt = match output.format {
        Fmt::Text => Format::Csv,
        f => data_format(f)?,
    };
    match which {
        Experiment::Nonsplit => {
            let n = n_max.unwrap_or(if long { 2000 } else { 400 });
            let r = experiments::run_nonsplit_experiment(n, exec)?;
            write_out(output.out.as_deref(), &experiments::render(&r.records, fmt)?)?;
            if let Some(path) = verdicts {
                experiments::emit(&r.verdicts, fmt, path)?;
            }
            let failures = r.stated_failures();
            eprintln!("stat1 at n = {n}: {:.6}", r.stat1_at_max);
            if let Some(last) = r.records.iter().rev().find_map(|g| g.stat2.as_ref().map(|s| (g.n, s))) {
                eprintln!("stat2 at n = {}: {}", last.0, last.1);
            }
            eprintln!(
                "prod_(k <= n/2) (k^2+1) | 2^n d_n: {} (failures at n = {:?})",
                if failures.is_empty() { "PASS" } else { "FAIL" },
                failures
            );
            eprintln!(
                "shortened product: {}; running lcm: {}",
                pass(r.verdicts.iter().all(|v| v.shortened)),
                pass(r.verdicts.iter().all(|v| v.running_lcm))
            );
            Ok(if failures.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Violations
            })
        }
        Experiment::Drift => {
            let n = n_max.unwrap_or(300);
            let r = experiments::run_dilog_drift(n)?;
            write_out(output.out.as_deref(), &experiments::render(&r.records, fmt)?)?;
            eprintln!("pi^2/6 = {}", experiments::zeta2_rendered());
            eprintln!(
                "gap({}) = {:.6e}, gap({}) = {:.6e}: {}",
                r.early,
                r.gap_early,
                r.late,
                r.gap_late,
                pass(r.drifts())
            );
            Ok(if r.drifts() { Verdict::Pass } else { Verdict::Violations })
        }
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
