//! One PASS/FAIL line per acceptance criterion.
//!
//! Two criteria cannot pass because the statements they check are false as
//! written (see README, "Known discrepancies"). They are listed in
//! `KNOWN_UNATTAINABLE` with the failure they must produce; this target
//! exits nonzero if any other criterion fails or if a known one fails
//! differently or starts passing.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use da_denom_core::arith::{factorial, format_rational, parse_rational, rat};
use da_denom_core::catalog::{self, CatalogEntry};
use da_denom_core::certify::{derive_delta_nu, verify_divisibility};
use da_denom_core::experiments::{run_dilog_drift, run_nonsplit_experiment};
use da_denom_core::propcheck::{check_grid, Grid, GridOptions};
use da_denom_core::recurrence::{evaluate, parse_spec};
use da_denom_core::shift::{evaluate_auto, shift_to_nonnegative};
use da_denom_core::valuation::{is_prime, legendre, primes_upto, vp_biguint};
use da_denom_core::{Exec, RationalSeries};

/// Criterion number and the exact detail its failure must report.
const KNOWN_UNATTAINABLE: &[(u8, &str)] = &[
    (5, "bernoulli: shifted initial value -1/2, stated 1/2"),
    (8, "product fails at n = [7, 17, 41]"),
];

type Criterion = (u8, &'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

/// Runs `claim_id` of `entry` on coefficients up to `n`, requiring the
/// claim's own limit to reach `n`.
fn claim(entry: &CatalogEntry, f: &RationalSeries, claim_id: &str, n: usize) -> Result<(), String> {
    let c = entry
        .claims
        .iter()
        .find(|c| c.id == claim_id)
        .ok_or_else(|| format!("{}: no claim {claim_id}", entry.name))?;
    if c.limit < n || f.order() <= n {
        return Err(format!("{} / {claim_id}: only checked to {}", entry.name, c.limit));
    }
    let o = c.check(f);
    if o.passed {
        Ok(())
    } else {
        Err(format!("{} / {claim_id}: {}", entry.name, o.detail))
    }
}

fn oracle_equivalence() -> Outcome {
    let want = [
        ("gregory", 60),
        ("bernoulli", 60),
        ("tangent", 60),
        ("kepler(3/5, 4/5)", 40),
        ("dilog-inverse", 60),
        ("painleve2(0, 0, 0, 1; 0, 1)", 40),
        ("weierstrass(4, 0)", 40),
    ];
    let mut failures = Vec::new();
    let mut compared = 0;
    for e in catalog::all() {
        if let Some((_, len)) = want.iter().find(|(n, _)| *n == e.name) {
            if e.overlap < *len {
                failures.push(format!("{}: overlap {} < {len}", e.name, e.overlap));
            }
        }
        let f = evaluate_auto(&e.spec, e.overlap).unwrap();
        let o = catalog::check_oracle(&e, &f, e.overlap);
        compared += 1;
        if !o.passed {
            failures.push(format!("{}: {}", e.name, o.detail));
        }
    }
    match failures.is_empty() {
        true => Outcome::new(true, format!("{compared} entries match their oracles")),
        false => Outcome::new(false, failures.join("; ")),
    }
}

fn integrality_claims() -> Outcome {
    let mut checks: Vec<(CatalogEntry, &str, usize)> = vec![
        (catalog::tangent(), "n!^2", 200),
        (catalog::gregory(), "24^n", 200),
        (catalog::bernoulli(), "24^n", 200),
        (catalog::riccati_family(1), "refined", 200),
        (catalog::by_name("painleve2").unwrap(), "display", 100),
        (catalog::by_name("weierstrass(4, 0)").unwrap(), "display", 100),
    ];
    for (g2, g3) in catalog::weierstrass_sample_points() {
        checks.push((catalog::weierstrass(g2, g3).unwrap(), "display", 100));
    }
    let mut failures = Vec::new();
    for (e, id, n) in &checks {
        let f = evaluate_auto(&e.spec, *n).unwrap();
        if let Err(why) = claim(e, &f, id, *n) {
            failures.push(why);
        }
    }
    match failures.is_empty() {
        true => Outcome::new(true, format!("{} claims, zero violations", checks.len())),
        false => Outcome::new(false, failures.join("; ")),
    }
}

fn certificate_soundness() -> Outcome {
    let mut failures = Vec::new();
    let mut certified = 0;
    for e in catalog::all() {
        let n_max = if e.spec.k0 >= 3 { 100 } else { 200 };
        let (target, offset) = match e.spec.sigma1 < 0 {
            true => {
                let r = shift_to_nonnegative(&e.spec).unwrap();
                (r.shifted_spec, r.offset)
            }
            false => (e.spec.clone(), 0),
        };
        let Ok(cert) = derive_delta_nu(&target) else { continue };
        let f = evaluate_auto(&e.spec, n_max).unwrap();
        let g = RationalSeries::new(f.coeffs()[offset..].to_vec());
        let rep = verify_divisibility(&g, &cert, 0..=n_max - offset);
        certified += 1;
        if let Some(v) = rep.violations().first() {
            failures.push(format!("{}: n = {} p = {}", e.name, v.n, v.p));
        }
    }
    match failures.is_empty() {
        true => Outcome::new(true, format!("{certified} eligible entries, zero violations")),
        false => Outcome::new(false, failures.join("; ")),
    }
}

fn factorial_ratio_grid() -> Outcome {
    let primes = primes_upto(13);
    let full = check_grid(&Grid::default(), &primes, &GridOptions::default()).unwrap();
    let small: Grid = "n=1..8".parse().unwrap();
    let opts = GridOptions {
        double_oracle: true,
        ..GridOptions::default()
    };
    let sub = check_grid(&small, &primes, &opts).unwrap();
    let ok = full.counterexamples.is_empty() && sub.oracle_mismatches.is_empty() && sub.oracle_checked == sub.checked;
    Outcome::new(
        ok,
        format!(
            "{} points, {} counterexamples; double oracle {} compared, {} mismatches",
            full.checked,
            full.counterexamples.len(),
            sub.oracle_checked,
            sub.oracle_mismatches.len()
        ),
    )
}

/// The shifted recurrences as stated, differing only in the linear rule.
fn stated_shift(linear_poly: &str) -> String {
    format!(
        "header\n  C = 1\n  a = [1]\n  b = [3]\n  sigma1 = 0\n  sigma2 = 0\n  k0 = 2\n  N = 0\n  denominator_mode = split\n\
         initial\n  1/2\n\
         rule sigma=0 k=1\n  term coeff_n_poly={linear_poly} slots=[[1]] guards=[_]\n\
         rule sigma=0 k=2\n  term coeff_n_poly=[-1] slots=[[1],[1]] guards=[_,_]\n"
    )
}

fn sigma_shift() -> Outcome {
    let mut failures = Vec::new();
    for (e, linear) in [(catalog::gregory(), "[0,-1]"), (catalog::bernoulli(), "[-1]")] {
        let r = shift_to_nonnegative(&e.spec).unwrap();
        let f = evaluate(&e.spec, 100).unwrap();
        let g = evaluate(&r.shifted_spec, 99).unwrap();
        if r.offset != 1 || f.coeffs()[1..] != *g.coeffs() {
            failures.push(format!("{}: shifted output differs", e.name));
        }
        let stated = parse_spec(&stated_shift(linear)).unwrap();
        let mut got = r.shifted_spec.clone();
        got.ode = None;
        let g0 = got.initial[0].clone();
        got.initial = stated.initial.clone();
        if got != stated {
            failures.push(format!("{}: shifted structure differs from print", e.name));
        } else if g0 != stated.initial[0] {
            failures.push(format!(
                "{}: shifted initial value {}, stated {}",
                e.name,
                format_rational(&g0),
                format_rational(&stated.initial[0])
            ));
        }
    }
    match failures.is_empty() {
        true => Outcome::new(true, "100 terms equal; structure and initial values as stated"),
        false => Outcome::new(false, failures.join("; ")),
    }
}

fn hurwitz_suite() -> Outcome {
    let e = catalog::weierstrass(rat(4, 1), rat(0, 1)).unwrap();
    let f = evaluate_auto(&e.spec, e.default_n_max).unwrap();
    let failures: Vec<String> = ["hurwitz-v2", "hurwitz-primes", "hurwitz-e"]
        .iter()
        .filter_map(|id| claim(&e, &f, id, 30).err())
        .collect();
    match failures.is_empty() {
        true => Outcome::new(true, "v2, prime and integrality properties hold for n <= 30"),
        false => Outcome::new(false, failures.join("; ")),
    }
}

fn dilog_coefficients() -> Outcome {
    let stated = ["0", "1", "-1/4", "1/72", "-1/576", "-31/86400", "-149/1036800"];
    let f = evaluate_auto(&catalog::dilog_inverse().spec, 6).unwrap();
    let head_ok = stated
        .iter()
        .enumerate()
        .all(|(n, p)| f.coeff(n) == &parse_rational(p).unwrap());
    let drift = run_dilog_drift(300).unwrap();
    Outcome::new(
        head_ok && drift.drifts(),
        format!(
            "head {}; gap({}) = {:.3e}, gap({}) = {:.3e}",
            if head_ok { "matches" } else { "differs" },
            drift.early,
            drift.gap_early,
            drift.late,
            drift.gap_late
        ),
    )
}

fn nonsplit_experiment() -> Outcome {
    let r = run_nonsplit_experiment(400, Exec::default()).unwrap();
    let failures = r.stated_failures();
    let soft = (0.40..=0.70).contains(&r.stat1_at_max);
    let soft_note = format!(
        "stat1(400) = {:.4} {}",
        r.stat1_at_max,
        if soft { "in window" } else { "outside window (flag)" }
    );
    if failures.is_empty() {
        Outcome::new(true, soft_note)
    } else {
        Outcome::new(false, format!("product fails at n = {failures:?}; {soft_note}"))
    }
}

fn legendre_oracle() -> Outcome {
    let mut bad = None;
    'outer: for p in (2..=50).filter(|&p| is_prime(p)) {
        for n in 0..=200u64 {
            if legendre(p, n).unwrap() != vp_biguint(p, &factorial(n)) {
                bad = Some((p, n));
                break 'outer;
            }
        }
    }
    match bad {
        None => Outcome::new(true, "n <= 200, p <= 50"),
        Some((p, n)) => Outcome::new(false, format!("mismatch at p = {p}, n = {n}")),
    }
}

fn spec_path(name: &str) -> String {
    format!("{}/../../specs/{name}.spec", env!("CARGO_MANIFEST_DIR"))
}

/// Runs the binary and returns stdout, stderr, exit code and any `--out`
/// file contents.
fn run_cli(args: &[String], threads: &str, out: Option<&PathBuf>) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_da-denom"))
        .args(args)
        .args(["--threads", threads])
        .output()
        .expect("binary runs");
    let mut bytes = o.stdout;
    bytes.extend(o.stderr);
    bytes.extend(format!("{:?}", o.status.code()).into_bytes());
    if let Some(p) = out {
        bytes.extend(std::fs::read(p).unwrap_or_default());
    }
    bytes
}

fn determinism() -> Outcome {
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let verdicts = tmp.join("acceptance-verdicts.csv");
    let s = |x: &str| x.to_string();
    let cases: Vec<(Vec<String>, Option<&PathBuf>)> = vec![
        (
            vec![s("eval"), s("--spec"), spec_path("gregory"), s("--n-max"), s("40")],
            None,
        ),
        (
            vec![
                s("eval"),
                s("--spec"),
                spec_path("kepler"),
                s("--n-max"),
                s("30"),
                s("--format"),
                s("json"),
            ],
            None,
        ),
        (
            vec![
                s("certify"),
                s("--spec"),
                spec_path("tangent"),
                s("--vadic"),
                s("2,3"),
                s("--report"),
                s("csv"),
            ],
            None,
        ),
        (
            vec![
                s("certify"),
                s("--spec"),
                spec_path("dilog-inverse"),
                s("--n-max"),
                s("60"),
            ],
            None,
        ),
        (vec![s("shift"), s("--spec"), spec_path("bernoulli")], None),
        (
            vec![
                s("prop-check"),
                s("--grid"),
                s("n=1..6"),
                s("--double-oracle"),
                s("--format"),
                s("json"),
            ],
            None,
        ),
        (
            vec![s("catalog"), s("run"), s("weierstrass"), s("--format"), s("json")],
            None,
        ),
        (
            vec![
                s("experiment"),
                s("nonsplit"),
                s("--n-max"),
                s("120"),
                s("--verdicts"),
                verdicts.display().to_string(),
            ],
            Some(&verdicts),
        ),
        (
            vec![
                s("experiment"),
                s("drift"),
                s("--n-max"),
                s("80"),
                s("--format"),
                s("json"),
            ],
            None,
        ),
    ];
    let mut differing = Vec::new();
    for (args, out) in &cases {
        let base = run_cli(args, "1", *out);
        let again = run_cli(args, "1", *out);
        let wide = run_cli(args, "4", *out);
        if base != again || base != wide {
            differing.push(args[..2].join(" "));
        }
    }
    match differing.is_empty() {
        true => Outcome::new(
            true,
            format!("{} invocations identical across runs and 1/4 threads", cases.len()),
        ),
        false => Outcome::new(false, format!("differs: {}", differing.join(", "))),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "oracle equivalence", oracle_equivalence),
        (2, "integrality claims", integrality_claims),
        (3, "certificate soundness", certificate_soundness),
        (4, "factorial-ratio grid", factorial_ratio_grid),
        (5, "sigma-shift equivalence", sigma_shift),
        (6, "Hurwitz suite", hurwitz_suite),
        (7, "dilog coefficients", dilog_coefficients),
        (8, "non-split experiment", nonsplit_experiment),
        (9, "Legendre oracle", legendre_oracle),
        (10, "determinism", determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let t = Instant::now();
        let o = check();
        let secs = t.elapsed().as_secs_f64();
        let mark = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {mark}  {name}: {} ({secs:.1}s)", o.detail);
        match KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id) {
            None if !o.passed => unexpected.push(id),
            Some((_, why)) if o.passed || !o.detail.contains(why) => unexpected.push(id),
            Some(_) => println!("             known unattainable, failing as documented"),
            None => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
