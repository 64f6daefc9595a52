//! Classical worked examples, each with an independent oracle and the
//! divisibility facts known for it.
//!
//! Every entry carries a [`RecurrenceSpec`], an [`Oracle`] that produces the
//! same coefficients (or a differential equation they must satisfy) without
//! going through the recurrence, and a list of machine-checkable [`Claim`]s.
//! [`run`] evaluates the recurrence once and checks everything against it.

mod claims;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{int, rat, rat_int};
use crate::poly::Poly;
use crate::recurrence::{CoefficientRule, Denominator, RecurrenceSpec, SeparableTerm, ValidationError};
use crate::series::{self, parse_equation, Expr, RationalSeries, SeriesError};
use crate::shift::{evaluate_auto, ShiftError};

pub use claims::{ClaimOutcome, ZETA2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("g2^3 = 27 g3^2: the invariants are degenerate")]
    DegenerateInvariants,
    #[error("sin(M) cos(M) = 0")]
    ZeroPhi2,
    #[error("sin(M)^2 + cos(M)^2 != 1")]
    NotOnUnitCircle,
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("evaluation failed: {0}")]
    Evaluation(#[from] ShiftError),
}

pub type SeriesFn = Arc<dyn Fn(usize) -> Result<RationalSeries, SeriesError> + Send + Sync>;
pub type ResidualFn = Arc<dyn Fn(&RationalSeries) -> Result<RationalSeries, SeriesError> + Send + Sync>;
pub type ClaimFn = Arc<dyn Fn(&RationalSeries, usize) -> ClaimOutcome + Send + Sync>;

/// An independent route to the coefficients.
#[derive(Clone)]
pub enum Oracle {
    /// `f_0 .. f_{len-1}` computed from closed-form series operations.
    Series { description: String, compute: SeriesFn },
    /// A residual that vanishes exactly when the coefficients solve the
    /// entry's differential equation.
    Residual { description: String, compute: ResidualFn },
}

impl Oracle {
    pub fn description(&self) -> &str {
        match self {
            Oracle::Series { description, .. } | Oracle::Residual { description, .. } => description,
        }
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Oracle({})", self.description())
    }
}

#[derive(Clone)]
pub struct Claim {
    pub id: String,
    pub statement: String,
    /// Largest index the claim is checked to by default.
    pub limit: usize,
    check: ClaimFn,
}

impl Claim {
    pub fn new(id: impl Into<String>, statement: impl Into<String>, limit: usize, check: ClaimFn) -> Self {
        Claim {
            id: id.into(),
            statement: statement.into(),
            limit,
            check,
        }
    }

    /// Checks the claim on `f`, up to `min(limit, f.order() - 1)`.
    pub fn check(&self, f: &RationalSeries) -> ClaimOutcome {
        let top = self.limit.min(f.order().saturating_sub(1));
        (self.check)(f, top)
    }
}

impl fmt::Debug for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Claim({}: {})", self.id, self.statement)
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub summary: String,
    pub spec: RecurrenceSpec,
    pub oracle: Oracle,
    /// Number of coefficients compared against the oracle.
    pub overlap: usize,
    pub default_n_max: usize,
    pub claims: Vec<Claim>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub statement: String,
    pub passed: bool,
    pub range: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub n_max: usize,
    pub results: Vec<ClaimResult>,
}

impl EntryReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

impl fmt::Display for EntryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (n <= {})", self.name, self.n_max)?;
        let w = self.results.iter().map(|r| r.id.len()).max().unwrap_or(0);
        for r in &self.results {
            let mark = if r.passed { "PASS" } else { "FAIL" };
            writeln!(f, "  {mark}  {:<w$}  {}  [{}]", r.id, r.statement, r.range)?;
            if !r.detail.is_empty() {
                writeln!(f, "        {:<w$}  {}", "", r.detail)?;
            }
        }
        Ok(())
    }
}

/// Compares `f` with the oracle on the first `len` coefficients.
pub fn check_oracle(entry: &CatalogEntry, f: &RationalSeries, len: usize) -> ClaimOutcome {
    let len = len.min(f.order());
    let head = f.truncate(len);
    match &entry.oracle {
        Oracle::Series { compute, .. } => match compute(len) {
            Ok(o) => match (0..len).find(|&n| o.coeff(n) != head.coeff(n)) {
                None => ClaimOutcome::pass(format!("n < {len}"), ""),
                Some(n) => ClaimOutcome::fail(
                    format!("n < {len}"),
                    format!("n = {n}: recurrence {} vs oracle {}", head.coeff(n), o.coeff(n)),
                ),
            },
            Err(e) => ClaimOutcome::fail(format!("n < {len}"), e.to_string()),
        },
        Oracle::Residual { compute, .. } => match compute(&head) {
            Ok(r) if r.is_zero() => {
                ClaimOutcome::pass(format!("n < {len}"), format!("residual zero to order {}", r.order()))
            }
            Ok(r) => {
                let first = (0..r.order()).find(|&i| !r.coeff(i).is_zero()).unwrap_or(0);
                ClaimOutcome::fail(
                    format!("n < {len}"),
                    format!("residual nonzero at x^{first}: {}", r.coeff(first)),
                )
            }
            Err(e) => ClaimOutcome::fail(format!("n < {len}"), e.to_string()),
        },
    }
}

/// Evaluates the entry to `n_max` and checks the oracle and every claim.
pub fn run(entry: &CatalogEntry, n_max: Option<usize>) -> Result<EntryReport, CatalogError> {
    let n_max = n_max.unwrap_or(entry.default_n_max);
    let f = evaluate_auto(&entry.spec, n_max)?;
    let mut results = Vec::with_capacity(entry.claims.len() + 1);
    let o = check_oracle(entry, &f, entry.overlap);
    results.push(o.into_result("oracle", entry.oracle.description()));
    let outcomes = crate::par::Exec::default().map(entry.claims.iter().collect(), |c| c.check(&f));
    for (c, o) in entry.claims.iter().zip(outcomes) {
        results.push(o.into_result(&c.id, &c.statement));
    }
    Ok(EntryReport {
        name: entry.name.clone(),
        n_max,
        results,
    })
}

/// Every entry at its default parameter point.
pub fn all() -> Vec<CatalogEntry> {
    let mut out = vec![
        riccati_family(0),
        riccati_family(1),
        riccati_family(2),
        gregory(),
        bernoulli(),
        tangent(),
    ];
    out.push(weierstrass(rat_int(4), rat_int(0)).expect("lemniscatic invariants are regular"));
    out.push(weierstrass(rat_int(20), rat_int(28)).expect("regular"));
    for (g2, g3) in weierstrass_sample_points() {
        out.push(weierstrass(g2, g3).expect("regular"));
    }
    out.push(painleve2(
        rat_int(0),
        rat_int(0),
        rat_int(0),
        rat_int(1),
        rat_int(0),
        rat_int(1),
    ));
    let [a, b, g, d, u0, u1] = painleve_sample_point();
    out.push(painleve2(a, b, g, d, u0, u1));
    out.push(kepler(rat(3, 5), rat(4, 5)).expect("Pythagorean point"));
    out.push(dilog_inverse());
    out.push(nonsplit_sq());
    out
}

/// Two fixed generic rational invariant pairs.
pub fn weierstrass_sample_points() -> Vec<(BigRational, BigRational)> {
    vec![(rat(3, 7), rat(-5, 11)), (rat(-12, 5), rat(7, 3))]
}

/// A fixed generic parameter point `(alpha, beta, gamma, delta, u0, u1)`.
pub fn painleve_sample_point() -> [BigRational; 6] {
    [rat(1, 3), rat(-2, 5), rat(3, 7), rat(5, 2), rat(1, 2), rat(-2, 3)]
}

/// Looks up an entry by its full name, or by the family name before `(`,
/// which selects the family's first (default) parameter point.
pub fn by_name(name: &str) -> Result<CatalogEntry, CatalogError> {
    let entries = all();
    let exact = entries.iter().position(|e| e.name == name);
    let family = || entries.iter().position(|e| e.name.split('(').next() == Some(name));
    match exact.or_else(family) {
        Some(i) => Ok(entries.into_iter().nth(i).expect("index in range")),
        None => Err(CatalogError::UnknownEntry(name.to_string())),
    }
}

fn plain(c: i64, slots: &[&[i64]]) -> SeparableTerm {
    SeparableTerm::plain(Poly::from_i64(&[c]), slots.iter().map(|s| Poly::from_i64(s)).collect())
}

fn guarded(c: i64, slots: &[&[i64]], guards: &[Option<u64>]) -> SeparableTerm {
    SeparableTerm::new(
        Poly::from_i64(&[c]),
        slots.iter().map(|s| Poly::from_i64(s)).collect(),
        guards.to_vec(),
    )
}

fn constant(c: &BigRational) -> Expr {
    Expr::Const(c.clone())
}

fn series_oracle(
    description: &str,
    f: impl Fn(usize) -> Result<RationalSeries, SeriesError> + Send + Sync + 'static,
) -> Oracle {
    Oracle::Series {
        description: description.to_string(),
        compute: Arc::new(f),
    }
}

fn ode_oracle(ode: Expr) -> Oracle {
    let description = format!("residual of {ode} = 0");
    Oracle::Residual {
        description,
        compute: Arc::new(move |f: &RationalSeries| f.ode_residual(&ode)),
    }
}

/// `f_{n+1} = sum_j f_j f_{n-j} / (n + a + 1)`, `f_0 = 1`.
pub fn riccati_family(a: u32) -> CatalogEntry {
    let ai = a as i64;
    let spec = RecurrenceSpec::new(
        int(1),
        Denominator::Split {
            a: vec![1],
            b: vec![ai + 1],
        },
        0,
        0,
        2,
        0,
        vec![CoefficientRule::new(0, 2, vec![plain(1, &[&[1], &[1]])])],
        vec![rat_int(1)],
    )
    .expect("valid for every a >= 0");
    let ode = parse_equation(&format!("x*y' + {a}*y - x*y^2 = {a}")).expect("well-formed");
    let spec = spec.with_ode(ode.clone());
    let mut claims = vec![
        claims::certificate(&spec),
        claims::integral(
            "factorials",
            format!("n! (n+{a})! f_n is an integer"),
            200,
            0,
            move |n| crate::arith::factorial(n as u64) * crate::arith::factorial(n as u64 + a as u64),
        ),
    ];
    if a == 0 {
        claims.push(claims::values(
            "all-ones",
            "f_n = 1 for n <= 200",
            (0..=200).map(|n| (n, rat_int(1))).collect(),
        ));
    }
    if a == 1 {
        claims.push(claims::integral(
            "refined",
            "denominator of f_n divides (n+1)!^2 / lcm(1..n+1)",
            200,
            0,
            |n| {
                let f = crate::arith::factorial(n as u64 + 1);
                &f * &f / crate::arith::lcm_upto(n as u64 + 1)
            },
        ));
        claims.push(claims::values("f3", "f_3 = 11/48", vec![(3, rat(11, 48))]));
    }
    CatalogEntry {
        name: format!("riccati({a})"),
        summary: format!("f_(n+1) = sum f_j f_(n-j) / (n + {}), f_0 = 1", a + 1),
        spec,
        oracle: ode_oracle(ode),
        overlap: 60,
        default_n_max: 200,
        claims,
    }
}

/// `x / log(1+x)`.
pub fn gregory() -> CatalogEntry {
    let spec = RecurrenceSpec::new(
        int(1),
        Denominator::Split { a: vec![1], b: vec![2] },
        -1,
        0,
        2,
        0,
        vec![
            CoefficientRule::new(
                0,
                1,
                vec![SeparableTerm::plain(Poly::from_i64(&[1, -1]), vec![Poly::one()])],
            ),
            CoefficientRule::new(-1, 2, vec![plain(-1, &[&[1], &[1]])]),
        ],
        vec![rat_int(1)],
    )
    .expect("valid");
    let spec = spec.with_ode(parse_equation("x*(1+x)*y' + y^2 - (1+x)*y").expect("well-formed"));
    let claims = vec![
        claims::certificate(&spec),
        claims::integral(
            "24^n",
            "24^n (n-1)! (n+1)! g_n is an integer (n >= 1)",
            200,
            1,
            twenty_four,
        ),
        claims::integral("stirling", "lcm(1..n+1) n! g_n is an integer", 200, 0, |n| {
            crate::arith::lcm_upto(n as u64 + 1) * crate::arith::factorial(n as u64)
        }),
        claims::values(
            "head",
            "(g_0, g_1, g_2, g_3) = (1, 1/2, -1/12, 1/24)",
            vec![(0, rat(1, 1)), (1, rat(1, 2)), (2, rat(-1, 12)), (3, rat(1, 24))],
        ),
    ];
    CatalogEntry {
        name: "gregory".into(),
        summary: "x / log(1+x): g_(n+1) = -((n-1) g_n + sum_{j=1}^n g_j g_(n+1-j)) / (n+2)".into(),
        spec,
        oracle: series_oracle("x / log(1+x) by series division", |len| {
            RationalSeries::one(len).div(&series::log1p_over_x(len))
        }),
        overlap: 60,
        default_n_max: 200,
        claims,
    }
}

fn twenty_four(n: usize) -> num_bigint::BigUint {
    num_traits::pow(num_bigint::BigUint::from(24u32), n)
        * crate::arith::factorial(n as u64 - 1)
        * crate::arith::factorial(n as u64 + 1)
}

/// `x / (e^x - 1)` as a series; `B_{2n} = (2n)! b_{2n}`.
pub fn bernoulli_series(len: usize) -> Result<RationalSeries, SeriesError> {
    RationalSeries::one(len).div(&series::expm1_over_x(len))
}

/// `x / (e^x - 1)`.
pub fn bernoulli() -> CatalogEntry {
    let spec = RecurrenceSpec::new(
        int(1),
        Denominator::Split { a: vec![1], b: vec![2] },
        -1,
        0,
        2,
        0,
        vec![
            CoefficientRule::new(0, 1, vec![plain(-1, &[&[1]])]),
            CoefficientRule::new(-1, 2, vec![plain(-1, &[&[1], &[1]])]),
        ],
        vec![rat_int(1)],
    )
    .expect("valid");
    let spec = spec.with_ode(parse_equation("x*y' + y^2 + (x-1)*y").expect("well-formed"));
    let claims = vec![
        claims::certificate(&spec),
        claims::integral(
            "24^n",
            "24^n (n-1)! (n+1)! b_n is an integer (n >= 1)",
            200,
            1,
            twenty_four,
        ),
        claims::clausen_von_staudt(200),
        claims::values(
            "head",
            "B_2 = 1/6 and B_4 = -1/30",
            vec![(2, rat(1, 12)), (4, rat(-1, 720))],
        ),
    ];
    CatalogEntry {
        name: "bernoulli".into(),
        summary: "x / (e^x - 1): b_(n+1) = -(b_n + sum_{j=1}^n b_j b_(n+1-j)) / (n+2)".into(),
        spec,
        oracle: series_oracle("x / (e^x - 1) by series division", bernoulli_series),
        overlap: 60,
        default_n_max: 200,
        claims,
    }
}

/// `tan x`.
pub fn tangent() -> CatalogEntry {
    let spec = RecurrenceSpec::new(
        int(1),
        Denominator::Split { a: vec![1], b: vec![1] },
        0,
        0,
        2,
        1,
        vec![CoefficientRule::new(0, 2, vec![plain(1, &[&[1], &[1]])])],
        vec![rat_int(0), rat_int(1)],
    )
    .expect("valid");
    let spec = spec.with_ode(parse_equation("y' - y^2 - 1").expect("well-formed"));
    let claims = vec![
        claims::certificate(&spec),
        claims::integral("n!^2", "n!^2 t_n is an integer", 200, 0, |n| {
            let f = crate::arith::factorial(n as u64);
            &f * &f
        }),
        claims::tangent_bernoulli(60),
        claims::values("t5", "t_5 = 2/15", vec![(5, rat(2, 15))]),
    ];
    CatalogEntry {
        name: "tangent".into(),
        summary: "tan x: t_(n+1) = sum t_j t_(n-j) / (n+1), n >= 1".into(),
        spec,
        oracle: series_oracle("sin / cos by series division", |len| {
            series::sin(len).div(&series::cos(len))
        }),
        overlap: 60,
        default_n_max: 200,
        claims,
    }
}

/// Weierstrass `p` through `u_n = p_(n+2)`, where
/// `p(x) = 1/x^2 + sum_{n >= 2} p_n x^(2n-2)`.
pub fn weierstrass(g2: BigRational, g3: BigRational) -> Result<CatalogEntry, CatalogError> {
    let cube = &g2 * &g2 * &g2;
    if cube == rat_int(27) * &g3 * &g3 {
        return Err(CatalogError::DegenerateInvariants);
    }
    let u0 = &g2 / rat_int(20);
    let u1 = &g3 / rat_int(28);
    let spec = RecurrenceSpec::new(
        int(1),
        Denominator::Split {
            a: vec![1, 2],
            b: vec![0, 7],
        },
        1,
        1,
        2,
        1,
        vec![CoefficientRule::new(1, 2, vec![plain(3, &[&[1], &[1]])])],
        vec![u0, u1],
    )?;
    // F = x^2 p = 1 + sum u_n x^(2n+4) solves
    // 12 F^2 - 2 x^2 F'' + 8 x F' - 12 F - g2 x^4 = 0.
    let ode = Expr::Add(vec![
        parse_equation("12*y^2 - 2*x^2*y'' + 8*x*y' - 12*y").expect("well-formed"),
        Expr::Neg(Box::new(Expr::Mul(vec![
            constant(&g2),
            Expr::Pow(Box::new(Expr::X), 4),
        ]))),
    ]);
    let residual_ode = ode.clone();
    let oracle = Oracle::Residual {
        description: format!("12 p^2 - 2 p'' - g2 = 0 on F = x^2 p, i.e. {ode} = 0"),
        compute: Arc::new(move |u: &RationalSeries| laurent_tail(u).ode_residual(&residual_ode)),
    };
    let d = crate::arith::common_denominator(&spec.initial).magnitude().clone();
    let mut claims = vec![claims::certificate(&spec), claims::weierstrass_display(d, 100)];
    if g2 == rat_int(4) && g3.is_zero() {
        claims.extend(claims::hurwitz(30));
    }
    if g2 == rat_int(4) && g3.is_zero() {
        claims.push(claims::values(
            "p2",
            "p_2 = 1/5 and p_3 = 0",
            vec![(0, rat(1, 5)), (1, rat_int(0))],
        ));
    }
    Ok(CatalogEntry {
        name: format!(
            "weierstrass({}, {})",
            crate::arith::format_rational(&g2),
            crate::arith::format_rational(&g3)
        ),
        summary: "u_(n+1) = 3 sum_{j<n} u_j u_(n-1-j) / ((2n+7) n), u_n = p_(n+2)".into(),
        spec,
        oracle,
        overlap: 40,
        default_n_max: 100,
        claims,
    })
}

/// `F = 1 + sum u_n x^(2n+4)`, to the order the `u_n` determine.
pub fn laurent_tail(u: &RationalSeries) -> RationalSeries {
    let order = 2 * u.order() + 4;
    let mut c = vec![BigRational::zero(); order];
    c[0] = BigRational::one();
    for (n, v) in u.coeffs().iter().enumerate() {
        c[2 * n + 4] = v.clone();
    }
    RationalSeries::new(c)
}

/// Painleve II' `y'' = delta (2y^3 - 2xy) + gamma (6y^2 + x) + beta y + alpha`.
///
/// The coefficient recurrence is the one obtained from the equation itself:
/// `n (n+1) u_(n+1) = 2 delta [y^3]_(n-1) + 6 gamma [y^2]_(n-1) + beta u_(n-1)
/// - 2 delta u_(n-2)` for `n >= 2`, except that `gamma x` contributes at
/// `n = 2`, so `u_3` is an initial value when `gamma != 0`.
pub fn painleve2(
    alpha: BigRational,
    beta: BigRational,
    gamma: BigRational,
    delta: BigRational,
    u0: BigRational,
    u1: BigRational,
) -> CatalogEntry {
    let two = rat_int(2);
    let u2 = &delta * &u0 * &u0 * &u0 + rat_int(3) * &gamma * &u0 * &u0 + &beta * &u0 / &two + &alpha / &two;
    let mut initial = vec![u0.clone(), u1.clone(), u2.clone()];
    if !gamma.is_zero() {
        let u3 = (rat_int(6) * &delta * &u0 * &u0 * &u1 + rat_int(12) * &gamma * &u0 * &u1 + &beta * &u1
            - &two * &delta * &u0
            + &gamma)
            / rat_int(6);
        initial.push(u3);
    }
    let weights = [
        ((1, 3), &two * &delta),
        ((1, 2), rat_int(6) * &gamma),
        ((1, 1), beta.clone()),
        ((2, 1), -&two * &delta),
    ];
    let c = weights.iter().fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
    let rules = weights
        .iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|&((sigma, k), ref w)| {
            let coeff = (w * BigRational::from_integer(c.clone())).to_integer();
            CoefficientRule::new(
                sigma,
                k,
                vec![SeparableTerm::plain(Poly::constant(coeff), vec![Poly::one(); k])],
            )
        })
        .collect();
    let start = initial.len() - 1;
    let spec = RecurrenceSpec::new(
        c,
        Denominator::Split {
            a: vec![1, 1],
            b: vec![1, 0],
        },
        1,
        2,
        3,
        start,
        rules,
        initial,
    )
    .expect("valid for all parameters");
    let ode = Expr::Add(vec![
        Expr::Deriv(2),
        Expr::Neg(Box::new(Expr::Mul(vec![
            constant(&delta),
            parse_equation("2*y^3 - 2*x*y").expect("well-formed"),
        ]))),
        Expr::Neg(Box::new(Expr::Mul(vec![
            constant(&gamma),
            parse_equation("6*y^2 + x").expect("well-formed"),
        ]))),
        Expr::Neg(Box::new(Expr::Mul(vec![constant(&beta), Expr::Deriv(0)]))),
        Expr::Neg(Box::new(constant(&alpha))),
    ]);
    let disp_c = [&two * &delta, rat_int(6) * &gamma, &two * &beta]
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let disp_d = crate::arith::common_denominator(&[u0.clone(), u1.clone(), u2]);
    let claims = vec![
        claims::certificate(&spec),
        claims::painleve_display(disp_c.magnitude().clone(), disp_d.magnitude().clone(), 100),
    ];
    let f = crate::arith::format_rational;
    CatalogEntry {
        name: format!(
            "painleve2({}, {}, {}, {}; {}, {})",
            f(&alpha),
            f(&beta),
            f(&gamma),
            f(&delta),
            f(&u0),
            f(&u1)
        ),
        summary: "Painleve II': y'' = delta (2y^3 - 2xy) + gamma (6y^2 + x) + beta y + alpha".into(),
        spec: spec.with_ode(ode.clone()),
        oracle: ode_oracle(ode),
        overlap: 40,
        default_n_max: 100,
        claims,
    }
}

/// Kepler's equation `E - x sin E = M` for `phi(x) = E - M`.
pub fn kepler(sin_m: BigRational, cos_m: BigRational) -> Result<CatalogEntry, CatalogError> {
    if &sin_m * &sin_m + &cos_m * &cos_m != rat_int(1) {
        return Err(CatalogError::NotOnUnitCircle);
    }
    let phi2 = &sin_m * &cos_m;
    if phi2.is_zero() {
        return Err(CatalogError::ZeroPhi2);
    }
    // phi_(n+1) = (P1 + P2 + P3) / (2 phi2 n). The pair (n-2, 2) and its
    // mirror contribute -2(n-3) phi2 phi_(n-2) before the index shift.
    // With phi2 = p/q the rules carry q and C = 2p.
    let p = phi2.numer().clone();
    let q = phi2.denom().clone();
    let rules = vec![
        CoefficientRule::new(-1, 2, vec![guarded(1, &[&[0, 1], &[0, 1]], &[Some(0), Some(0)])]),
        CoefficientRule::new(
            -3,
            2,
            vec![
                plain(-1, &[&[0, 1], &[0, 1]]),
                plain(2, &[&[0, 1], &[1]]),
                plain(-1, &[&[1], &[1]]),
            ],
        ),
        CoefficientRule::new(-3, 4, vec![plain(-1, &[&[0, 1], &[0, 1], &[1], &[1]])]),
    ]
    .into_iter()
    .map(|r| CoefficientRule::new(r.sigma, r.k, r.terms.iter().map(|t| t.scaled(&q)).collect()))
    .collect();
    let spec = RecurrenceSpec::new(
        int(2) * &p,
        Denominator::Split { a: vec![1], b: vec![0] },
        -3,
        -1,
        4,
        2,
        rules,
        vec![rat_int(0), sin_m.clone(), phi2.clone()],
    )?;
    let ode = parse_equation("x^2*(x^2-1)*y'^2 - y^2 + 2*x*y'*y - x^2*y'^2*y^2").expect("well-formed");
    let spec = spec.with_ode(ode);
    let delta = sin_m.denom().magnitude().lcm(cos_m.denom().magnitude());
    let (s, c) = (sin_m.clone(), cos_m.clone());
    let claims = vec![
        claims::certificate(&spec),
        claims::integral(
            "delta^(n+1) n!",
            format!("{delta}^(n+1) n! phi_n is an integer (delta = common denominator of sin M, cos M)"),
            60,
            0,
            move |n| num_traits::pow(delta.clone(), n + 1) * crate::arith::factorial(n as u64),
        ),
        claims::values(
            "head",
            "phi_1 = sin M and phi_2 = sin M cos M",
            vec![(1, sin_m), (2, phi2)],
        ),
    ];
    let f = crate::arith::format_rational;
    Ok(CatalogEntry {
        name: format!("kepler({}, {})", f(&s), f(&c)),
        summary: "phi = E - M for E - x sin E = M, with guarded quadratic and quartic rules".into(),
        spec,
        oracle: series_oracle("fixed point of phi = x sin(M + phi)", move |len| {
            series::fixed_point_solve_kepler(&s, &c, len)
        }),
        overlap: 40,
        default_n_max: 100,
        claims,
    })
}

/// Compositional inverse of `Li_2`.
pub fn dilog_inverse() -> CatalogEntry {
    let sq = &[0, -1, 1][..]; // J (J - 1)
    let id = &[0, 1][..];
    let one = &[1][..];
    let g = Some(0);
    let rules = vec![
        CoefficientRule::new(
            -2,
            2,
            vec![guarded(-1, &[sq, one], &[g, None]), guarded(1, &[id, id], &[g, g])],
        ),
        CoefficientRule::new(
            -2,
            3,
            vec![
                guarded(1, &[sq, one, one], &[g, None, None]),
                guarded(-1, &[id, id, one], &[g, g, None]),
            ],
        ),
        CoefficientRule::new(-3, 3, vec![guarded(-1, &[id, id, id], &[g, g, g])]),
    ];
    let spec = RecurrenceSpec::new(
        int(1),
        Denominator::Split {
            a: vec![1, 1],
            b: vec![1, 1],
        },
        -3,
        -2,
        3,
        1,
        rules,
        vec![rat_int(0), rat_int(1)],
    )
    .expect("valid");
    let spec = spec.with_ode(parse_equation("y''*y - y''*y^2 + y'^3 + y'^2*y - y'^2").expect("well-formed"));
    let stated = [
        rat(0, 1),
        rat(1, 1),
        rat(-1, 4),
        rat(1, 72),
        rat(-1, 576),
        rat(-31, 86400),
        rat(-149, 1036800),
    ];
    let claims = vec![
        claims::certificate(&spec),
        claims::values(
            "head",
            "l_0 .. l_6 = 0, 1, -1/4, 1/72, -1/576, -31/86400, -149/1036800",
            stated.into_iter().enumerate().collect(),
        ),
        claims::dilog_drift(300),
    ];
    CatalogEntry {
        name: "dilog-inverse".into(),
        summary: "l with Li_2(l(x)) = x: l_(n+1) = (five guarded sums) / (n+1)^2".into(),
        spec,
        oracle: series_oracle("reversion of Li_2", |len| series::li2(len).reverse()),
        overlap: 60,
        default_n_max: 300,
        claims,
    }
}

/// `f_(n+1) = sum f_k f_(n-k) / (n^2 + 1)`: the denominator does not split.
pub fn nonsplit_sq() -> CatalogEntry {
    let spec = RecurrenceSpec::new(
        int(1),
        Denominator::Poly(Poly::from_i64(&[1, 0, 1])),
        0,
        0,
        2,
        0,
        vec![CoefficientRule::new(0, 2, vec![plain(1, &[&[1], &[1]])])],
        vec![rat_int(1)],
    )
    .expect("valid");
    // (theta^2 + 1) (y - 1)/x = y^2 with theta = x d/dx.
    let ode = parse_equation("x^2*y'' - x*y' + 2*y - x*y^2 = 2").expect("well-formed");
    let spec = spec.with_ode(ode.clone());
    let claims = vec![
        claims::not_eligible(&spec),
        claims::values(
            "head",
            "f_3 = 3/5 and f_4 = 8/25",
            vec![(3, rat(3, 5)), (4, rat(8, 25))],
        ),
        claims::nonsplit_product(400),
    ];
    CatalogEntry {
        name: "nonsplit".into(),
        summary: "f_(n+1) = sum f_k f_(n-k) / (n^2 + 1), f_0 = 1".into(),
        spec,
        oracle: ode_oracle(ode),
        overlap: 60,
        default_n_max: 400,
        claims,
    }
}

/// `prod_{k <= floor(n/2)} (k^2 + 1)`.
pub fn nonsplit_product(n: usize) -> BigInt {
    (0..=n as i64 / 2).fold(BigInt::one(), |acc, k| acc * BigInt::from(k * k + 1))
}

pub(crate) fn abs_denominator(r: &BigRational) -> num_bigint::BigUint {
    r.denom().abs().magnitude().clone()
}
