//! Line-oriented text format for recurrence specs.
//!
//! ```text
//! # tangent numbers: t_{n+1} = 1/(n+1) sum t_j t_{n-j}
//! header
//!   C = 1
//!   a = [1]
//!   b = [1]
//!   sigma1 = 0
//!   sigma2 = 0
//!   k0 = 2
//!   N = 1
//!   denominator_mode = split          # or: poly [1, 0, 1]
//! initial
//!   0, 1
//! rule sigma=0 k=2
//!   term coeff_n_poly=[1] slots=[[1],[1]] guards=[_,_]
//! ode y' - y^2 - 1
//! ```
//!
//! Polynomials are coefficient lists, lowest degree first. A guard entry
//! `u` means `j_t <= n - u`; `_` means no guard, and `guards=` may be left
//! out entirely. `#` starts a comment. The `ode` line is optional and takes
//! an expression in `x, y, y', y'', ...`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::{CoefficientRule, Denominator, RecurrenceSpec, SeparableTerm, ValidationError};
use crate::arith::format_rational;
use crate::poly::Poly;
use crate::series::parse_equation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid spec: {0}")]
    Validation(#[from] ValidationError),
}

struct Cursor {
    line: usize,
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(line: usize, text: &str) -> Self {
        Cursor {
            line,
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        let at = self.pos;
        let got = self.ident()?;
        if got != word {
            self.pos = at;
            self.ws();
            return Err(self.err(format!("expected '{word}'")));
        }
        Ok(())
    }

    fn number_text(&mut self) -> Result<String, ParseError> {
        self.ws();
        let start = self.pos;
        if matches!(self.chars.get(self.pos), Some('-') | Some('+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if digits == self.pos {
            self.pos = start;
            return Err(self.err("expected an integer"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn bigint(&mut self) -> Result<BigInt, ParseError> {
        let at = self.pos;
        let t = self.number_text()?;
        t.parse().map_err(|_| {
            self.pos = at;
            self.err("malformed integer")
        })
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.ws();
        let at = self.pos;
        let t = self.number_text()?;
        t.parse().map_err(|_| {
            self.pos = at;
            self.err("integer out of range")
        })
    }

    fn nonneg(&mut self) -> Result<usize, ParseError> {
        self.ws();
        let at = self.pos;
        let v = self.int()?;
        usize::try_from(v).map_err(|_| {
            self.pos = at;
            self.err("expected a non-negative integer")
        })
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        self.ws();
        let at = self.pos;
        let num = self.bigint()?;
        let den = if self.chars.get(self.pos) == Some(&'/') {
            self.pos += 1;
            let d = self.bigint()?;
            if d == BigInt::from(0) {
                self.pos = at;
                return Err(self.err("zero denominator"));
            }
            d
        } else {
            BigInt::from(1)
        };
        Ok(BigRational::new(num, den))
    }

    /// `[item, item, ...]`, possibly empty.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn poly(&mut self) -> Result<Poly, ParseError> {
        Ok(Poly::new(self.list(Cursor::bigint)?))
    }

    fn guard(&mut self) -> Result<Option<u64>, ParseError> {
        if self.eat('_') {
            return Ok(None);
        }
        Ok(Some(self.nonneg()? as u64))
    }
}

#[derive(Default)]
struct Header {
    c: Option<BigInt>,
    a: Option<Vec<i64>>,
    b: Option<Vec<i64>>,
    sigma1: Option<i64>,
    sigma2: Option<i64>,
    k0: Option<usize>,
    start: Option<usize>,
    mode: Option<Option<Poly>>,
}

enum Section {
    None,
    Header,
    Initial,
    Rule(i64, usize),
}

fn set<T>(slot: &mut Option<T>, value: T, cur: &Cursor, key: &str) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(ParseError {
            line: cur.line,
            column: 1,
            message: format!("duplicate key '{key}'"),
        });
    }
    *slot = Some(value);
    Ok(())
}

fn header_line(cur: &mut Cursor, h: &mut Header) -> Result<(), ParseError> {
    let key_at = cur.pos;
    let key = cur.ident()?;
    cur.expect('=')?;
    match key.as_str() {
        "C" => {
            let v = cur.bigint()?;
            set(&mut h.c, v, cur, &key)?
        }
        "a" => {
            let v = cur.list(Cursor::int)?;
            set(&mut h.a, v, cur, &key)?
        }
        "b" => {
            let v = cur.list(Cursor::int)?;
            set(&mut h.b, v, cur, &key)?
        }
        "sigma1" => {
            let v = cur.int()?;
            set(&mut h.sigma1, v, cur, &key)?
        }
        "sigma2" => {
            let v = cur.int()?;
            set(&mut h.sigma2, v, cur, &key)?
        }
        "k0" => {
            let v = cur.nonneg()?;
            set(&mut h.k0, v, cur, &key)?
        }
        "N" => {
            let v = cur.nonneg()?;
            set(&mut h.start, v, cur, &key)?
        }
        "denominator_mode" => {
            let at = cur.pos;
            let mode = cur.ident()?;
            let v = match mode.as_str() {
                "split" => None,
                "poly" => Some(cur.poly()?),
                _ => {
                    cur.pos = at;
                    cur.ws();
                    return Err(cur.err("expected 'split' or 'poly'"));
                }
            };
            set(&mut h.mode, v, cur, &key)?
        }
        _ => {
            cur.pos = key_at;
            cur.ws();
            return Err(cur.err(format!("unknown header key '{key}'")));
        }
    }
    cur.finish()
}

fn term_line(cur: &mut Cursor, sigma: i64, k: usize) -> Result<SeparableTerm, ParseError> {
    let mut n_poly = None;
    let mut slots: Option<Vec<Poly>> = None;
    let mut guards: Option<Vec<Option<u64>>> = None;
    let line_cur_start = cur.pos;
    while !cur.at_end() {
        let key_at = cur.pos;
        let key = cur.ident()?;
        cur.expect('=')?;
        let value_at = cur.pos;
        match key.as_str() {
            "coeff_n_poly" => {
                let v = cur.poly()?;
                set(&mut n_poly, v, cur, &key)?
            }
            "slots" => {
                let v = cur.list(Cursor::poly)?;
                if v.len() != k {
                    cur.pos = value_at;
                    cur.ws();
                    return Err(cur.err(format!(
                        "rule sigma={sigma} k={k} needs {k} slot polynomials, found {}",
                        v.len()
                    )));
                }
                set(&mut slots, v, cur, &key)?
            }
            "guards" => {
                let v = cur.list(Cursor::guard)?;
                if v.len() != k {
                    cur.pos = value_at;
                    cur.ws();
                    return Err(cur.err(format!("expected {k} guards, found {}", v.len())));
                }
                set(&mut guards, v, cur, &key)?
            }
            _ => {
                cur.pos = key_at;
                cur.ws();
                return Err(cur.err(format!("unknown term field '{key}'")));
            }
        }
    }
    let missing = |cur: &mut Cursor, what: &str| {
        cur.pos = line_cur_start;
        cur.err(format!("term is missing '{what}'"))
    };
    let n_poly = n_poly.ok_or_else(|| missing(cur, "coeff_n_poly"))?;
    let slots = slots.ok_or_else(|| missing(cur, "slots"))?;
    let guards = guards.unwrap_or_else(|| vec![None; k]);
    Ok(SeparableTerm::new(n_poly, slots, guards))
}

/// Parses and validates a spec document.
pub fn parse_spec(text: &str) -> Result<RecurrenceSpec, SpecError> {
    let mut header = Header::default();
    let mut header_line_no = None;
    let mut initial_line_no = None;
    let mut initial = Vec::new();
    let mut rules: BTreeMap<(i64, usize), CoefficientRule> = BTreeMap::new();
    let mut ode = None;
    let mut section = Section::None;
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let body = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(line_no, body);
        if cur.at_end() {
            continue;
        }
        let save = cur.pos;
        let word = cur.ident().ok();
        match word.as_deref() {
            Some("header") => {
                cur.finish()?;
                if header_line_no.is_some() {
                    return Err(cur.err("duplicate 'header' section").into());
                }
                header_line_no = Some(line_no);
                section = Section::Header;
            }
            Some("initial") => {
                cur.finish()?;
                if initial_line_no.is_some() {
                    return Err(cur.err("duplicate 'initial' section").into());
                }
                initial_line_no = Some(line_no);
                section = Section::Initial;
            }
            Some("rule") => {
                cur.keyword("sigma")?;
                cur.expect('=')?;
                let sigma = cur.int()?;
                cur.keyword("k")?;
                cur.expect('=')?;
                let k_at = cur.pos;
                let k = cur.nonneg()?;
                if k == 0 {
                    cur.pos = k_at;
                    cur.ws();
                    return Err(cur.err("k must be positive").into());
                }
                cur.finish()?;
                if rules.contains_key(&(sigma, k)) {
                    return Err(ParseError {
                        line: line_no,
                        column: 1,
                        message: format!("duplicate rule sigma={sigma} k={k}"),
                    }
                    .into());
                }
                rules.insert((sigma, k), CoefficientRule::new(sigma, k, Vec::new()));
                section = Section::Rule(sigma, k);
            }
            Some("ode") => {
                if ode.is_some() {
                    return Err(cur.err("duplicate 'ode' line").into());
                }
                cur.ws();
                let col = cur.pos + 1;
                let rest: String = cur.chars[cur.pos..].iter().collect();
                let expr = parse_equation(&rest).map_err(|e| ParseError {
                    line: line_no,
                    column: col,
                    message: e.to_string(),
                })?;
                ode = Some(expr);
            }
            Some("term") => match section {
                Section::Rule(sigma, k) => {
                    let term = term_line(&mut cur, sigma, k)?;
                    rules.get_mut(&(sigma, k)).expect("rule opened").terms.push(term);
                }
                _ => {
                    cur.pos = save;
                    cur.ws();
                    return Err(cur.err("'term' outside a rule block").into());
                }
            },
            _ => {
                cur.pos = save;
                match section {
                    Section::Header => header_line(&mut cur, &mut header)?,
                    Section::Initial => loop {
                        initial.push(cur.rational()?);
                        cur.eat(',');
                        if cur.at_end() {
                            break;
                        }
                    },
                    _ => {
                        cur.ws();
                        return Err(cur.err("expected 'header', 'initial', 'rule', 'term' or 'ode'").into());
                    }
                }
            }
        }
    }

    let h_line = header_line_no.ok_or(ParseError {
        line: last_line,
        column: 1,
        message: "missing 'header' section".into(),
    })?;
    if initial_line_no.is_none() {
        return Err(ParseError {
            line: last_line,
            column: 1,
            message: "missing 'initial' section".into(),
        }
        .into());
    }
    let missing = |key: &str| ParseError {
        line: h_line,
        column: 1,
        message: format!("header is missing '{key}'"),
    };
    let mode = header.mode.ok_or_else(|| missing("denominator_mode"))?;
    let denominator = match mode {
        None => Denominator::Split {
            a: header.a.ok_or_else(|| missing("a"))?,
            b: header.b.ok_or_else(|| missing("b"))?,
        },
        Some(m) => {
            if header.a.as_ref().is_some_and(|v| !v.is_empty()) || header.b.as_ref().is_some_and(|v| !v.is_empty()) {
                return Err(ParseError {
                    line: h_line,
                    column: 1,
                    message: "a and b must be empty in poly mode".into(),
                }
                .into());
            }
            Denominator::Poly(m)
        }
    };
    let spec = RecurrenceSpec {
        c: header.c.ok_or_else(|| missing("C"))?,
        denominator,
        sigma1: header.sigma1.ok_or_else(|| missing("sigma1"))?,
        sigma2: header.sigma2.ok_or_else(|| missing("sigma2"))?,
        k0: header.k0.ok_or_else(|| missing("k0"))?,
        start: header.start.ok_or_else(|| missing("N"))?,
        rules,
        initial,
        ode,
    };
    spec.validate()?;
    Ok(spec)
}

fn int_list(v: &[i64]) -> String {
    let items: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("[{}]", items.join(", "))
}

/// Renders a spec in the text format; `parse_spec` reads it back unchanged.
pub fn write_spec(spec: &RecurrenceSpec) -> String {
    let mut out = String::new();
    out.push_str("header\n");
    let _ = writeln!(out, "  C = {}", spec.c);
    match &spec.denominator {
        Denominator::Split { a, b } => {
            let _ = writeln!(out, "  a = {}", int_list(a));
            let _ = writeln!(out, "  b = {}", int_list(b));
        }
        Denominator::Poly(_) => {}
    }
    let _ = writeln!(out, "  sigma1 = {}", spec.sigma1);
    let _ = writeln!(out, "  sigma2 = {}", spec.sigma2);
    let _ = writeln!(out, "  k0 = {}", spec.k0);
    let _ = writeln!(out, "  N = {}", spec.start);
    match &spec.denominator {
        Denominator::Split { .. } => out.push_str("  denominator_mode = split\n"),
        Denominator::Poly(m) => {
            let _ = writeln!(out, "  denominator_mode = poly {m}");
        }
    }
    out.push_str("initial\n");
    let values: Vec<String> = spec.initial.iter().map(format_rational).collect();
    let _ = writeln!(out, "  {}", values.join(", "));
    for rule in spec.rules.values() {
        let _ = writeln!(out, "rule sigma={} k={}", rule.sigma, rule.k);
        for term in &rule.terms {
            let slots: Vec<String> = term.slot_polys.iter().map(Poly::to_string).collect();
            let guards: Vec<String> = term
                .guards
                .iter()
                .map(|g| g.map_or_else(|| "_".to_string(), |u| u.to_string()))
                .collect();
            let _ = writeln!(
                out,
                "  term coeff_n_poly={} slots=[{}] guards=[{}]",
                term.n_poly,
                slots.join(","),
                guards.join(",")
            );
        }
    }
    if let Some(ode) = &spec.ode {
        let _ = writeln!(out, "ode {ode}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    const TANGENT: &str = "\
# tangent numbers
header
  C = 1
  a = [1]
  b = [1]
  sigma1 = 0
  sigma2 = 0
  k0 = 2
  N = 1
  denominator_mode = split
initial
  0, 1
rule sigma=0 k=2
  term coeff_n_poly=[1] slots=[[1],[1]] guards=[_,_]
ode y' - y^2 - 1
";

    #[test]
    fn tangent_document() {
        let spec = parse_spec(TANGENT).unwrap();
        assert_eq!(spec.c, BigInt::from(1));
        assert_eq!(spec.s(), 1);
        assert_eq!(spec.k0, 2);
        assert_eq!(spec.start, 1);
        assert_eq!(spec.initial, vec![rat_int(0), rat_int(1)]);
        assert!(spec.ode.is_some());
        assert_eq!(parse_spec(&write_spec(&spec)).unwrap(), spec);
    }

    #[test]
    fn gcd_violation_is_validation_error() {
        let text = TANGENT.replace("a = [1]", "a = [2]").replace("b = [1]", "b = [4]");
        assert!(matches!(
            parse_spec(&text),
            Err(SpecError::Validation(ValidationError::NotCoprime { .. }))
        ));
    }

    #[test]
    fn positions_are_reported() {
        let text = TANGENT.replace("k0 = 2", "k0 = 2 extra");
        match parse_spec(&text) {
            Err(SpecError::Parse(e)) => {
                assert_eq!(e.line, 8);
                assert_eq!(e.column, 10);
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = TANGENT.replace("slots=[[1],[1]]", "slots=[[1]]");
        match parse_spec(&text) {
            Err(SpecError::Parse(e)) => assert_eq!(e.line, 14),
            other => panic!("unexpected {other:?}"),
        }
        let text = TANGENT.replace("initial\n  0, 1", "initial\n  0, 1/0");
        assert!(matches!(parse_spec(&text), Err(SpecError::Parse(_))));
        assert!(matches!(parse_spec("header\n"), Err(SpecError::Parse(_))));
    }

    #[test]
    fn poly_mode_parses() {
        let text = "\
header
  C = 1
  sigma1 = 0
  sigma2 = 0
  k0 = 2
  N = 0
  denominator_mode = poly [1, 0, 1]
initial
  1
rule sigma=0 k=2
  term coeff_n_poly=[1] slots=[[1],[1]]
";
        let spec = parse_spec(text).unwrap();
        assert!(!spec.eligibility().eligible());
        assert_eq!(parse_spec(&write_spec(&spec)).unwrap(), spec);
    }
}
