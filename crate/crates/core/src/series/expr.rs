//! Polynomial differential expressions `Q(x, y, y', ..., y'''')` and their
//! evaluation on truncated series.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! equation := expr ( '=' expr )?
//! expr     := term ( ('+' | '-') term )*
//! term     := unary ( ('*' | '/')? unary )*      juxtaposition multiplies
//! unary    := '-' unary | power
//! power    := atom ( '^' integer )?
//! atom     := integer | 'x' | 'y' "'"* | '(' expr ')'
//! ```
//!
//! Division is only allowed by constant subexpressions, so `3/4 y` is fine
//! and `x / y` is rejected.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{RationalSeries, SeriesError};
use crate::arith::format_rational;

/// Highest derivative an expression may mention.
pub const MAX_DERIVATIVE: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(BigRational),
    X,
    /// `y^(k)`, with `Deriv(0)` being `y` itself.
    Deriv(usize),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn max_derivative(&self) -> Option<usize> {
        match self {
            Expr::Const(_) | Expr::X => None,
            Expr::Deriv(k) => Some(*k),
            Expr::Add(v) | Expr::Mul(v) => v.iter().filter_map(Expr::max_derivative).max(),
            Expr::Neg(e) | Expr::Pow(e, _) => e.max_derivative(),
        }
    }

    fn constant_value(&self) -> Option<BigRational> {
        match self {
            Expr::Const(c) => Some(c.clone()),
            Expr::X | Expr::Deriv(_) => None,
            Expr::Add(v) => v.iter().map(Expr::constant_value).sum(),
            Expr::Mul(v) => v.iter().map(Expr::constant_value).product(),
            Expr::Neg(e) => e.constant_value().map(|c| -c),
            Expr::Pow(e, k) => e.constant_value().map(|c| num_traits::pow(c, *k as usize)),
        }
    }

    /// `Q(x, y, y', ...)` with every series truncated to `order`.
    fn eval(&self, derivs: &[RationalSeries], order: usize) -> RationalSeries {
        match self {
            Expr::Const(c) => RationalSeries::constant(c.clone(), order),
            Expr::X => RationalSeries::x(order),
            Expr::Deriv(k) => derivs[*k].truncate(order),
            Expr::Add(v) => v
                .iter()
                .fold(RationalSeries::zero(order), |acc, e| &acc + &e.eval(derivs, order)),
            Expr::Mul(v) => v
                .iter()
                .fold(RationalSeries::one(order), |acc, e| acc.mul(&e.eval(derivs, order))),
            Expr::Neg(e) => -&e.eval(derivs, order),
            Expr::Pow(e, k) => e.eval(derivs, order).pow(*k),
        }
    }

    /// Evaluates the expression on `y`.
    ///
    /// The residual has order `y.order() - max_derivative`, which must be
    /// at least one.
    pub fn residual(&self, y: &RationalSeries) -> Result<RationalSeries, SeriesError> {
        let top = self.max_derivative().unwrap_or(0);
        if top >= y.order() {
            return Err(SeriesError::OrderTooLow {
                order: y.order(),
                needed: top + 1,
            });
        }
        let mut derivs = vec![y.clone()];
        for _ in 0..top {
            let next = derivs.last().expect("non-empty").derivative();
            derivs.push(next);
        }
        Ok(self.eval(&derivs, y.order() - top))
    }
}

impl RationalSeries {
    /// `Q(x, y, y', ...)` evaluated on this series; a zero result
    /// certifies that the series solves `Q = 0` to the returned order.
    pub fn ode_residual(&self, equation: &Expr) -> Result<RationalSeries, SeriesError> {
        equation.residual(self)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_integer() && c >= &BigRational::zero() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "({})", format_rational(c))
                }
            }
            Expr::X => write!(f, "x"),
            Expr::Deriv(k) => write!(f, "y{}", "'".repeat(*k)),
            Expr::Add(v) => {
                write!(f, "(")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            Expr::Mul(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{e}")?;
                }
                if v.is_empty() {
                    write!(f, "1")?;
                }
                Ok(())
            }
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Pow(e, k) => write!(f, "({e})^{k}"),
        }
    }
}

/// Parses `lhs` or `lhs = rhs` (read as `lhs - rhs`).
pub fn parse_equation(text: &str) -> Result<Expr, SeriesError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let lhs = p.expr()?;
    p.skip_ws();
    let out = if p.eat('=') {
        let rhs = p.expr()?;
        Expr::Add(vec![lhs, negate(rhs)])
    } else {
        lhs
    };
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        e => Expr::Neg(Box::new(e)),
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> SeriesError {
        SeriesError::Equation(format!("{msg} at offset {}", self.pos + 1))
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, SeriesError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(negate(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, SeriesError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    factors.push(self.unary()?);
                }
                Some('/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    let c = d.constant_value().ok_or_else(|| {
                        SeriesError::Equation(format!("division by a non-constant at offset {}", at + 1))
                    })?;
                    if c.is_zero() {
                        return Err(SeriesError::Equation(format!("division by zero at offset {}", at + 1)));
                    }
                    factors.push(Expr::Const(c.recip()));
                }
                Some(c) if c.is_ascii_digit() || c == 'x' || c == 'y' || c == '(' => {
                    factors.push(self.unary()?);
                }
                _ => break,
            }
        }
        if factors.len() == 1 {
            return Ok(factors.pop().expect("one factor"));
        }
        let folded: Option<BigRational> = factors.iter().map(Expr::constant_value).product();
        Ok(match folded {
            Some(c) => Expr::Const(c),
            None => Expr::Mul(factors),
        })
    }

    fn unary(&mut self) -> Result<Expr, SeriesError> {
        if self.eat('-') {
            return Ok(negate(self.unary()?));
        }
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let digits = self.digits().ok_or_else(|| self.error("expected exponent"))?;
            let k: u32 = digits.parse().map_err(|_| self.error("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<Expr, SeriesError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some('x') => {
                self.pos += 1;
                Ok(Expr::X)
            }
            Some('y') => {
                self.pos += 1;
                let mut k = 0;
                while self.chars.get(self.pos) == Some(&'\'') {
                    self.pos += 1;
                    k += 1;
                }
                if k > MAX_DERIVATIVE {
                    return Err(self.error("derivative order above 4"));
                }
                Ok(Expr::Deriv(k))
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().expect("digit present");
                let v: BigInt = d.parse().expect("decimal digits");
                Ok(Expr::Const(BigRational::from_integer(v)))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::Const(BigRational::from_integer(BigInt::from(v)))
    }
}

impl Expr {
    pub fn one() -> Self {
        Expr::Const(BigRational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{cos, geometric, log1p_over_x, sin};

    #[test]
    fn tangent_solves_riccati() {
        let tan = sin(31).div(&cos(31)).unwrap();
        let eq = parse_equation("y' - y^2 - 1").unwrap();
        let r = tan.ode_residual(&eq).unwrap();
        assert_eq!(r.order(), 30);
        assert!(r.is_zero());
    }

    #[test]
    fn gregory_equation() {
        let g = RationalSeries::one(31).div(&log1p_over_x(31)).unwrap();
        let eq = parse_equation("x(1+x)y' + y^2 - (1+x)y").unwrap();
        assert!(g.ode_residual(&eq).unwrap().is_zero());
    }

    #[test]
    fn zero_series_and_order_checks() {
        let eq = parse_equation("y' = y").unwrap();
        assert!(RationalSeries::zero(5).ode_residual(&eq).unwrap().is_zero());
        assert!(!geometric(5).ode_residual(&eq).unwrap().is_zero());
        assert_eq!(
            RationalSeries::zero(2).ode_residual(&parse_equation("y''").unwrap()),
            Err(SeriesError::OrderTooLow { order: 2, needed: 3 })
        );
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!(parse_equation("y''''' ").is_err());
        assert!(parse_equation("y + ").is_err());
        assert!(parse_equation("x / y").is_err());
        assert!(parse_equation("y ) ").is_err());
        let e = parse_equation("3/4 y - -2x").unwrap();
        let round = parse_equation(&e.to_string()).unwrap();
        let s = RationalSeries::from_i64(&[1, 2, 3, 4], 4);
        assert_eq!(e.residual(&s).unwrap(), round.residual(&s).unwrap());
    }
}
