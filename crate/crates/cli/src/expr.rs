//! Ratio and gap expressions: signed products of integers, fractions and
//! generator powers, e.g. `-1/3`, `11^(-1/2)*lam`, `pi*lam/7`.

use std::collections::BTreeMap;

use gdfractal_core::exactnum::{Monomial, Rational, Sign, SignedMonomial};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {col}: {message}")]
pub struct ExprError {
    pub col: usize,
    pub message: String,
}

/// A parsed expression. `value == None` is the number 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub sign: Sign,
    pub value: Option<Monomial>,
}

impl Expr {
    pub fn signed(&self) -> Option<SignedMonomial> {
        self.value.clone().map(|m| SignedMonomial::new(self.sign, m))
    }
}

/// Names usable in expressions.
pub type Symbols = BTreeMap<String, Monomial>;

pub fn parse_expr(text: &str, symbols: &Symbols) -> Result<Expr, ExprError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, symbols };
    p.skip_ws();
    let sign = if p.eat('-') {
        Sign::Negative
    } else {
        p.eat('+');
        Sign::Positive
    };
    let value = p.product()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
    }
    Ok(Expr { sign, value })
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    symbols: &'a Symbols,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError { col: self.pos + 1, message: message.into() }
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

    fn product(&mut self) -> Result<Option<Monomial>, ExprError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                let rhs = self.power()?;
                acc = match (acc, rhs) {
                    (Some(a), Some(b)) => Some(a.mul(&b)),
                    _ => None,
                };
            } else if self.eat('/') {
                let at = self.pos;
                let rhs = self.power()?;
                let Some(b) = rhs else {
                    return Err(ExprError { col: at + 1, message: "division by zero".into() });
                };
                acc = acc.map(|a| a.div(&b));
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Option<Monomial>, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.pos;
        let e = self.exponent()?;
        match base {
            Some(b) => Ok(Some(b.pow(&e))),
            None if e.is_positive() => Ok(None),
            None => Err(ExprError { col: at + 1, message: "zero to a non-positive power".into() }),
        }
    }

    fn exponent(&mut self) -> Result<Rational, ExprError> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let num = self.integer()?;
        // `a^2/4` divides by 4; fractional exponents need parentheses
        let den = if paren && self.eat('/') { self.integer()? } else { BigInt::one() };
        if den.is_zero() {
            return Err(self.error("zero denominator in exponent"));
        }
        if paren && !self.eat(')') {
            return Err(self.error("expected ')'"));
        }
        let e = Rational::new(num, den);
        Ok(if neg { -e } else { e })
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    fn atom(&mut self) -> Result<Option<Monomial>, ExprError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.product()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                let n = self.integer()?;
                if n.is_zero() {
                    return Ok(None);
                }
                Monomial::factor_rational(&Rational::from_integer(n))
                    .map(Some)
                    .map_err(|e| ExprError { col: at + 1, message: e.to_string() })
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                self.symbols
                    .get(&name)
                    .cloned()
                    .map(Some)
                    .ok_or(ExprError { col: start + 1, message: format!("undeclared generator '{name}'") })
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}
