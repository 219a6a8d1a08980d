//! Rigorous interval evaluation of monomial sums.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign as BigSign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExactError, Generator, Monomial, MonomialSum, Rational, SignHint};

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn exact(q: Rational) -> Self {
        Enclosure { lo: q.clone(), hi: q }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    /// `Some` when the sign is certain.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn scale(&self, c: &Rational) -> Enclosure {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            Enclosure { lo: b, hi: a }
        } else {
            Enclosure { lo: a, hi: b }
        }
    }

    /// Product of two enclosures of positive numbers.
    fn mul_positive(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo * &other.lo, hi: &self.hi * &other.hi }
    }

    fn recip_positive(&self) -> Enclosure {
        Enclosure { lo: self.hi.recip(), hi: self.lo.recip() }
    }

    /// Outward rounding to dyadic endpoints with about `bits` significant bits.
    pub fn round_out(&self, bits: u32) -> Enclosure {
        if self.is_exact() {
            return self.clone();
        }
        let mag = log2_estimate(&self.lo.abs()).max(log2_estimate(&self.hi.abs()));
        let shift = (bits as i64 + 2 - mag).max(0) as usize;
        let scale = Rational::from_integer(BigInt::one() << shift);
        Enclosure {
            lo: (&self.lo * &scale).floor() / &scale,
            hi: (&self.hi * &scale).ceil() / &scale,
        }
    }
}

fn log2_estimate(q: &Rational) -> i64 {
    if q.is_zero() {
        return i64::MIN / 4;
    }
    q.numer().bits() as i64 - q.denom().bits() as i64
}

/// `y^(1/n)` for exact `y > 0`, to roughly `bits` significant bits.
fn root_enclosure(y: &Rational, n: u32, bits: u32) -> Enclosure {
    if n == 1 {
        return Enclosure::exact(y.clone());
    }
    let mag = log2_estimate(y) / n as i64;
    let k = (bits as i64 + 8 + (2 - mag).max(0)) as usize;
    let scaled = y * Rational::from_integer(BigInt::one() << (k * n as usize));
    let floor = scaled.floor().to_integer();
    let r = floor.nth_root(n);
    let denom = Rational::from_integer(BigInt::one() << k);
    let lo = Rational::from_integer(r.clone()) / &denom;
    if scaled.is_integer() && num_traits::pow(r.clone(), n as usize) == floor {
        return Enclosure::exact(lo);
    }
    let hi = Rational::from_integer(r + 1) / &denom;
    Enclosure { lo, hi }
}

/// Declared approximations of abstract generators plus the precision schedule
/// used for ordering decisions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericContext {
    approx: BTreeMap<String, Rational>,
    pub precision: u32,
    pub max_precision: u32,
}

impl Default for NumericContext {
    fn default() -> Self {
        NumericContext { approx: BTreeMap::new(), precision: 128, max_precision: 1024 }
    }
}

impl NumericContext {
    pub fn new(approx: BTreeMap<String, Rational>) -> Self {
        NumericContext { approx, ..Default::default() }
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision = bits.max(32);
        self.max_precision = self.max_precision.max(self.precision);
        self
    }

    pub fn set_approx(&mut self, name: &str, value: Rational) {
        self.approx.insert(name.to_string(), value);
    }

    pub fn approx(&self, name: &str) -> Option<&Rational> {
        self.approx.get(name)
    }

    pub fn eval(&self, x: &MonomialSum) -> Result<Enclosure, ExactError> {
        eval_numeric(x, self, self.precision)
    }

    pub fn to_f64(&self, x: &MonomialSum) -> Result<f64, ExactError> {
        Ok(self.eval(x)?.mid_f64())
    }

    /// Certified sign of `x`: exact when the coefficients decide it, otherwise
    /// by enclosures at increasing precision. `None` if never separated from 0.
    pub fn sign(&self, x: &MonomialSum) -> Result<Option<Ordering>, ExactError> {
        match x.sign_hint() {
            SignHint::Zero => return Ok(Some(Ordering::Equal)),
            SignHint::Positive => return Ok(Some(Ordering::Greater)),
            SignHint::Negative => return Ok(Some(Ordering::Less)),
            SignHint::Mixed => {}
        }
        if let Some(q) = x.as_rational() {
            return Ok(Some(q.cmp(&Rational::zero())));
        }
        let mut bits = self.precision;
        loop {
            let e = eval_numeric(x, self, bits)?;
            match e.sign() {
                Some(Ordering::Equal) | None => {}
                s => return Ok(s),
            }
            if bits >= self.max_precision {
                return Ok(None);
            }
            bits = (bits * 2).min(self.max_precision);
        }
    }

    pub fn compare(&self, a: &MonomialSum, b: &MonomialSum) -> Result<Option<Ordering>, ExactError> {
        self.sign(&(a - b))
    }
}

pub fn eval_monomial(m: &Monomial, ctx: &NumericContext, bits: u32) -> Result<Enclosure, ExactError> {
    let mut acc = Enclosure::exact(Rational::one());
    for (g, e) in m.exponents() {
        let base = match g {
            Generator::Prime(p) => Rational::from_integer((*p).into()),
            Generator::Abstract(name) => ctx
                .approx(name)
                .cloned()
                .ok_or_else(|| ExactError::AbstractWithoutApprox(name.clone()))?,
        };
        let num = e.numer().abs().to_usize().expect("exponent numerator size");
        let den = e.denom().to_u32().expect("exponent denominator size");
        let y = num_traits::pow(base, num);
        let mut factor = root_enclosure(&y, den, bits);
        if e.numer().sign() == BigSign::Minus {
            factor = factor.recip_positive();
        }
        acc = acc.mul_positive(&factor).round_out(bits + 8);
    }
    Ok(acc)
}

/// Enclosure of the real value of `x`. Rational sums come back degenerate.
pub fn eval_numeric(x: &MonomialSum, ctx: &NumericContext, bits: u32) -> Result<Enclosure, ExactError> {
    if let Some(q) = x.as_rational() {
        return Ok(Enclosure::exact(q));
    }
    let mut acc = Enclosure::exact(Rational::zero());
    for (m, c) in x.terms() {
        acc = acc.add(&eval_monomial(m, ctx, bits + 4)?.scale(c));
    }
    Ok(acc.round_out(bits + 4))
}

/// Parses a plain decimal literal such as `3.14159265358979`, `-0.5` or `1e-3`
/// into its exact rational value.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("0{int}{frac}").parse().ok()?;
    let ten = Rational::from_integer(10.into());
    let mut v = Rational::from_integer(all) * ten.pow(exp - frac.len() as i32);
    if neg {
        v = -v;
    }
    Some(v)
}
