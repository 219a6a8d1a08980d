use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::primes::factorize;
use super::{ExactError, Rational};

/// A base of the multiplicative group: a prime number or a user-declared
/// abstract positive real. Primes sort before abstract generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Prime(u64),
    Abstract(String),
}

impl Generator {
    pub fn is_prime(&self) -> bool {
        matches!(self, Generator::Prime(_))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Prime(p) => write!(f, "{p}"),
            Generator::Abstract(name) => f.write_str(name),
        }
    }
}

/// Positive real `∏ g^e` with rational exponents. Only nonzero exponents are
/// stored, so structural equality is value equality under the independence
/// axiom for abstract generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: BTreeMap<Generator, Rational>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn generator(g: Generator) -> Self {
        Self::power_of(g, Rational::one())
    }

    pub fn power_of(g: Generator, e: Rational) -> Self {
        let mut exps = BTreeMap::new();
        if !e.is_zero() {
            exps.insert(g, e);
        }
        Monomial { exps }
    }

    pub fn abstract_generator(name: &str) -> Self {
        Self::generator(Generator::Abstract(name.to_string()))
    }

    /// `num/den` for small literals; panics unless `num, den > 0`.
    pub fn ratio(num: u64, den: u64) -> Self {
        assert!(num > 0 && den > 0, "Monomial::ratio needs positive parts");
        let mut m = Monomial::one();
        for (p, k) in factorize(num) {
            m.add_exponent(Generator::Prime(p), &Rational::from_integer(k.into()));
        }
        for (p, k) in factorize(den) {
            m.add_exponent(Generator::Prime(p), &-Rational::from_integer(k.into()));
        }
        m
    }

    /// Canonical embedding of a positive rational into the prime generators.
    pub fn factor_rational(q: &Rational) -> Result<Self, ExactError> {
        if !q.is_positive() {
            return Err(ExactError::NonPositive(q.to_string()));
        }
        let num = q.numer().to_u64();
        let den = q.denom().to_u64();
        match (num, den) {
            (Some(n), Some(d)) => Ok(Self::ratio(n, d)),
            _ => Err(ExactError::FactorOverflow(q.to_string())),
        }
    }

    fn add_exponent(&mut self, g: Generator, e: &Rational) {
        if e.is_zero() {
            return;
        }
        let entry = self.exps.entry(g.clone()).or_insert_with(Rational::zero);
        *entry += e;
        if entry.is_zero() {
            self.exps.remove(&g);
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, g: &Generator) -> Rational {
        self.exps.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&Generator, &Rational)> {
        self.exps.iter()
    }

    pub fn generators(&self) -> impl Iterator<Item = &Generator> {
        self.exps.keys()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (g, e) in &other.exps {
            out.add_exponent(g.clone(), e);
        }
        out
    }

    pub fn pow(&self, r: &Rational) -> Monomial {
        if r.is_zero() {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|(g, e)| (g.clone(), e * r)).collect(),
        }
    }

    pub fn inv(&self) -> Monomial {
        self.pow(&-Rational::one())
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inv())
    }

    /// True when the value is a rational number: prime generators only, with
    /// integer exponents.
    pub fn is_rational(&self) -> bool {
        self.exps
            .iter()
            .all(|(g, e)| g.is_prime() && e.is_integer())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if !self.is_rational() {
            return None;
        }
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (g, e) in &self.exps {
            let Generator::Prime(p) = g else { unreachable!() };
            let k = e.to_integer();
            let pow = num_traits::pow(BigInt::from(*p), k.abs().to_usize().expect("exponent size"));
            if k.is_positive() {
                num *= pow;
            } else {
                den *= pow;
            }
        }
        Some(Rational::new(num, den))
    }

    /// Splits `self = c · r` with `c` rational and every prime exponent of `r`
    /// in `[0, 1)`. `r` is the canonical basis element used by `MonomialSum`.
    pub fn split_rational(&self) -> (Rational, Monomial) {
        let mut coeff = Rational::one();
        let mut rest = Monomial::one();
        for (g, e) in &self.exps {
            match g {
                Generator::Prime(p) => {
                    let floor = e.floor().to_integer();
                    let frac = e - Rational::from_integer(floor.clone());
                    if !floor.is_zero() {
                        let pow = num_traits::pow(
                            BigInt::from(*p),
                            floor.abs().to_usize().expect("exponent size"),
                        );
                        if floor.is_positive() {
                            coeff *= Rational::from_integer(pow);
                        } else {
                            coeff /= Rational::from_integer(pow);
                        }
                    }
                    if !frac.is_zero() {
                        rest.exps.insert(g.clone(), frac);
                    }
                }
                Generator::Abstract(_) => {
                    rest.exps.insert(g.clone(), e.clone());
                }
            }
        }
        (coeff, rest)
    }

    /// Names of abstract generators appearing in this monomial.
    pub fn abstract_names(&self) -> impl Iterator<Item = &str> {
        self.exps.keys().filter_map(|g| match g {
            Generator::Abstract(n) => Some(n.as_str()),
            Generator::Prime(_) => None,
        })
    }
}

impl Mul for &Monomial {
    type Output = Monomial;
    fn mul(self, rhs: &Monomial) -> Monomial {
        Monomial::mul(self, rhs)
    }
}

impl Div for &Monomial {
    type Output = Monomial;
    fn div(self, rhs: &Monomial) -> Monomial {
        Monomial::div(self, rhs)
    }
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Monomial {
    /// Factors joined by `*` in generator order; `2^-1`, `11^(1/2)`, `lam`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        for (g, e) in &self.exps {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e.is_one() {
                write!(f, "{g}")?;
            } else if e.is_integer() {
                write!(f, "{g}^{}", e.numer())?;
            } else {
                write!(f, "{g}^({})", fmt_rational(e))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Nonzero real `±m`; used for contraction ratios.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedMonomial {
    pub sign: Sign,
    pub magnitude: Monomial,
}

impl SignedMonomial {
    pub fn new(sign: Sign, magnitude: Monomial) -> Self {
        SignedMonomial { sign, magnitude }
    }

    pub fn positive(magnitude: Monomial) -> Self {
        Self::new(Sign::Positive, magnitude)
    }

    pub fn negative(magnitude: Monomial) -> Self {
        Self::new(Sign::Negative, magnitude)
    }

    pub fn is_negative(&self) -> bool {
        self.sign == Sign::Negative
    }

    pub fn mul(&self, other: &SignedMonomial) -> SignedMonomial {
        SignedMonomial::new(self.sign.times(other.sign), self.magnitude.mul(&other.magnitude))
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.magnitude.to_rational().map(|r| match self.sign {
            Sign::Positive => r,
            Sign::Negative => -r,
        })
    }
}

impl fmt::Display for SignedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negative() {
            f.write_str("-")?;
        }
        write!(f, "{}", self.magnitude)
    }
}
