use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::{fmt_rational, Monomial, Sign, SignedMonomial};
use super::Rational;

/// Formal ℚ-linear combination of monomials.
///
/// Keys are reduced monomials (every prime exponent in `[0, 1)`), with the
/// rational part folded into the coefficient, so `1/2` is stored as
/// `{1: 1/2}` and `11^(-1/2)` as `{11^(1/2): 1/11}`. Under the independence
/// axiom these basis elements are ℚ-linearly independent, which makes
/// structural equality value equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialSum {
    terms: BTreeMap<Monomial, Rational>,
}

/// Sign information readable off the coefficients alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignHint {
    Zero,
    Positive,
    Negative,
    Mixed,
}

impl MonomialSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(Monomial::one(), q);
        s
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn from_monomial(m: &Monomial) -> Self {
        Self::scaled_monomial(Rational::one(), m)
    }

    pub fn from_signed(m: &SignedMonomial) -> Self {
        let s = Self::from_monomial(&m.magnitude);
        match m.sign {
            Sign::Positive => s,
            Sign::Negative => -s,
        }
    }

    pub fn scaled_monomial(c: Rational, m: &Monomial) -> Self {
        let (k, reduced) = m.split_rational();
        let mut s = Self::zero();
        s.add_term(reduced, c * k);
        s
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> MonomialSum {
        if c.is_zero() {
            return Self::zero();
        }
        MonomialSum {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MonomialSum {
        let mut out = Self::zero();
        for (base, c) in &self.terms {
            let (k, reduced) = base.mul(m).split_rational();
            out.add_term(reduced, c * k);
        }
        out
    }

    pub fn mul_signed(&self, m: &SignedMonomial) -> MonomialSum {
        let s = self.mul_monomial(&m.magnitude);
        match m.sign {
            Sign::Positive => s,
            Sign::Negative => -s,
        }
    }

    pub fn mul(&self, other: &MonomialSum) -> MonomialSum {
        let mut out = Self::zero();
        for (m, c) in &other.terms {
            out = out + self.mul_monomial(m).scale(c);
        }
        out
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// The value as a single positive monomial, when it is one.
    pub fn as_positive_monomial(&self) -> Option<Monomial> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if !c.is_positive() {
            return None;
        }
        let k = Monomial::factor_rational(c).ok()?;
        Some(k.mul(m))
    }

    pub fn sign_hint(&self) -> SignHint {
        if self.terms.is_empty() {
            return SignHint::Zero;
        }
        let pos = self.terms.values().all(|c| c.is_positive());
        let neg = self.terms.values().all(|c| c.is_negative());
        match (pos, neg) {
            (true, _) => SignHint::Positive,
            (_, true) => SignHint::Negative,
            _ => SignHint::Mixed,
        }
    }

    pub fn abstract_names(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().flat_map(|m| m.abstract_names())
    }
}

impl Add for MonomialSum {
    type Output = MonomialSum;
    fn add(mut self, rhs: MonomialSum) -> MonomialSum {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Add<&MonomialSum> for &MonomialSum {
    type Output = MonomialSum;
    fn add(self, rhs: &MonomialSum) -> MonomialSum {
        self.clone() + rhs.clone()
    }
}

impl Neg for MonomialSum {
    type Output = MonomialSum;
    fn neg(self) -> MonomialSum {
        MonomialSum {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Sub for MonomialSum {
    type Output = MonomialSum;
    fn sub(self, rhs: MonomialSum) -> MonomialSum {
        self + (-rhs)
    }
}

impl Sub<&MonomialSum> for &MonomialSum {
    type Output = MonomialSum;
    fn sub(self, rhs: &MonomialSum) -> MonomialSum {
        self.clone() - rhs.clone()
    }
}

impl fmt::Display for MonomialSum {
    /// `25/2*lam + 3*pi`; a coefficient of one is omitted before a monomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}
