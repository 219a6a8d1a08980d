//! Exact arithmetic over a finitely generated group of positive reals.
//!
//! Values are products of generators (primes or user-declared abstract
//! reals) raised to rational exponents. Abstract generators are assumed
//! multiplicatively independent of each other and of the primes; nothing
//! here tries to verify that.

mod feasibility;
mod matrix;
mod membership;
mod monomial;
mod numeric;
pub mod primes;
mod sum;

use thiserror::Error;

pub type Rational = num_rational::BigRational;

pub use feasibility::{find_point, Constraint};
pub use matrix::{solve_sums, QMatrix};
pub use membership::{
    cone_intersection_empty, exponent_matrix, membership, power_product, Cone, ConeIntersection,
    Membership,
};
pub use monomial::{Generator, Monomial, Sign, SignedMonomial};
pub use numeric::{eval_monomial, eval_numeric, parse_decimal, Enclosure, NumericContext};
pub use sum::{MonomialSum, SignHint};

pub(crate) use monomial::fmt_rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("value {0} is not positive")]
    NonPositive(String),
    #[error("cannot factor {0}: component exceeds 64 bits")]
    FactorOverflow(String),
    #[error("abstract generator `{0}` has no numeric approximation")]
    AbstractWithoutApprox(String),
}

/// Canonical rational text: `p/q` in lowest terms, or `p` when integral.
pub fn rational_string(q: &Rational) -> String {
    fmt_rational(q)
}

/// Parses `p`, `-p`, `p/q` (no spaces).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = n.parse().ok()?;
    let d: num_bigint::BigInt = d.parse().ok()?;
    if num_traits::Zero::is_zero(&d) {
        return None;
    }
    Some(Rational::new(n, d))
}
