//! Fourier–Motzkin elimination over ℚ with strict and non-strict rows.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::Rational;

/// `coeffs · x ≥ rhs`, or `>` when `strict`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
    pub strict: bool,
}

impl Constraint {
    pub fn ge(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, rhs, strict: false }
    }

    pub fn gt(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, rhs, strict: true }
    }

    /// Equality as a pair of opposite inequalities.
    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> [Self; 2] {
        let neg: Vec<Rational> = coeffs.iter().map(|c| -c).collect();
        [Self::ge(coeffs, rhs.clone()), Self::ge(neg, -rhs)]
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        if self.strict {
            lhs > self.rhs
        } else {
            lhs >= self.rhs
        }
    }

    /// Divide through by the largest |coefficient| so duplicates collapse.
    fn normalized(mut self) -> Self {
        let scale = self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(Rational::zero);
        if !scale.is_zero() {
            for c in &mut self.coeffs {
                *c /= &scale;
            }
            self.rhs /= &scale;
        }
        self
    }
}

/// Returns a point satisfying every constraint, or `None` if the system is
/// infeasible. Variables are eliminated from the last to the first and the
/// point is rebuilt by back-substitution, preferring 0, then small integers,
/// then midpoints.
pub fn find_point(n: usize, constraints: &[Constraint]) -> Option<Vec<Rational>> {
    assert!(constraints.iter().all(|c| c.coeffs.len() == n));
    // stages[k] mentions only x_0..=x_k
    let mut stages: Vec<Vec<Constraint>> = Vec::with_capacity(n + 1);
    let mut current: Vec<Constraint> = dedup(constraints.to_vec());
    for k in (0..n).rev() {
        stages.push(current.clone());
        current = eliminate(&current, k);
    }
    for c in &current {
        let ok = if c.strict { Rational::zero() > c.rhs } else { Rational::zero() >= c.rhs };
        if !ok {
            return None;
        }
    }
    stages.reverse();
    let mut x = vec![Rational::zero(); n];
    for k in 0..n {
        x[k] = choose_value(&stages[k], &x, k)?;
    }
    debug_assert!(constraints.iter().all(|c| c.holds(&x)));
    Some(x)
}

fn dedup(cs: Vec<Constraint>) -> Vec<Constraint> {
    let set: BTreeSet<Constraint> = cs.into_iter().map(Constraint::normalized).collect();
    set.into_iter().collect()
}

fn eliminate(cs: &[Constraint], k: usize) -> Vec<Constraint> {
    let mut keep = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for c in cs {
        let a = &c.coeffs[k];
        if a.is_zero() {
            keep.push(c.clone());
        } else if a.is_positive() {
            lower.push(c);
        } else {
            upper.push(c);
        }
    }
    for lo in &lower {
        for up in &upper {
            // lo: a x_k + r1 ≥ b1 (a > 0); up: -c x_k + r2 ≥ b2 (c > 0)
            let a = &lo.coeffs[k];
            let c = -&up.coeffs[k];
            let coeffs = lo
                .coeffs
                .iter()
                .zip(&up.coeffs)
                .map(|(p, q)| p * &c + q * a)
                .collect::<Vec<_>>();
            let rhs = &lo.rhs * &c + &up.rhs * a;
            keep.push(Constraint { coeffs, rhs, strict: lo.strict || up.strict });
        }
    }
    keep.retain(|c| !trivially_true(c));
    dedup(keep)
}

fn trivially_true(c: &Constraint) -> bool {
    c.coeffs.iter().all(|a| a.is_zero())
        && if c.strict { Rational::zero() > c.rhs } else { Rational::zero() >= c.rhs }
}

fn choose_value(cs: &[Constraint], x: &[Rational], k: usize) -> Option<Rational> {
    // bounds on x_k given x_0..x_{k-1}
    let mut lo: Option<(Rational, bool)> = None;
    let mut hi: Option<(Rational, bool)> = None;
    for c in cs {
        let a = &c.coeffs[k];
        let rest: Rational = (0..k).map(|j| &c.coeffs[j] * &x[j]).sum();
        let slack = &c.rhs - rest;
        if a.is_zero() {
            let ok = if c.strict { Rational::zero() > slack } else { Rational::zero() >= slack };
            if !ok {
                return None;
            }
            continue;
        }
        let bound = slack / a;
        if a.is_positive() {
            let tighter = match &lo {
                None => true,
                Some((b, s)) => bound > *b || (bound == *b && c.strict && !s),
            };
            if tighter {
                lo = Some((bound, c.strict));
            }
        } else {
            let tighter = match &hi {
                None => true,
                Some((b, s)) => bound < *b || (bound == *b && c.strict && !s),
            };
            if tighter {
                hi = Some((bound, c.strict));
            }
        }
    }
    let fits = |v: &Rational| {
        lo.as_ref().is_none_or(|(b, s)| if *s { v > b } else { v >= b })
            && hi.as_ref().is_none_or(|(b, s)| if *s { v < b } else { v <= b })
    };
    let zero = Rational::zero();
    if fits(&zero) {
        return Some(zero);
    }
    let mut candidates = Vec::new();
    if let Some((b, _)) = &lo {
        let c = b.ceil();
        candidates.push(c.clone());
        candidates.push(c + Rational::one());
    }
    if let Some((b, _)) = &hi {
        let f = b.floor();
        candidates.push(f.clone());
        candidates.push(f - Rational::one());
    }
    candidates.sort_by_key(|c| c.abs());
    if let Some(c) = candidates.into_iter().find(|c| fits(c)) {
        return Some(c);
    }
    match (&lo, &hi) {
        (Some((a, _)), Some((b, _))) => {
            let mid = (a + b) / Rational::from_integer(2.into());
            fits(&mid).then_some(mid)
        }
        _ => None,
    }
}
