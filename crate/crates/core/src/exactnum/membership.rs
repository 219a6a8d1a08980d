use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use super::feasibility::{find_point, Constraint};
use super::matrix::{integer_scaled, QMatrix};
use super::{Generator, Monomial, Rational};

/// Exponent cones over a finite generating set `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cone {
    /// all rational exponents
    Q,
    /// rational exponents, not all zero
    QStar,
    /// nonnegative rational exponents
    QPlus,
    /// nonnegative rational exponents, not all zero
    QPlusStar,
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cone::Q => "Q",
            Cone::QStar => "Qstar",
            Cone::QPlus => "Qplus",
            Cone::QPlusStar => "QplusStar",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes { witness: Vec<Rational> },
    No,
}

impl Membership {
    pub fn is_yes(&self) -> bool {
        matches!(self, Membership::Yes { .. })
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            Membership::Yes { witness } => Some(witness),
            Membership::No => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeIntersection {
    Empty,
    Witness { p: Vec<Rational>, q: Vec<Rational> },
}

impl ConeIntersection {
    pub fn is_empty(&self) -> bool {
        matches!(self, ConeIntersection::Empty)
    }
}

/// Rows indexed by every generator occurring in `columns` or `extra`, columns
/// by the monomials of `columns`.
pub fn exponent_matrix(columns: &[Monomial], extra: &[Monomial]) -> (Vec<Generator>, QMatrix) {
    let gens: BTreeSet<Generator> = columns
        .iter()
        .chain(extra)
        .flat_map(|m| m.generators().cloned())
        .collect();
    let gens: Vec<Generator> = gens.into_iter().collect();
    let mut m = QMatrix::zeros(gens.len(), columns.len());
    for (j, mono) in columns.iter().enumerate() {
        for (i, g) in gens.iter().enumerate() {
            m.set(i, j, mono.exponent(g));
        }
    }
    (gens, m)
}

/// Decides `target ∈ a^cone`, i.e. whether `target = ∏ a_j^{w_j}` for some `w`
/// in the cone. The witness is `w`.
pub fn membership(target: &Monomial, a: &[Monomial], cone: Cone) -> Membership {
    let (gens, b) = exponent_matrix(a, std::slice::from_ref(target));
    let t: Vec<Rational> = gens.iter().map(|g| target.exponent(g)).collect();
    let Some(w0) = b.solve_particular(&t) else {
        return Membership::No;
    };
    let homogeneous = target.is_one();
    let kernel = b.nullspace();
    let found = match cone {
        Cone::Q => Some(w0),
        Cone::QStar if !homogeneous => Some(w0),
        Cone::QStar => kernel.into_iter().next(),
        Cone::QPlus | Cone::QPlusStar => {
            let normalize = cone == Cone::QPlusStar && homogeneous;
            nonnegative_solution(&w0, &kernel, normalize)
                .map(|w| if normalize { integer_scaled(&w) } else { w })
        }
    };
    match found {
        Some(witness) => Membership::Yes { witness },
        None => Membership::No,
    }
}

/// `w = w0 + Σ s_j kernel_j` with `w ≥ 0` (and `Σ w = 1` when `normalize`).
fn nonnegative_solution(w0: &[Rational], kernel: &[Vec<Rational>], normalize: bool) -> Option<Vec<Rational>> {
    let n = w0.len();
    if n == 0 {
        return (!normalize).then(Vec::new);
    }
    let dim = kernel.len();
    let mut cs = Vec::new();
    for i in 0..n {
        let coeffs = kernel.iter().map(|k| k[i].clone()).collect();
        cs.push(Constraint::ge(coeffs, -w0[i].clone()));
    }
    if normalize {
        let coeffs = kernel.iter().map(|k| k.iter().sum()).collect();
        let base: Rational = w0.iter().sum();
        cs.extend(Constraint::eq(coeffs, Rational::one() - base));
    }
    let s = find_point(dim, &cs)?;
    Some(combine(w0, kernel, &s))
}

fn combine(w0: &[Rational], kernel: &[Vec<Rational>], s: &[Rational]) -> Vec<Rational> {
    (0..w0.len())
        .map(|i| &w0[i] + kernel.iter().zip(s).map(|(k, sj)| &k[i] * sj).sum::<Rational>())
        .collect()
}

/// Decides whether `(a1)^{Q*} ∩ (a2)^{Q+*}` is empty. A witness is a pair with
/// `∏ a1^p = ∏ a2^q`, `p ≠ 0`, `q ≥ 0`, `q ≠ 0`, scaled to primitive integers.
pub fn cone_intersection_empty(a1: &[Monomial], a2: &[Monomial]) -> ConeIntersection {
    if a1.is_empty() || a2.is_empty() {
        return ConeIntersection::Empty;
    }
    let (n1, n2) = (a1.len(), a2.len());
    let mut cols: Vec<Monomial> = a1.to_vec();
    cols.extend(a2.iter().map(Monomial::inv));
    let (_, k) = exponent_matrix(&cols, &[]);
    let kernel = k.nullspace();
    if kernel.is_empty() {
        return ConeIntersection::Empty;
    }
    let dim = kernel.len();
    let row = |i: usize| kernel.iter().map(|v| v[i].clone()).collect::<Vec<_>>();
    let mut base = Vec::new();
    for j in n1..n1 + n2 {
        base.push(Constraint::ge(row(j), Rational::zero()));
    }
    let qsum: Vec<Rational> = kernel.iter().map(|v| v[n1..].iter().sum()).collect();
    base.extend(Constraint::eq(qsum, Rational::one()));
    for i in 0..n1 {
        for sign in [1, -1] {
            let mut cs = base.clone();
            let coeffs = row(i).into_iter().map(|c| c * Rational::from_integer(sign.into())).collect();
            cs.push(Constraint::gt(coeffs, Rational::zero()));
            if let Some(s) = find_point(dim, &cs) {
                let zero = vec![Rational::zero(); n1 + n2];
                let pq = integer_scaled(&combine(&zero, &kernel, &s));
                return ConeIntersection::Witness { p: pq[..n1].to_vec(), q: pq[n1..].to_vec() };
            }
        }
    }
    ConeIntersection::Empty
}

/// `∏ a_j^{w_j}`.
pub fn power_product(a: &[Monomial], w: &[Rational]) -> Monomial {
    a.iter()
        .zip(w)
        .filter(|(_, e)| !e.is_zero())
        .fold(Monomial::one(), |acc, (m, e)| acc.mul(&m.pow(e)))
}
