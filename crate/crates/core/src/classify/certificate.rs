use crate::construct::Similarity;
use crate::digraph::Path;
use crate::exactnum::{
    cone_intersection_empty, membership, power_product, Cone, ConeIntersection, Membership, Monomial, Rational,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    /// every circuit through `u` passes `u`: extract a standard IFS
    Thm51,
    /// cone condition on one circuit `L` and a vertex of `L` reachable from `u`
    Lemma41,
    /// global independence of the ratios plus a circuit avoiding `u`
    Lemma44,
    /// equal-gap family with the point-in-gap conditions
    Thm49,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Thm51 => "Thm5.1",
            Route::Lemma41 => "Lemma4.1",
            Route::Lemma44 => "Lemma4.4",
            Route::Thm49 => "Thm4.9",
        }
    }
}

/// One exactnum query with the answer it produced. `replay` re-runs it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Membership { target: Monomial, set: Vec<Monomial>, cone: Cone, answer: Membership },
    ConeIntersection { a1: Vec<Monomial>, a2: Vec<Monomial>, answer: ConeIntersection },
    /// pairwise distinct values
    Distinct { values: Vec<Monomial>, distinct: bool },
    /// `lo < point < hi`
    PointInGap { point: Rational, lo: Rational, hi: Rational, inside: bool },
}

impl Check {
    pub fn membership(target: Monomial, set: Vec<Monomial>, cone: Cone) -> Self {
        let answer = membership(&target, &set, cone);
        Check::Membership { target, set, cone, answer }
    }

    pub fn cone_intersection(a1: Vec<Monomial>, a2: Vec<Monomial>) -> Self {
        let answer = cone_intersection_empty(&a1, &a2);
        Check::ConeIntersection { a1, a2, answer }
    }

    pub fn distinct(values: Vec<Monomial>) -> Self {
        let distinct = values.iter().enumerate().all(|(i, v)| !values[..i].contains(v));
        Check::Distinct { values, distinct }
    }

    pub fn point_in_gap(point: Rational, lo: Rational, hi: Rational) -> Self {
        let inside = lo < point && point < hi;
        Check::PointInGap { point, lo, hi, inside }
    }

    /// Whether the recorded answer says "yes / empty / distinct / inside".
    pub fn positive(&self) -> bool {
        match self {
            Check::Membership { answer, .. } => answer.is_yes(),
            Check::ConeIntersection { answer, .. } => answer.is_empty(),
            Check::Distinct { distinct, .. } => *distinct,
            Check::PointInGap { inside, .. } => *inside,
        }
    }

    /// Recomputes the query and checks any witness exactly.
    pub fn replay(&self) -> bool {
        match self {
            Check::Membership { target, set, cone, answer } => {
                if membership(target, set, *cone) != *answer {
                    return false;
                }
                match answer.witness() {
                    Some(w) => {
                        let zero = Rational::from_integer(0.into());
                        let cone_ok = match cone {
                            Cone::Q => true,
                            Cone::QStar => w.iter().any(|x| *x != zero),
                            Cone::QPlus => w.iter().all(|x| *x >= zero),
                            Cone::QPlusStar => w.iter().all(|x| *x >= zero) && w.iter().any(|x| *x != zero),
                        };
                        cone_ok && power_product(set, w) == *target
                    }
                    None => true,
                }
            }
            Check::ConeIntersection { a1, a2, answer } => {
                if cone_intersection_empty(a1, a2) != *answer {
                    return false;
                }
                match answer {
                    ConeIntersection::Empty => true,
                    ConeIntersection::Witness { p, q } => power_product(a1, p) == power_product(a2, q),
                }
            }
            Check::Distinct { values, distinct } => {
                *distinct == values.iter().enumerate().all(|(i, v)| !values[..i].contains(v))
            }
            Check::PointInGap { point, lo, hi, inside } => *inside == (lo < point && point < hi),
        }
    }
}

/// A named condition, its outcome and the queries that decided it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionRecord {
    pub name: String,
    pub holds: bool,
    pub detail: String,
    pub checks: Vec<Check>,
}

/// Why a candidate `(L, v)` did not certify.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateFailure {
    pub circuit: Path,
    pub v: usize,
    pub reachable: bool,
    pub condition_i: Option<bool>,
    pub condition_ii: Option<bool>,
    pub condition_iii: bool,
}

/// Concrete clash between the gap-length ratio sets at `θ₁` and `θ₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breach {
    /// `λ_v · |ρ_e|` for the connecting path `e`
    pub theta1: Monomial,
    /// `|ρ_L|`
    pub ratio_l: Monomial,
    /// `|ρ_L| ∈ (A(L))^{Q+*}`
    pub ratio_check: Check,
    /// `λ_u`
    pub theta2: Monomial,
    /// truncated-search ratios through `θ₁`, if any were searched
    pub theta1_ratios: Vec<Monomial>,
    /// truncated-search ratios through `θ₂`, each tested against `(A(L))^{Q+*}`
    pub theta2_checks: Vec<Check>,
    pub search_depth: Option<usize>,
}

impl Breach {
    /// No truncated-search ratio through `θ₂` falls in `(A(L))^{Q+*}`.
    pub fn consistent(&self) -> bool {
        self.ratio_check.positive() && self.theta2_checks.iter().all(|c| !c.positive())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Certificate {
    pub route: Option<Route>,
    pub circuit: Option<Path>,
    pub v: Option<usize>,
    pub connecting_path: Option<Path>,
    pub conditions: Vec<ConditionRecord>,
    pub failures: Vec<CandidateFailure>,
    pub breach: Option<Breach>,
    /// abstract generators whose independence was assumed
    pub assumptions: Vec<String>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.conditions
            .iter()
            .flat_map(|c| c.checks.iter())
            .chain(self.breach.iter().flat_map(|b| std::iter::once(&b.ratio_check).chain(b.theta2_checks.iter())))
    }

    /// Re-runs every recorded query.
    pub fn replay(&self) -> bool {
        self.checks().all(Check::replay)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// One-vertex IFS extracted from return circuits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardIfs {
    pub maps: Vec<Similarity>,
    pub circuits: Vec<Path>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    SelfSimilar(StandardIfs),
    NotCoscSelfSimilar,
    NotSelfSimilar,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::SelfSimilar(_) => "SelfSimilar",
            Outcome::NotCoscSelfSimilar => "NotCoscSelfSimilar",
            Outcome::NotSelfSimilar => "NotSelfSimilar",
            Outcome::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub vertex: usize,
    pub outcome: Outcome,
    pub certificate: Certificate,
}
