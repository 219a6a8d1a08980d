//! Self-similarity classification of graph-directed attractors.

mod certificate;
mod sampling;

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

pub use certificate::{
    Breach, CandidateFailure, Certificate, Check, ConditionRecord, Outcome, Route, StandardIfs, Verdict,
};
pub use sampling::{sample_admissibility, SampleReport};

use crate::construct::{verify_separation, GdIfs, ParamPoint, Similarity};
use crate::digraph::Path;
use crate::exactnum::{exponent_matrix, Cone, ExactError, Monomial, MonomialSum, Rational};
use crate::gaps::{detect_geometric_ratios, gap_lengths_truncated, GapsError, IntervalSet, DEFAULT_MAX_INTERVALS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("graph has vertices without out-edges: {0}")]
    InvalidGraph(String),
    #[error("separation not verified: {0}")]
    SeparationUnverified(String),
    #[error("a circuit avoids vertex {0}")]
    CircuitAvoidsU(String),
    #[error("not a member of the equal-gap family")]
    NotEqualGapFamily,
    #[error("gap {index} of vertex {vertex} is not a single monomial")]
    NonMonomialGap { vertex: String, index: usize },
    #[error("sampler has no fraction below 1 with denominators up to {0} over the given primes")]
    EmptyPool(u64),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Gaps(#[from] GapsError),
}

// ---------------------------------------------------------------- admissibility

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    /// `s = s⁺ − s⁻` over all entries (zero on excluded ones)
    pub witness: Option<(Vec<Rational>, Vec<Rational>)>,
    /// 0-based entry indices with `ξ = 0`
    pub excluded: Vec<usize>,
}

impl Admissibility {
    /// Some `ξ` is zero, so the point lies off the open parameter set.
    pub fn outside_p1(&self) -> bool {
        !self.excluded.is_empty()
    }
}

/// Ratio magnitudes (by edge) then gaps (by vertex), tested for ℚ-linear
/// independence of their exponent vectors.
pub fn check_admissible(p: &ParamPoint) -> Admissibility {
    admissible_entries(&p.entries())
}

/// `None` entries stand for zero gaps and are left out of the test.
pub fn admissible_entries(entries: &[Option<Monomial>]) -> Admissibility {
    let excluded: Vec<usize> = entries.iter().enumerate().filter(|(_, e)| e.is_none()).map(|(i, _)| i).collect();
    let kept: Vec<usize> = (0..entries.len()).filter(|i| !excluded.contains(i)).collect();
    let cols: Vec<Monomial> = kept.iter().map(|&i| entries[i].clone().unwrap()).collect();
    let (_, m) = exponent_matrix(&cols, &[]);
    let witness = m.nullspace().into_iter().next().map(|s| {
        let zero = Rational::from_integer(0.into());
        let mut plus = vec![zero.clone(); entries.len()];
        let mut minus = vec![zero.clone(); entries.len()];
        for (k, &i) in kept.iter().enumerate() {
            if s[k] > zero {
                plus[i] = s[k].clone();
            } else if s[k] < zero {
                minus[i] = -s[k].clone();
            }
        }
        (plus, minus)
    });
    Admissibility { admissible: witness.is_none(), witness, excluded }
}

// ---------------------------------------------------------------- conditions

fn dedup(it: impl IntoIterator<Item = Monomial>) -> Vec<Monomial> {
    let mut out = Vec::new();
    for m in it {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// `A(L)` and `A(L^c)`, deduplicated in edge order.
pub fn split_ratios(f: &GdIfs, l: &Path) -> (Vec<Monomial>, Vec<Monomial>) {
    let mag = |e: usize| f.ratio(e).magnitude.clone();
    let inside = dedup(l.edges.iter().map(|&e| mag(e)));
    let outside = dedup((0..f.graph.edge_count()).filter(|e| !l.edges.contains(e)).map(mag));
    (inside, outside)
}

/// `(A(L))^{Q*} ∩ (A(L^c))^{Q+*} = ∅`.
pub fn check_condition_i(f: &GdIfs, l: &Path) -> ConditionRecord {
    let (a_l, a_lc) = split_ratios(f, l);
    let check = Check::cone_intersection(a_l, a_lc);
    let holds = check.positive();
    let detail = if holds {
        format!("cones of L = {} and its complement meet only trivially", l.label(&f.graph))
    } else {
        format!("cones of L = {} and its complement share a monomial", l.label(&f.graph))
    };
    ConditionRecord { name: "i".into(), holds, detail, checks: vec![check] }
}

/// All `|ρ_e|` pairwise distinct and `1 ∉ A^{Q*}`.
pub fn check_condition_iprime(f: &GdIfs) -> ConditionRecord {
    let all: Vec<Monomial> = f.maps.iter().map(|m| m.ratio.magnitude.clone()).collect();
    let distinct = Check::distinct(all);
    if !distinct.positive() {
        let dup = (0..f.maps.len())
            .flat_map(|b| (0..b).map(move |a| (a, b)))
            .find(|&(a, b)| f.ratio(a).magnitude == f.ratio(b).magnitude)
            .expect("duplicate exists");
        let detail = format!(
            "{} and {} have the same ratio magnitude",
            f.graph.edge_label(dup.0),
            f.graph.edge_label(dup.1)
        );
        return ConditionRecord { name: "i'".into(), holds: false, detail, checks: vec![distinct] };
    }
    let a = f.ratio_magnitudes();
    let check = Check::membership(Monomial::one(), a, Cone::QStar);
    let holds = !check.positive();
    let detail = if holds {
        "ratio magnitudes distinct and multiplicatively independent".to_string()
    } else {
        "1 is a nontrivial power product of the ratio magnitudes".to_string()
    };
    ConditionRecord { name: "i'".into(), holds, detail, checks: vec![distinct, check] }
}

/// `Λ_u ≠ ∅` and `Λ_v ≠ ∅`.
pub fn check_condition_ii(f: &GdIfs, u: usize, v: usize) -> bool {
    !f.lambda(u).is_empty() && !f.lambda(v).is_empty()
}

fn condition_ii_record(f: &GdIfs, u: usize, v: usize) -> ConditionRecord {
    let holds = check_condition_ii(f, u, v);
    let show = |w: usize| {
        let l: Vec<String> = f.lambda(w).iter().map(Monomial::to_string).collect();
        format!("Lambda_{} = {{{}}}", f.graph.name(w), l.join(", "))
    };
    ConditionRecord { name: "ii".into(), holds, detail: format!("{}; {}", show(u), show(v)), checks: vec![] }
}

/// Gap `k` (0-based) of vertex `v`.
pub type GapIndex = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientEntry {
    pub numerator: GapIndex,
    pub denominator: GapIndex,
    /// `None` for a zero numerator
    pub quotient: Option<Monomial>,
    /// index into `QuotientTable::checks`, absent for quotient 0
    pub check: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientTable {
    pub entries: Vec<QuotientEntry>,
    /// one membership query per distinct nonzero quotient
    pub checks: Vec<Check>,
    pub holds: bool,
    /// first entry whose quotient lies in `A^Q`
    pub failing: Option<usize>,
}

impl QuotientTable {
    /// Distinct quotient values, `None` being 0.
    pub fn distinct(&self) -> Vec<Option<Monomial>> {
        let set: std::collections::BTreeSet<_> = self.entries.iter().map(|e| e.quotient.clone()).collect();
        set.into_iter().collect()
    }

    pub fn record(&self, f: &GdIfs) -> ConditionRecord {
        let detail = match self.failing {
            None => format!("{} gap quotients, none in A^Q", self.distinct().len()),
            Some(i) => {
                let e = &self.entries[i];
                let name = |(v, k): GapIndex| format!("lambda_{}^({})", f.graph.name(v), k + 1);
                format!("{} / {} lies in A^Q", name(e.numerator), name(e.denominator))
            }
        };
        ConditionRecord { name: "iii".into(), holds: self.holds, detail, checks: self.checks.clone() }
    }
}

/// Every quotient `λ_w^(k) / λ_z^(m)` of distinct basic gaps with nonzero
/// denominator lies outside `A^Q`. A zero numerator gives 0, which passes.
pub fn check_condition_iii(f: &GdIfs) -> Result<QuotientTable, ClassifyError> {
    let mut gaps: Vec<(GapIndex, Option<Monomial>)> = Vec::new();
    for v in 0..f.graph.vertex_count() {
        for (k, g) in f.gaps[v].iter().enumerate() {
            let m = if g.is_zero() {
                None
            } else {
                Some(g.as_positive_monomial().ok_or_else(|| ClassifyError::NonMonomialGap {
                    vertex: f.graph.name(v).to_string(),
                    index: k + 1,
                })?)
            };
            gaps.push(((v, k), m));
        }
    }
    let a = f.ratio_magnitudes();
    let mut cache: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut checks = Vec::new();
    let mut entries = Vec::new();
    let mut failing = None;
    for (i, (num_idx, num)) in gaps.iter().enumerate() {
        for (j, (den_idx, den)) in gaps.iter().enumerate() {
            let Some(den) = den else { continue };
            if i == j {
                continue;
            }
            let quotient = num.as_ref().map(|n| n.div(den));
            let check = quotient.as_ref().map(|q| {
                *cache.entry(q.clone()).or_insert_with(|| {
                    checks.push(Check::membership(q.clone(), a.clone(), Cone::Q));
                    checks.len() - 1
                })
            });
            if failing.is_none() && check.is_some_and(|c| checks[c].positive()) {
                failing = Some(entries.len());
            }
            entries.push(QuotientEntry { numerator: *num_idx, denominator: *den_idx, quotient, check });
        }
    }
    Ok(QuotientTable { entries, checks, holds: failing.is_none(), failing })
}

// ---------------------------------------------------------------- equal-gap route

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapMembership {
    pub j: usize,
    /// 1-based gap of `F_j` containing `|x_i^(1)|`
    pub m: usize,
    /// 1-based gap of `F_j` containing `1 − |x_i^(1)|`
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum T2Result {
    Holds { memberships: Vec<GapMembership>, checks: Vec<Check> },
    Fails { reason: String },
}

impl T2Result {
    pub fn holds(&self) -> bool {
        matches!(self, T2Result::Holds { .. })
    }
}

/// Conditions of the equal-gap route for vertex `i`: strong connectivity,
/// a circuit avoiding `i`, equal gaps `δ` with `(d−1)δ < 1`, and for every
/// `j ≠ i` both `|x_i^(1)|` and `1 − |x_i^(1)|` strictly inside a basic gap
/// of `F_j`.
pub fn check_theorem_t2_conditions(f: &GdIfs, i: usize) -> Result<T2Result, ClassifyError> {
    let delta = f.equal_gap.clone().ok_or(ClassifyError::NotEqualGapFamily)?;
    let g = &f.graph;
    let fail = |reason: String| Ok(T2Result::Fails { reason });
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if delta <= zero {
        return fail("gap length is not positive".into());
    }
    for v in 0..g.vertex_count() {
        let d1 = Rational::from_integer((g.out_degree(v) as i64 - 1).into());
        if g.out_degree(v) >= 2 && &d1 * &delta >= one {
            return fail(format!("(d-1)*delta >= 1 at vertex {}", g.name(v)));
        }
    }
    if !g.strongly_connected() {
        return fail("graph is not strongly connected".into());
    }
    if g.circuit_avoiding(i).is_none() {
        return fail(format!("no circuit avoids vertex {}", g.name(i)));
    }
    let delta_sum = MonomialSum::from_rational(delta.clone());
    for v in 0..g.vertex_count() {
        if f.gaps[v].iter().any(|x| *x != delta_sum) {
            return fail(format!("gaps of vertex {} are not all equal to delta", g.name(v)));
        }
    }
    let mag = |e: usize| f.ratio(e).magnitude.to_rational();
    let Some(a) = mag(g.out_edges(i)[0]) else {
        return fail("first ratio of vertex i is not rational".into());
    };
    let targets = [a.clone(), &one - &a];
    let mut memberships = Vec::new();
    let mut checks = Vec::new();
    for j in (0..g.vertex_count()).filter(|&j| j != i) {
        let mags: Option<Vec<Rational>> = g.out_edges(j).iter().map(|&e| mag(e)).collect();
        let Some(mags) = mags else {
            return fail(format!("ratios of vertex {} are not rational", g.name(j)));
        };
        let mut found = [None, None];
        for (t, target) in targets.iter().enumerate() {
            let mut s = zero.clone();
            for m in 1..g.out_degree(j) {
                s += &mags[m - 1];
                let k = Rational::from_integer((m as i64).into());
                let lo = &s + (&k - &one) * &delta;
                let hi = &s + &k * &delta;
                let c = Check::point_in_gap(target.clone(), lo, hi);
                if c.positive() {
                    found[t] = Some(m);
                    checks.push(c);
                    break;
                }
            }
        }
        match found {
            [Some(m), Some(n)] => memberships.push(GapMembership { j, m, n }),
            [None, _] => return fail(format!("|x_i^(1)| = {a} is in no basic gap of vertex {}", g.name(j))),
            [_, None] => return fail(format!("1 - |x_i^(1)| = {} is in no basic gap of vertex {}", &one - &a, g.name(j))),
        }
    }
    Ok(T2Result::Holds { memberships, checks })
}

// ---------------------------------------------------------------- extraction

/// Maps along every return circuit at `u`. Requires every circuit reachable
/// from `u` to pass through `u`.
pub fn extract_standard_ifs(f: &GdIfs, u: usize) -> Result<StandardIfs, ClassifyError> {
    if !f.graph.all_circuits_through(u) {
        return Err(ClassifyError::CircuitAvoidsU(f.graph.name(u).to_string()));
    }
    let circuits = f.graph.return_circuits(u);
    let maps = circuits.iter().map(|c| f.path_map(c)).collect();
    Ok(StandardIfs { maps, circuits })
}

impl StandardIfs {
    /// Images of `hull` under all `m`-fold compositions.
    pub fn level(&self, hull: &(MonomialSum, MonomialSum), m: usize) -> Vec<(MonomialSum, MonomialSum)> {
        let mut comps = vec![Similarity::identity()];
        for _ in 0..m {
            comps = comps.iter().flat_map(|c| self.maps.iter().map(move |s| c.compose(s))).collect();
        }
        comps.iter().map(|c| c.image(&hull.0, &hull.1)).collect()
    }

    pub fn level_approx(
        &self,
        hull: &(MonomialSum, MonomialSum),
        m: usize,
        ctx: &crate::exactnum::NumericContext,
    ) -> Result<IntervalSet, GapsError> {
        IntervalSet::normalized(self.level(hull, m), ctx)
    }
}

// ---------------------------------------------------------------- pipeline

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// depth of the truncated gap search backing the breach record
    pub breach_depth: Option<usize>,
    pub k_min: usize,
    pub budget: u128,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { breach_depth: Some(6), k_min: 3, budget: DEFAULT_MAX_INTERVALS }
    }
}

/// Simple circuits avoiding `u`, each paired with its vertices in circuit order.
fn candidates(f: &GdIfs, u: usize) -> Vec<(Path, usize)> {
    let g = &f.graph;
    let mut out = Vec::new();
    for c in g.simple_circuits() {
        let vs = c.vertices(g);
        if vs.contains(&u) {
            continue;
        }
        let mut seen = Vec::new();
        for v in vs {
            if !seen.contains(&v) {
                seen.push(v);
                out.push((c.clone(), v));
            }
        }
    }
    out
}

/// Decides whether `F_u` is (COSC) self-similar where a route applies.
pub fn classify_vertex(f: &GdIfs, u: usize, options: &ClassifyOptions) -> Result<Verdict, ClassifyError> {
    let g = &f.graph;
    let bad = g.validate();
    if !bad.is_empty() {
        let names: Vec<&str> = bad.iter().map(|b| b.vertex.as_str()).collect();
        return Err(ClassifyError::InvalidGraph(names.join(", ")));
    }
    let sep = verify_separation(f)?;
    if !sep.status.satisfies_cosc() {
        return Err(ClassifyError::SeparationUnverified(sep.status.as_str().to_string()));
    }
    let mut cert = Certificate { assumptions: f.abstract_generators(), ..Certificate::default() };
    if !g.strongly_connected() {
        cert.notes.push("graph is not strongly connected; only vertices reachable from u are used".into());
    }

    if g.all_circuits_through(u) {
        let ifs = extract_standard_ifs(f, u)?;
        cert.route = Some(Route::Thm51);
        cert.notes.push(format!("{} return circuits at {}", ifs.circuits.len(), g.name(u)));
        return Ok(Verdict { vertex: u, outcome: Outcome::SelfSimilar(ifs), certificate: cert });
    }

    if f.equal_gap.is_some() {
        match check_theorem_t2_conditions(f, u)? {
            T2Result::Holds { memberships, checks } => {
                let detail = memberships
                    .iter()
                    .map(|m| format!("j={} m={} n={}", g.name(m.j), m.m, m.n))
                    .collect::<Vec<_>>()
                    .join("; ");
                cert.route = Some(Route::Thm49);
                cert.circuit = g.circuit_avoiding(u);
                cert.conditions.push(ConditionRecord { name: "T2".into(), holds: true, detail, checks });
                return Ok(Verdict { vertex: u, outcome: Outcome::NotSelfSimilar, certificate: cert });
            }
            T2Result::Fails { reason } => {
                cert.conditions.push(ConditionRecord { name: "T2".into(), holds: false, detail: reason, checks: vec![] });
            }
        }
    }

    let cands = candidates(f, u);
    let table = check_condition_iii(f)?;
    let iii = table.record(f);

    let iprime = check_condition_iprime(f);
    let lambdas_nonempty = (0..g.vertex_count()).all(|w| !f.lambda(w).is_empty());
    if iprime.holds && lambdas_nonempty && table.holds {
        if let Some((l, v)) = cands.iter().find(|(_, v)| g.reachable(u, *v).is_some()) {
            let iip = ConditionRecord {
                name: "ii'".into(),
                holds: true,
                detail: "every vertex has a positive basic gap".into(),
                checks: vec![],
            };
            cert.conditions.extend([iprime, iip, iii]);
            finish_negative(f, u, l.clone(), *v, Route::Lemma44, options, &mut cert)?;
            return Ok(Verdict { vertex: u, outcome: Outcome::NotCoscSelfSimilar, certificate: cert });
        }
    }
    cert.notes.push(format!(
        "stronger global conditions: i' {}, ii' {}, iii {}",
        iprime.holds, lambdas_nonempty, table.holds
    ));

    let evaluated: Vec<(CandidateFailure, Option<[ConditionRecord; 2]>)> = cands
        .par_iter()
        .map(|(l, v)| {
            let reachable = g.reachable(u, *v).is_some();
            let mut fail = CandidateFailure {
                circuit: l.clone(),
                v: *v,
                reachable,
                condition_i: None,
                condition_ii: None,
                condition_iii: table.holds,
            };
            if !reachable {
                return (fail, None);
            }
            let ci = check_condition_i(f, l);
            let cii = condition_ii_record(f, u, *v);
            fail.condition_i = Some(ci.holds);
            fail.condition_ii = Some(cii.holds);
            (fail, Some([ci, cii]))
        })
        .collect();
    let winner = evaluated.iter().position(|(fail, recs)| {
        fail.condition_iii && recs.as_ref().is_some_and(|[a, b]| a.holds && b.holds)
    });
    match winner {
        Some(w) => {
            let (fail, recs) = &evaluated[w];
            let [ci, cii] = recs.clone().expect("evaluated candidate");
            cert.conditions.extend([ci, cii, iii]);
            cert.failures = evaluated[..w].iter().map(|(f, _)| f.clone()).collect();
            finish_negative(f, u, fail.circuit.clone(), fail.v, Route::Lemma41, options, &mut cert)?;
            Ok(Verdict { vertex: u, outcome: Outcome::NotCoscSelfSimilar, certificate: cert })
        }
        None => {
            cert.conditions.push(iprime);
            cert.conditions.push(iii);
            cert.failures = evaluated.into_iter().map(|(f, _)| f).collect();
            Ok(Verdict { vertex: u, outcome: Outcome::Inconclusive, certificate: cert })
        }
    }
}

fn finish_negative(
    f: &GdIfs,
    u: usize,
    l: Path,
    v: usize,
    route: Route,
    options: &ClassifyOptions,
    cert: &mut Certificate,
) -> Result<(), ClassifyError> {
    let path = f.graph.reachable(u, v).expect("v reachable from u");
    cert.breach = Some(breach(f, u, &l, v, &path, options)?);
    cert.route = Some(route);
    cert.circuit = Some(l);
    cert.v = Some(v);
    cert.connecting_path = Some(path);
    if let Some(b) = &cert.breach {
        if !b.consistent() {
            cert.notes.push("truncated gap search reported a ratio inside the cone of L".into());
        }
    }
    Ok(())
}

fn breach(f: &GdIfs, u: usize, l: &Path, v: usize, path: &Path, options: &ClassifyOptions) -> Result<Breach, ClassifyError> {
    let (a_l, _) = split_ratios(f, l);
    let ratio_l = f.path_magnitude(l);
    let theta1 = f.lambda(v)[0].mul(&f.path_magnitude(path));
    let theta2 = f.lambda(u)[0].clone();
    let ratio_check = Check::membership(ratio_l.clone(), a_l.clone(), Cone::QPlusStar);
    let mut b = Breach {
        theta1,
        ratio_l,
        ratio_check,
        theta2,
        theta1_ratios: Vec::new(),
        theta2_checks: Vec::new(),
        search_depth: None,
    };
    let Some(depth) = options.breach_depth else {
        return Ok(b);
    };
    let catalog = match gap_lengths_truncated(f, u, depth, options.budget) {
        Ok(c) => c,
        Err(GapsError::DepthTooLarge { .. }) => return Ok(b),
        Err(e) => return Err(e.into()),
    };
    let detect = |theta: &Monomial| match detect_geometric_ratios(&catalog, theta, options.k_min, &f.numeric) {
        Err(GapsError::ThetaAbsent(_)) => Ok(Vec::new()),
        r => r,
    };
    b.theta1_ratios = detect(&b.theta1)?;
    b.theta2_checks = detect(&b.theta2)?
        .into_iter()
        .map(|r| Check::membership(r, a_l.clone(), Cone::QPlusStar))
        .collect();
    b.search_depth = Some(depth);
    Ok(b)
}

#[cfg(test)]
mod tests;
