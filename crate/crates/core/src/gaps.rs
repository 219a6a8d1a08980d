//! Level-m approximations, gap-length catalogs and interval-set metrics.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use crate::construct::{GdIfs, Similarity};
use crate::digraph::Path;
use crate::exactnum::{eval_numeric, Enclosure, ExactError, Monomial, MonomialSum, NumericContext, Rational};

pub const DEFAULT_MAX_INTERVALS: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GapsError {
    #[error("depth needs {needed} intervals, budget is {budget}")]
    DepthTooLarge { needed: u128, budget: u128 },
    #[error("vertex {0}: a positive gap length is not a single monomial")]
    NonMonomialGap(String),
    #[error("cannot order interval endpoints: {0}")]
    Indeterminate(String),
    #[error("empty interval set")]
    EmptyInput,
    #[error("value {0} does not occur in the catalog")]
    ThetaAbsent(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Sorted closed intervals with exact endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSet {
    pub intervals: Vec<(MonomialSum, MonomialSum)>,
}

impl IntervalSet {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> MonomialSum {
        self.intervals.iter().fold(MonomialSum::zero(), |acc, (a, b)| acc + (b - a))
    }

    /// Every interval of `self` lies inside some interval of `outer`.
    pub fn is_subset_of(&self, outer: &IntervalSet, ctx: &NumericContext) -> Result<bool, GapsError> {
        for (a, b) in &self.intervals {
            let mut inside = false;
            for (c, d) in &outer.intervals {
                let left = ctx.compare(a, c)?;
                let right = ctx.compare(d, b)?;
                if matches!(left, Some(Ordering::Greater | Ordering::Equal))
                    && matches!(right, Some(Ordering::Greater | Ordering::Equal))
                {
                    inside = true;
                    break;
                }
            }
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Sorts by left endpoint and merges intervals that touch or overlap.
    pub fn normalized(mut raw: Vec<(MonomialSum, MonomialSum)>, ctx: &NumericContext) -> Result<Self, GapsError> {
        sort_by_left(&mut raw, ctx)?;
        let mut out: Vec<(MonomialSum, MonomialSum)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            if let Some(last) = out.last_mut() {
                match certain(ctx, &a, &last.1)? {
                    Ordering::Greater => {}
                    _ => {
                        if certain(ctx, &b, &last.1)? == Ordering::Greater {
                            last.1 = b;
                        }
                        continue;
                    }
                }
            }
            out.push((a, b));
        }
        Ok(IntervalSet { intervals: out })
    }
}

fn certain(ctx: &NumericContext, a: &MonomialSum, b: &MonomialSum) -> Result<Ordering, GapsError> {
    ctx.compare(a, b)?
        .ok_or_else(|| GapsError::Indeterminate(format!("{a} vs {b}")))
}

fn sort_by_left(v: &mut [(MonomialSum, MonomialSum)], ctx: &NumericContext) -> Result<(), GapsError> {
    // sort on enclosure midpoints, then certify adjacent pairs exactly
    let mut keyed: Vec<(Rational, usize)> = Vec::with_capacity(v.len());
    for (i, (a, _)) in v.iter().enumerate() {
        keyed.push((ctx.eval(a)?.mid(), i));
    }
    keyed.sort();
    let sorted: Vec<(MonomialSum, MonomialSum)> = keyed.iter().map(|(_, i)| v[*i].clone()).collect();
    for w in sorted.windows(2) {
        if certain(ctx, &w[0].0, &w[1].0)? == Ordering::Greater {
            return Err(GapsError::Indeterminate("left endpoints out of order".into()));
        }
    }
    v.clone_from_slice(&sorted);
    Ok(())
}

fn check_budget(f: &GdIfs, u: usize, m: usize, budget: u128) -> Result<(), GapsError> {
    let needed = f.graph.path_counts(m)[u];
    if needed > budget {
        return Err(GapsError::DepthTooLarge { needed, budget });
    }
    Ok(())
}

/// Images `S_e(conv F_ω(e))` over paths `e` of length `m` from `u`, in path order.
fn level_images(f: &GdIfs, u: usize, m: usize) -> Vec<(MonomialSum, MonomialSum)> {
    let mut out = Vec::new();
    walk(f, u, m, &Similarity::identity(), &mut out);
    out
}

fn walk(f: &GdIfs, v: usize, m: usize, outer: &Similarity, out: &mut Vec<(MonomialSum, MonomialSum)>) {
    if m == 0 {
        out.push(outer.image(&f.hulls[v].0, &f.hulls[v].1));
        return;
    }
    for &e in f.graph.out_edges(v) {
        walk(f, f.graph.edge(e).to, m - 1, &outer.compose(&f.maps[e]), out);
    }
}

/// `I_u^m`: union of the level-`m` images of the hulls.
pub fn level_approx(f: &GdIfs, u: usize, m: usize, budget: u128) -> Result<IntervalSet, GapsError> {
    check_budget(f, u, m, budget)?;
    IntervalSet::normalized(level_images(f, u, m), &f.numeric)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// image of basic gap `gap_index` (0-based) of `vertex` under `S_path`
    Path { path: Path, vertex: usize, gap_index: usize },
    /// complementary interval found geometrically
    Geometric { left: MonomialSum, right: MonomialSum },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapEntry {
    pub length: Monomial,
    pub provenance: Provenance,
    pub depth: Option<usize>,
}

/// Multiset of gap lengths with provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapCatalog {
    pub vertex: usize,
    pub depth: usize,
    pub entries: Vec<GapEntry>,
    /// every gap length strictly above this value occurs in the catalog
    pub floor: Option<Monomial>,
}

impl GapCatalog {
    pub fn distinct_values(&self) -> BTreeSet<Monomial> {
        self.entries.iter().map(|e| e.length.clone()).collect()
    }

    pub fn lengths(&self) -> Vec<Monomial> {
        self.entries.iter().map(|e| e.length.clone()).collect()
    }

    /// Sorted multiset of lengths with depth `< m`.
    pub fn slice_below(&self, m: usize) -> Vec<Monomial> {
        let mut v: Vec<Monomial> = self
            .entries
            .iter()
            .filter(|e| e.depth.is_some_and(|d| d < m))
            .map(|e| e.length.clone())
            .collect();
        v.sort();
        v
    }

    /// Replays a path provenance: `λ_v^(r) · |ρ_path|`.
    pub fn replay(&self, f: &GdIfs, entry: &GapEntry) -> Option<Monomial> {
        match &entry.provenance {
            Provenance::Path { path, vertex, gap_index } => {
                let gap = f.gaps[*vertex][*gap_index].as_positive_monomial()?;
                Some(gap.mul(&f.path_magnitude(path)))
            }
            Provenance::Geometric { left, right } => (right - left).as_positive_monomial(),
        }
    }
}

fn positive_gaps(f: &GdIfs, v: usize) -> Result<Vec<(usize, Monomial)>, GapsError> {
    let mut out = Vec::new();
    for (r, g) in f.gaps[v].iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let m = g
            .as_positive_monomial()
            .ok_or_else(|| GapsError::NonMonomialGap(f.graph.name(v).to_string()))?;
        out.push((r, m));
    }
    Ok(out)
}

/// `Λ_u ∪ ⋃_{m ≤ max_depth} ⋃_v Λ_v · {|ρ_e| : e path u → v, |e| = m}`, kept as
/// a multiset ordered by depth and then canonical monomial order.
pub fn gap_lengths_truncated(f: &GdIfs, u: usize, max_depth: usize, budget: u128) -> Result<GapCatalog, GapsError> {
    let total: u128 = (0..=max_depth).map(|m| f.graph.path_counts(m)[u]).fold(0, u128::saturating_add);
    if total > budget {
        return Err(GapsError::DepthTooLarge { needed: total, budget });
    }
    let gaps: Vec<Vec<(usize, Monomial)>> =
        (0..f.graph.vertex_count()).map(|v| positive_gaps(f, v)).collect::<Result<_, _>>()?;
    let mut entries = Vec::new();
    let mut level = vec![(Path::default(), Monomial::one())];
    for depth in 0..=max_depth {
        let mut next = Vec::new();
        for (path, mag) in &level {
            let v = path.terminal(&f.graph).unwrap_or(u);
            for (r, g) in &gaps[v] {
                entries.push(GapEntry {
                    length: g.mul(mag),
                    provenance: Provenance::Path { path: path.clone(), vertex: v, gap_index: *r },
                    depth: Some(depth),
                });
            }
            if depth < max_depth {
                for &e in f.graph.out_edges(v) {
                    next.push((path.extended(e), mag.mul(&f.maps[e].ratio.magnitude)));
                }
            }
        }
        level = next;
    }
    entries.sort_by(|a, b| (a.depth, &a.length).cmp(&(b.depth, &b.length)));
    let floor = catalog_floor(f, u, max_depth, &gaps)?;
    Ok(GapCatalog { vertex: u, depth: max_depth, entries, floor })
}

/// `max gap · (max |ρ|)^(depth+1)` over what is reachable from `u`.
fn catalog_floor(f: &GdIfs, u: usize, depth: usize, gaps: &[Vec<(usize, Monomial)>]) -> Result<Option<Monomial>, GapsError> {
    let reach = f.graph.reachable_set(u);
    let ctx = &f.numeric;
    let mut big_gap: Option<Monomial> = None;
    for v in (0..reach.len()).filter(|&v| reach[v]) {
        for (_, g) in &gaps[v] {
            big_gap = Some(larger(ctx, big_gap, g)?);
        }
    }
    let mut big_ratio: Option<Monomial> = None;
    for e in f.graph.edges() {
        if reach[e.from] {
            big_ratio = Some(larger(ctx, big_ratio, &f.maps[e.id].ratio.magnitude)?);
        }
    }
    Ok(match (big_gap, big_ratio) {
        (Some(g), Some(r)) => Some(g.mul(&r.pow(&Rational::from_integer((depth as i64 + 1).into())))),
        _ => None,
    })
}

/// The larger of two monomials, comparing upper bounds when undecided.
fn larger(ctx: &NumericContext, cur: Option<Monomial>, cand: &Monomial) -> Result<Monomial, GapsError> {
    let Some(cur) = cur else { return Ok(cand.clone()) };
    let (a, b) = (MonomialSum::from_monomial(cand), MonomialSum::from_monomial(&cur));
    let bigger = match ctx.compare(&a, &b)? {
        Some(o) => o == Ordering::Greater,
        None => ctx.eval(&a)?.hi > ctx.eval(&b)?.hi,
    };
    Ok(if bigger { cand.clone() } else { cur })
}

/// Complementary intervals of `I_u^m` inside `conv F_u`, found geometrically.
pub fn gaps_bruteforce(f: &GdIfs, u: usize, m: usize, budget: u128) -> Result<GapCatalog, GapsError> {
    let set = level_approx(f, u, m, budget)?;
    let mut entries = Vec::new();
    for w in set.intervals.windows(2) {
        let (left, right) = (w[0].1.clone(), w[1].0.clone());
        let length = (&right - &left)
            .as_positive_monomial()
            .ok_or_else(|| GapsError::NonMonomialGap(f.graph.name(u).to_string()))?;
        entries.push(GapEntry { length, provenance: Provenance::Geometric { left, right }, depth: None });
    }
    Ok(GapCatalog { vertex: u, depth: m, entries, floor: None })
}

/// Hausdorff distance between two unions of closed intervals. Endpoints are
/// enclosed at `precision_bits`; the distance is computed on midpoints and
/// widened by twice the largest endpoint radius.
pub fn hausdorff_distance(a: &IntervalSet, b: &IntervalSet, ctx: &NumericContext, precision_bits: u32) -> Result<Enclosure, GapsError> {
    if a.is_empty() || b.is_empty() {
        return Err(GapsError::EmptyInput);
    }
    let mut radius = Rational::zero();
    let mut mids = |s: &IntervalSet| -> Result<Vec<(Rational, Rational)>, GapsError> {
        let mut out = Vec::with_capacity(s.len());
        for (x, y) in &s.intervals {
            let (ex, ey) = (eval_numeric(x, ctx, precision_bits)?, eval_numeric(y, ctx, precision_bits)?);
            for e in [&ex, &ey] {
                let r = e.width() / Rational::from_integer(2.into());
                if r > radius {
                    radius = r;
                }
            }
            out.push((ex.mid(), ey.mid()));
        }
        out.sort();
        Ok(out)
    };
    let (pa, pb) = (mids(a)?, mids(b)?);
    let d = directed(&pa, &pb).max(directed(&pb, &pa));
    let slack = radius * Rational::from_integer(2.into());
    let lo = (&d - &slack).max(Rational::zero());
    Ok(Enclosure { lo, hi: d + slack })
}

/// Distance from `x` to a sorted union of intervals.
fn dist_to(x: &Rational, set: &[(Rational, Rational)]) -> Rational {
    let i = set.partition_point(|(lo, _)| lo <= x);
    let mut best: Option<Rational> = None;
    if i > 0 {
        let (_, hi) = &set[i - 1];
        let d = if x <= hi { Rational::zero() } else { x - hi };
        best = Some(d);
    }
    if i < set.len() {
        let d = &set[i].0 - x;
        best = Some(best.map_or(d.clone(), |b| b.min(d)));
    }
    best.expect("nonempty set")
}

/// `sup_{x ∈ A} dist(x, B)`: attained at an endpoint of `A` or at the middle
/// of a gap of `B` lying in `A`.
fn directed(a: &[(Rational, Rational)], b: &[(Rational, Rational)]) -> Rational {
    let mut best = Rational::zero();
    let mut consider = |x: &Rational| {
        let d = dist_to(x, b);
        if d > best {
            best = d;
        }
    };
    for (lo, hi) in a {
        consider(lo);
        consider(hi);
    }
    for w in b.windows(2) {
        let mid = (&w[0].1 + &w[1].0) / Rational::from_integer(2.into());
        if a.iter().any(|(lo, hi)| lo <= &mid && &mid <= hi) {
            consider(&mid);
        }
    }
    best
}

/// Truncated search for common ratios of geometric progressions through `θ`
/// in the catalog's distinct values. Candidates are `c/θ` for catalog values
/// `c < θ`; a candidate is kept when the progression has at least `k_min`
/// consecutive terms in the catalog and no term above the catalog floor is
/// missing. This can both miss and over-report ratios.
pub fn detect_geometric_ratios(catalog: &GapCatalog, theta: &Monomial, k_min: usize, ctx: &NumericContext) -> Result<Vec<Monomial>, GapsError> {
    let values = catalog.distinct_values();
    if !values.contains(theta) {
        return Err(GapsError::ThetaAbsent(theta.to_string()));
    }
    let as_sum = MonomialSum::from_monomial;
    let above_floor = |x: &Monomial| -> Result<bool, GapsError> {
        Ok(match &catalog.floor {
            None => true,
            Some(fl) => ctx.compare(&as_sum(x), &as_sum(fl))? == Some(Ordering::Greater),
        })
    };
    let mut out = Vec::new();
    for c in &values {
        if ctx.compare(&as_sum(c), &as_sum(theta))? != Some(Ordering::Less) {
            continue;
        }
        let r = c.div(theta);
        let mut count = 1;
        let mut up = theta.div(&r);
        while values.contains(&up) {
            count += 1;
            up = up.div(&r);
        }
        let mut down = theta.mul(&r);
        let mut broken = false;
        while above_floor(&down)? {
            if !values.contains(&down) {
                broken = true;
                break;
            }
            count += 1;
            down = down.mul(&r);
        }
        if !broken && count >= k_min {
            out.push(r);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}
