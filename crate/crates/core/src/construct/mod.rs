//! Graph-directed IFS construction from exact parameters.

mod numeric;
mod separation;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::digraph::{Digraph, Path};
use crate::exactnum::{
    ExactError, Monomial, MonomialSum, NumericContext, QMatrix, Rational, Sign, SignedMonomial,
};

pub use numeric::{build_numeric, NumericGdIfs};
pub use separation::{verify_separation, BasicGap, SeparationReport, SeparationStatus, VertexSeparation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("spectral radius of M_x(1) is not below 1")]
    NotContractive,
    #[error("ratio magnitudes are not all rational; use the numeric construction")]
    NonRationalRatios,
    #[error("matrix has a non-rational entry at ({0}, {1})")]
    NonRationalMatrix(usize, usize),
    #[error("edge {0}: |ratio| must lie in (0, 1)")]
    RatioOutOfRange(String),
    #[error("vertex {0}: every gap is zero")]
    AllGapsZero(String),
    #[error("parameter shape mismatch: {0}")]
    Shape(String),
    #[error("delta must satisfy 0 < delta < 1/(d_i - 1) at every vertex")]
    BadDelta,
    #[error("vertex {vertex}: ratio magnitudes sum to {sum}, expected {expected}")]
    MagnitudeSumMismatch { vertex: String, sum: String, expected: String },
    #[error("vertex {0}: cannot certify a positive hull length")]
    DegenerateLength(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Parameters of the construction: one signed ratio per edge, `d_i − 1` gap
/// lengths per vertex (`None` is a zero gap) and the left endpoint of every hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPoint {
    pub graph: Digraph,
    /// indexed by edge id
    pub ratios: Vec<SignedMonomial>,
    /// per vertex, in out-list order
    pub gaps: Vec<Vec<Option<Monomial>>>,
    pub base_points: Vec<MonomialSum>,
}

impl ParamPoint {
    /// Base points default to zero.
    pub fn new(graph: Digraph, ratios: Vec<SignedMonomial>, gaps: Vec<Vec<Option<Monomial>>>) -> Result<Self, ConstructError> {
        let base_points = vec![MonomialSum::zero(); graph.vertex_count()];
        let p = ParamPoint { graph, ratios, gaps, base_points };
        p.check_shape()?;
        Ok(p)
    }

    pub fn with_base_points(mut self, base_points: Vec<MonomialSum>) -> Result<Self, ConstructError> {
        self.base_points = base_points;
        self.check_shape()?;
        Ok(self)
    }

    fn check_shape(&self) -> Result<(), ConstructError> {
        let g = &self.graph;
        if self.ratios.len() != g.edge_count() {
            return Err(ConstructError::Shape(format!(
                "{} ratios for {} edges",
                self.ratios.len(),
                g.edge_count()
            )));
        }
        if self.gaps.len() != g.vertex_count() || self.base_points.len() != g.vertex_count() {
            return Err(ConstructError::Shape("one gap row and base point per vertex".into()));
        }
        for v in 0..g.vertex_count() {
            let want = g.out_degree(v).saturating_sub(1);
            if self.gaps[v].len() != want {
                return Err(ConstructError::Shape(format!(
                    "vertex {} needs {want} gaps, got {}",
                    g.name(v),
                    self.gaps[v].len()
                )));
            }
        }
        Ok(())
    }

    /// `|x_i^(k)|` for the `k`-th (1-based) edge leaving `i`.
    pub fn magnitude(&self, e: usize) -> &Monomial {
        &self.ratios[e].magnitude
    }

    pub fn gap_sum(&self, v: usize) -> MonomialSum {
        self.gaps[v]
            .iter()
            .flatten()
            .fold(MonomialSum::zero(), |acc, m| acc + MonomialSum::from_monomial(m))
    }

    /// Entry magnitudes in coordinate order: all ratios by edge id, then gaps
    /// vertex by vertex. Zero gaps are reported as `None`.
    pub fn entries(&self) -> Vec<Option<Monomial>> {
        let mut out: Vec<Option<Monomial>> = self.ratios.iter().map(|r| Some(r.magnitude.clone())).collect();
        for row in &self.gaps {
            out.extend(row.iter().cloned());
        }
        out
    }

    pub fn has_rational_ratios(&self) -> bool {
        self.ratios.iter().all(|r| r.magnitude.is_rational())
    }
}

/// `M_x(s)`: entry `(i, j)` sums `|x_e|^s` over the edges `i → j`.
pub fn build_matrix(p: &ParamPoint, s: &Rational) -> Vec<Vec<MonomialSum>> {
    let n = p.graph.vertex_count();
    let mut m = vec![vec![MonomialSum::zero(); n]; n];
    for e in p.graph.edges() {
        let term = MonomialSum::from_monomial(&p.ratios[e.id].magnitude.pow(s));
        m[e.from][e.to] = &m[e.from][e.to] + &term;
    }
    m
}

pub fn to_qmatrix(m: &[Vec<MonomialSum>]) -> Result<QMatrix, ConstructError> {
    let mut rows = Vec::with_capacity(m.len());
    for (i, row) in m.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (j, x) in row.iter().enumerate() {
            r.push(x.as_rational().ok_or(ConstructError::NonRationalMatrix(i, j))?);
        }
        rows.push(r);
    }
    Ok(QMatrix::from_rows(rows))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContractiveProof {
    /// largest row sum
    RowSum(Rational),
    /// leading principal minors of `id − M`
    PrincipalMinors(Vec<Rational>),
}

/// Exact test of `r_σ(M) < 1` for a nonnegative square matrix.
pub fn check_contractive(m: &QMatrix) -> Option<ContractiveProof> {
    let n = m.rows();
    let one = Rational::one();
    let max_row = (0..n)
        .map(|i| m.row(i).iter().sum::<Rational>())
        .max()
        .unwrap_or_else(Rational::zero);
    if max_row < one {
        return Some(ContractiveProof::RowSum(max_row));
    }
    let a = QMatrix::identity(n).sub(m);
    let minors: Vec<Rational> = (1..=n).map(|k| a.leading_minor(k)).collect();
    minors.iter().all(|d| d.is_positive()).then_some(ContractiveProof::PrincipalMinors(minors))
}

fn check_ratio_ranges(p: &ParamPoint, ctx: &NumericContext) -> Result<(), ConstructError> {
    for e in p.graph.edges() {
        let mag = MonomialSum::from_monomial(&p.ratios[e.id].magnitude);
        let below_one = ctx.compare(&mag, &MonomialSum::from_integer(1))?;
        if below_one != Some(std::cmp::Ordering::Less) {
            return Err(ConstructError::RatioOutOfRange(p.graph.edge_label(e.id)));
        }
    }
    for v in 0..p.graph.vertex_count() {
        if !p.gaps[v].is_empty() && p.gaps[v].iter().all(Option::is_none) {
            return Err(ConstructError::AllGapsZero(p.graph.name(v).to_string()));
        }
    }
    Ok(())
}

/// `l = (id − M_x(1))⁻¹ (Σ_k ξ_i^(k))_i`, solved exactly.
pub fn solve_lengths(p: &ParamPoint) -> Result<Vec<MonomialSum>, ConstructError> {
    if !p.has_rational_ratios() {
        return Err(ConstructError::NonRationalRatios);
    }
    let m = to_qmatrix(&build_matrix(p, &Rational::one()))?;
    check_contractive(&m).ok_or(ConstructError::NotContractive)?;
    let n = p.graph.vertex_count();
    let rhs: Vec<MonomialSum> = (0..n).map(|v| p.gap_sum(v)).collect();
    let a = QMatrix::identity(n).sub(&m);
    let l = crate::exactnum::solve_sums(&a, &rhs).ok_or(ConstructError::NotContractive)?;
    for v in 0..n {
        assert_eq!(l[v], length_identity(p, &l, v), "length identity failed at vertex {v}");
    }
    Ok(l)
}

/// Right-hand side of `l_i = Σ_k ξ_i^(k) + Σ_k |x_i^(k)| l_ω(e_i(k))`.
pub fn length_identity(p: &ParamPoint, l: &[MonomialSum], v: usize) -> MonomialSum {
    p.graph.out_edges(v).iter().fold(p.gap_sum(v), |acc, &e| {
        acc + l[p.graph.edge(e).to].mul_monomial(p.magnitude(e))
    })
}

/// One similarity `t ↦ ratio·t + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Similarity {
    pub ratio: SignedMonomial,
    pub translation: MonomialSum,
}

impl Similarity {
    pub fn identity() -> Self {
        Similarity { ratio: SignedMonomial::positive(Monomial::one()), translation: MonomialSum::zero() }
    }

    pub fn apply(&self, t: &MonomialSum) -> MonomialSum {
        t.mul_signed(&self.ratio) + self.translation.clone()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            ratio: self.ratio.mul(&inner.ratio),
            translation: self.apply(&inner.translation),
        }
    }

    /// Image of `[lo, hi]` with endpoints in increasing order.
    pub fn image(&self, lo: &MonomialSum, hi: &MonomialSum) -> (MonomialSum, MonomialSum) {
        let (a, b) = (self.apply(lo), self.apply(hi));
        match self.ratio.sign {
            Sign::Positive => (a, b),
            Sign::Negative => (b, a),
        }
    }
}

/// A constructed GD-IFS with exact map data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GdIfs {
    pub graph: Digraph,
    /// indexed by edge id
    pub maps: Vec<Similarity>,
    pub hulls: Vec<(MonomialSum, MonomialSum)>,
    /// `b_i^(k)`, per vertex in out-list order; empty for hand-built systems
    pub anchors: Vec<Vec<MonomialSum>>,
    /// basic gap lengths per vertex in left-to-right order (zero allowed)
    pub gaps: Vec<Vec<MonomialSum>>,
    pub numeric: NumericContext,
    /// `Some(δ)` for the equal-gap family
    pub equal_gap: Option<Rational>,
}

impl GdIfs {
    /// Hand-built system. Gap lengths are read off the images of the given hulls.
    pub fn from_explicit_maps(graph: Digraph, maps: Vec<Similarity>, hulls: Vec<(MonomialSum, MonomialSum)>) -> Self {
        assert_eq!(maps.len(), graph.edge_count());
        assert_eq!(hulls.len(), graph.vertex_count());
        let mut f = GdIfs {
            graph,
            maps,
            hulls,
            anchors: Vec::new(),
            gaps: Vec::new(),
            numeric: NumericContext::default(),
            equal_gap: None,
        };
        f.gaps = (0..f.graph.vertex_count())
            .map(|v| {
                let kids = f.child_intervals(v);
                kids.windows(2).map(|w| &w[1].0 - &w[0].1).collect()
            })
            .collect();
        f
    }

    pub fn with_numeric(mut self, ctx: NumericContext) -> Self {
        self.numeric = ctx;
        self
    }

    pub fn length(&self, v: usize) -> MonomialSum {
        &self.hulls[v].1 - &self.hulls[v].0
    }

    pub fn ratio(&self, e: usize) -> &SignedMonomial {
        &self.maps[e].ratio
    }

    /// `S_e(conv F_ω(e))` for each edge leaving `v`, in out-list order.
    pub fn child_intervals(&self, v: usize) -> Vec<(MonomialSum, MonomialSum)> {
        self.graph
            .out_edges(v)
            .iter()
            .map(|&e| {
                let w = self.graph.edge(e).to;
                self.maps[e].image(&self.hulls[w].0, &self.hulls[w].1)
            })
            .collect()
    }

    /// `S_{e_1} ∘ … ∘ S_{e_m}`.
    pub fn path_map(&self, path: &Path) -> Similarity {
        path.edges
            .iter()
            .fold(Similarity::identity(), |acc, &e| acc.compose(&self.maps[e]))
    }

    /// `|ρ_e|` for a path.
    pub fn path_magnitude(&self, path: &Path) -> Monomial {
        path.edges
            .iter()
            .fold(Monomial::one(), |acc, &e| acc.mul(&self.maps[e].ratio.magnitude))
    }

    /// Gap lengths that are single positive monomials.
    pub fn gap_monomials(&self, v: usize) -> Vec<Option<Monomial>> {
        self.gaps[v].iter().map(|g| g.as_positive_monomial()).collect()
    }

    /// Λ_v: distinct strictly positive basic-gap lengths, in canonical order.
    /// Gaps that are not single monomials are left out.
    pub fn lambda(&self, v: usize) -> Vec<Monomial> {
        let set: std::collections::BTreeSet<Monomial> = self.gap_monomials(v).into_iter().flatten().collect();
        set.into_iter().collect()
    }

    /// Distinct ratio magnitudes in edge order.
    pub fn ratio_magnitudes(&self) -> Vec<Monomial> {
        let mut out: Vec<Monomial> = Vec::new();
        for m in &self.maps {
            if !out.contains(&m.ratio.magnitude) {
                out.push(m.ratio.magnitude.clone());
            }
        }
        out
    }

    pub fn abstract_generators(&self) -> Vec<String> {
        let mut names = std::collections::BTreeSet::new();
        for m in &self.maps {
            names.extend(m.ratio.magnitude.abstract_names().map(str::to_string));
            names.extend(m.translation.abstract_names().map(str::to_string));
        }
        for row in &self.gaps {
            for g in row {
                names.extend(g.abstract_names().map(str::to_string));
            }
        }
        names.into_iter().collect()
    }
}

/// Builds the GD-IFS with hulls `[b_i^(1), b_i^(1) + l_i]` and basic gaps `ξ`.
pub fn build_gdifs(p: &ParamPoint, ctx: &NumericContext) -> Result<GdIfs, ConstructError> {
    check_ratio_ranges(p, ctx)?;
    let l = solve_lengths(p)?;
    assemble(p, l, ctx)
}

fn assemble(p: &ParamPoint, l: Vec<MonomialSum>, ctx: &NumericContext) -> Result<GdIfs, ConstructError> {
    let g = &p.graph;
    let n = g.vertex_count();
    for v in 0..n {
        if ctx.sign(&l[v])? != Some(std::cmp::Ordering::Greater) {
            return Err(ConstructError::DegenerateLength(g.name(v).to_string()));
        }
    }
    let mut maps = vec![Similarity::identity(); g.edge_count()];
    let mut anchors = Vec::with_capacity(n);
    let mut gaps = Vec::with_capacity(n);
    for v in 0..n {
        let mut b = p.base_points[v].clone();
        let mut row = Vec::new();
        let out = g.out_edges(v);
        for (k, &e) in out.iter().enumerate() {
            let w = g.edge(e).to;
            let x = &p.ratios[e];
            let mut t = &b - &p.base_points[w].mul_signed(x);
            if x.is_negative() {
                t = t + l[w].mul_monomial(&x.magnitude);
            }
            maps[e] = Similarity { ratio: x.clone(), translation: t };
            row.push(b.clone());
            if k + 1 < out.len() {
                let xi = p.gaps[v][k].as_ref().map_or_else(MonomialSum::zero, MonomialSum::from_monomial);
                b = b + l[w].mul_monomial(&x.magnitude) + xi;
            }
        }
        // right end of the last child is the right end of the hull
        let last = *out.last().expect("vertex without out-edges");
        let right = &b + &l[g.edge(last).to].mul_monomial(p.magnitude(last));
        assert_eq!(right, &p.base_points[v] + &l[v], "endpoint identity failed at vertex {v}");
        anchors.push(row);
        gaps.push(
            p.gaps[v]
                .iter()
                .map(|x| x.as_ref().map_or_else(MonomialSum::zero, MonomialSum::from_monomial))
                .collect(),
        );
    }
    let hulls = (0..n).map(|v| (p.base_points[v].clone(), &p.base_points[v] + &l[v])).collect();
    Ok(GdIfs { graph: g.clone(), maps, hulls, anchors, gaps, numeric: ctx.clone(), equal_gap: None })
}

/// Member of the equal-gap family: every hull is `[0, 1]` and every basic gap
/// has length `δ`. Requires `Σ_k |x_i^(k)| = 1 − (d_i − 1)δ` at each vertex.
pub fn build_equal_gap_family(
    g: &Digraph,
    delta: &Rational,
    magnitudes: &[Vec<Monomial>],
    signs: &[Vec<Sign>],
    ctx: &NumericContext,
) -> Result<GdIfs, ConstructError> {
    let n = g.vertex_count();
    if magnitudes.len() != n || signs.len() != n {
        return Err(ConstructError::Shape("one magnitude and sign row per vertex".into()));
    }
    if !delta.is_positive() {
        return Err(ConstructError::BadDelta);
    }
    for v in 0..n {
        let d = g.out_degree(v);
        if d >= 2 && delta * Rational::from_integer((d as i64 - 1).into()) >= Rational::one() {
            return Err(ConstructError::BadDelta);
        }
    }
    let mut ratios = vec![SignedMonomial::positive(Monomial::one()); g.edge_count()];
    let mut gaps = Vec::with_capacity(n);
    let delta_mono = Monomial::factor_rational(delta)?;
    for v in 0..n {
        let out = g.out_edges(v);
        if magnitudes[v].len() != out.len() || signs[v].len() != out.len() {
            return Err(ConstructError::Shape(format!("vertex {} needs {} magnitudes", g.name(v), out.len())));
        }
        let sum = magnitudes[v].iter().fold(MonomialSum::zero(), |acc, m| acc + MonomialSum::from_monomial(m));
        let d1 = Rational::from_integer((out.len() as i64 - 1).into());
        let expected = MonomialSum::from_rational(Rational::one() - d1 * delta);
        if sum != expected {
            return Err(ConstructError::MagnitudeSumMismatch {
                vertex: g.name(v).to_string(),
                sum: sum.to_string(),
                expected: expected.to_string(),
            });
        }
        for (k, &e) in out.iter().enumerate() {
            ratios[e] = SignedMonomial::new(signs[v][k], magnitudes[v][k].clone());
        }
        gaps.push(vec![Some(delta_mono.clone()); out.len().saturating_sub(1)]);
    }
    let p = ParamPoint::new(g.clone(), ratios, gaps)?;
    check_ratio_ranges(&p, ctx)?;
    let l = vec![MonomialSum::from_integer(1); n];
    for v in 0..n {
        assert_eq!(l[v], length_identity(&p, &l, v));
    }
    let mut f = assemble(&p, l, ctx)?;
    f.equal_gap = Some(delta.clone());
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pos(n: u64, d: u64) -> SignedMonomial {
        SignedMonomial::positive(Monomial::ratio(n, d))
    }

    fn r(x: &MonomialSum) -> Rational {
        x.as_rational().expect("rational")
    }

    pub(crate) fn two_vertex_point(lam: Monomial) -> ParamPoint {
        let g = Digraph::numbered(2, &[(1, 1), (1, 2), (2, 1), (2, 2)]).unwrap();
        let ratios = vec![pos(1, 2), pos(1, 3), pos(1, 5), pos(1, 7)];
        let gaps = vec![vec![Some(lam.clone())], vec![Some(lam.mul(&Monomial::ratio(11, 1)))]];
        ParamPoint::new(g, ratios, gaps).unwrap()
    }

    fn cantor_point() -> ParamPoint {
        let g = Digraph::numbered(1, &[(1, 1), (1, 1)]).unwrap();
        ParamPoint::new(g, vec![pos(1, 3), pos(1, 3)], vec![vec![Some(Monomial::ratio(1, 3))]]).unwrap()
    }

    #[test]
    fn matrices() {
        let m = to_qmatrix(&build_matrix(&two_vertex_point(Monomial::one()), &q(1, 1))).unwrap();
        assert_eq!(m, QMatrix::from_rows(vec![vec![q(1, 2), q(1, 3)], vec![q(1, 5), q(1, 7)]]));
        let c = to_qmatrix(&build_matrix(&cantor_point(), &q(1, 1))).unwrap();
        assert_eq!(c, QMatrix::from_rows(vec![vec![q(2, 3)]]));
        let half = build_matrix(&cantor_point(), &q(1, 2));
        assert!(to_qmatrix(&half).is_err());
    }

    #[test]
    fn contractivity() {
        let m = QMatrix::from_rows(vec![vec![q(1, 2), q(1, 3)], vec![q(1, 5), q(1, 7)]]);
        assert_eq!(check_contractive(&m), Some(ContractiveProof::RowSum(q(5, 6))));
        assert_eq!(check_contractive(&QMatrix::from_i64(&[&[1]])), None);
        let t = QMatrix::from_rows(vec![vec![q(1, 2), q(1, 1)], vec![q(0, 1), q(1, 2)]]);
        assert_eq!(check_contractive(&t), Some(ContractiveProof::PrincipalMinors(vec![q(1, 2), q(1, 4)])));
        let big = QMatrix::from_rows(vec![vec![q(1, 2), q(1, 1)], vec![q(1, 1), q(1, 2)]]);
        assert_eq!(check_contractive(&big), None);
    }

    #[test]
    fn lengths() {
        let l = solve_lengths(&two_vertex_point(Monomial::one())).unwrap();
        assert_eq!((r(&l[0]), r(&l[1])), (q(25, 2), q(63, 4)));
        // substitution oracle
        assert_eq!(q(1, 1) + q(1, 2) * q(25, 2) + q(1, 3) * q(63, 4), q(25, 2));
        assert_eq!(r(&solve_lengths(&cantor_point()).unwrap()[0]), q(1, 1));
        let lam = Monomial::abstract_generator("lam");
        let l = solve_lengths(&two_vertex_point(lam.clone())).unwrap();
        assert_eq!(l[0], MonomialSum::scaled_monomial(q(25, 2), &lam));
    }

    #[test]
    fn two_vertex_maps() {
        let f = build_gdifs(&two_vertex_point(Monomial::one()), &NumericContext::default()).unwrap();
        let tr: Vec<Rational> = f.maps.iter().map(|m| r(&m.translation)).collect();
        assert_eq!(tr, vec![q(0, 1), q(29, 4), q(0, 1), q(27, 2)]);
        assert_eq!(r(&f.hulls[0].1), q(25, 2));
        assert_eq!(r(&f.hulls[1].1), q(63, 4));
        assert_eq!(q(29, 4) + q(1, 3) * q(63, 4), q(25, 2));
    }

    #[test]
    fn cantor_and_negative_ratio() {
        let f = build_gdifs(&cantor_point(), &NumericContext::default()).unwrap();
        assert_eq!(r(&f.maps[1].translation), q(2, 3));
        let g = Digraph::numbered(1, &[(1, 1), (1, 1)]).unwrap();
        let neg = SignedMonomial::negative(Monomial::ratio(1, 3));
        let p = ParamPoint::new(g, vec![neg, pos(1, 3)], vec![vec![Some(Monomial::ratio(1, 3))]]).unwrap();
        let f = build_gdifs(&p, &NumericContext::default()).unwrap();
        assert_eq!(r(&f.maps[0].translation), q(1, 3));
        let (lo, hi) = f.maps[0].image(&MonomialSum::zero(), &MonomialSum::from_integer(1));
        assert_eq!((r(&lo), r(&hi)), (q(0, 1), q(1, 3)));
    }

    #[test]
    fn rejected_points() {
        let g = Digraph::numbered(1, &[(1, 1), (1, 1)]).unwrap();
        let p = ParamPoint::new(g.clone(), vec![pos(3, 2), pos(1, 3)], vec![vec![Some(Monomial::one())]]).unwrap();
        assert!(matches!(build_gdifs(&p, &NumericContext::default()), Err(ConstructError::RatioOutOfRange(_))));
        let z = ParamPoint::new(g.clone(), vec![pos(1, 3), pos(1, 3)], vec![vec![None]]).unwrap();
        assert!(matches!(build_gdifs(&z, &NumericContext::default()), Err(ConstructError::AllGapsZero(_))));
        assert!(ParamPoint::new(g, vec![pos(1, 3)], vec![vec![None]]).is_err());
    }

    #[test]
    fn equal_gap_family() {
        let ctx = NumericContext::default();
        let g = Digraph::numbered(1, &[(1, 1), (1, 1)]).unwrap();
        let thirds = vec![vec![Monomial::ratio(1, 3), Monomial::ratio(1, 3)]];
        let signs = vec![vec![Sign::Positive; 2]];
        let f = build_equal_gap_family(&g, &q(1, 3), &thirds, &signs, &ctx).unwrap();
        assert_eq!(r(&f.maps[1].translation), q(2, 3));

        let g2 = Digraph::numbered(2, &[(1, 2), (1, 2), (2, 2), (2, 1)]).unwrap();
        let mags = vec![
            vec![Monomial::ratio(1, 2), Monomial::ratio(3, 10)],
            vec![Monomial::ratio(2, 5), Monomial::ratio(2, 5)],
        ];
        let s2 = vec![vec![Sign::Positive; 2]; 2];
        let f = build_equal_gap_family(&g2, &q(1, 5), &mags, &s2, &ctx).unwrap();
        for v in 0..2 {
            assert_eq!((r(&f.hulls[v].0), r(&f.hulls[v].1)), (q(0, 1), q(1, 1)));
            assert_eq!(f.gaps[v], vec![MonomialSum::from_rational(q(1, 5))]);
        }
        let bad = vec![vec![Monomial::ratio(1, 2), Monomial::ratio(1, 2)], mags[1].clone()];
        assert!(matches!(
            build_equal_gap_family(&g2, &q(1, 5), &bad, &s2, &ctx),
            Err(ConstructError::MagnitudeSumMismatch { .. })
        ));
        let g3 = Digraph::numbered(1, &[(1, 1), (1, 1), (1, 1)]).unwrap();
        let m3 = vec![vec![Monomial::ratio(1, 10); 3]];
        let s3 = vec![vec![Sign::Positive; 3]];
        assert_eq!(build_equal_gap_family(&g3, &q(1, 2), &m3, &s3, &ctx), Err(ConstructError::BadDelta));
    }
}
