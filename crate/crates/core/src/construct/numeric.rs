//! Floating-point construction for parameters whose ratio magnitudes are not
//! rational. Nothing built here carries an exact certificate.

use nalgebra::{DMatrix, DVector};

use crate::digraph::Digraph;
use crate::exactnum::{MonomialSum, NumericContext};

use super::{ConstructError, GdIfs, ParamPoint};

/// Map `t ↦ ratios[e]·t + translations[e]` per edge, hulls `[lo, hi]` per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericGdIfs {
    pub graph: Digraph,
    pub ratios: Vec<f64>,
    pub translations: Vec<f64>,
    pub hulls: Vec<(f64, f64)>,
}

impl NumericGdIfs {
    pub fn apply(&self, e: usize, t: f64) -> f64 {
        self.ratios[e] * t + self.translations[e]
    }

    /// Level-`m` intervals at `u`, sorted.
    pub fn level(&self, u: usize, m: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        self.collect(u, m, (1.0, 0.0), &mut out);
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    // `outer` is the affine map (scale, shift) accumulated so far
    fn collect(&self, v: usize, m: usize, outer: (f64, f64), out: &mut Vec<(f64, f64)>) {
        if m == 0 {
            let (a, b) = self.hulls[v];
            let (x, y) = (outer.0 * a + outer.1, outer.0 * b + outer.1);
            out.push((x.min(y), x.max(y)));
            return;
        }
        for &e in self.graph.out_edges(v) {
            let (r, t) = (self.ratios[e], self.translations[e]);
            let inner = (outer.0 * r, outer.0 * t + outer.1);
            self.collect(self.graph.edge(e).to, m - 1, inner, out);
        }
    }

    /// Midpoint conversion of an exact system.
    pub fn from_exact(f: &GdIfs) -> Result<Self, ConstructError> {
        let ctx = &f.numeric;
        let val = |x: &MonomialSum| ctx.to_f64(x);
        let mut ratios = Vec::with_capacity(f.maps.len());
        let mut translations = Vec::with_capacity(f.maps.len());
        for m in &f.maps {
            let mag = val(&MonomialSum::from_monomial(&m.ratio.magnitude))?;
            ratios.push(if m.ratio.is_negative() { -mag } else { mag });
            translations.push(val(&m.translation)?);
        }
        let hulls = f
            .hulls
            .iter()
            .map(|(a, b)| Ok((val(a)?, val(b)?)))
            .collect::<Result<_, ConstructError>>()?;
        Ok(NumericGdIfs { graph: f.graph.clone(), ratios, translations, hulls })
    }
}

/// Same construction as the exact builder, in `f64`. Contractivity is checked
/// by row sums or, failing that, by the leading principal minors of `id − M`.
pub fn build_numeric(p: &ParamPoint, ctx: &NumericContext) -> Result<NumericGdIfs, ConstructError> {
    let g = &p.graph;
    let n = g.vertex_count();
    let mut mags = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let m = ctx.to_f64(&MonomialSum::from_monomial(&p.ratios[e.id].magnitude))?;
        if !(m > 0.0 && m < 1.0) {
            return Err(ConstructError::RatioOutOfRange(g.edge_label(e.id)));
        }
        mags.push(m);
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        m[(e.from, e.to)] += mags[e.id];
    }
    let row_ok = (0..n).all(|i| m.row(i).sum() < 1.0);
    let a = DMatrix::<f64>::identity(n, n) - &m;
    if !row_ok {
        let minors_ok = (1..=n).all(|k| a.view((0, 0), (k, k)).determinant() > 0.0);
        if !minors_ok {
            return Err(ConstructError::NotContractive);
        }
    }
    let mut gap = Vec::with_capacity(n);
    for v in 0..n {
        let mut row = Vec::new();
        for x in &p.gaps[v] {
            row.push(match x {
                Some(mono) => ctx.to_f64(&MonomialSum::from_monomial(mono))?,
                None => 0.0,
            });
        }
        gap.push(row);
    }
    let rhs = DVector::from_iterator(n, gap.iter().map(|r| r.iter().sum::<f64>()));
    let l = a.lu().solve(&rhs).ok_or(ConstructError::NotContractive)?;
    let base: Vec<f64> = p.base_points.iter().map(|b| ctx.to_f64(b)).collect::<Result<_, _>>()?;
    let mut ratios = vec![0.0; g.edge_count()];
    let mut translations = vec![0.0; g.edge_count()];
    for v in 0..n {
        let mut b = base[v];
        let out = g.out_edges(v);
        for (k, &e) in out.iter().enumerate() {
            let w = g.edge(e).to;
            let x = if p.ratios[e].is_negative() { -mags[e] } else { mags[e] };
            let neg = if x < 0.0 { -x * l[w] } else { 0.0 };
            ratios[e] = x;
            translations[e] = b - x * base[w] + neg;
            if k + 1 < out.len() {
                b += mags[e] * l[w] + gap[v][k];
            }
        }
    }
    let hulls = (0..n).map(|v| (base[v], base[v] + l[v])).collect();
    Ok(NumericGdIfs { graph: g.clone(), ratios, translations, hulls })
}
