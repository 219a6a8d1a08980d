use std::cmp::Ordering;

use crate::exactnum::{ExactError, MonomialSum, NumericContext};

use super::GdIfs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeparationStatus {
    Cssc,
    CoscOnly,
    FailsCosc,
    Indeterminate,
}

impl SeparationStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeparationStatus::Cssc => "CSSC",
            SeparationStatus::CoscOnly => "COSC-only",
            SeparationStatus::FailsCosc => "fails-COSC",
            SeparationStatus::Indeterminate => "indeterminate",
        }
    }

    pub fn satisfies_cosc(&self) -> bool {
        matches!(self, SeparationStatus::Cssc | SeparationStatus::CoscOnly)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicGap {
    pub left: MonomialSum,
    pub right: MonomialSum,
    pub length: MonomialSum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSeparation {
    pub children: Vec<(MonomialSum, MonomialSum)>,
    /// between consecutive children in out-list order
    pub gaps: Vec<BasicGap>,
    /// pairs of out-list positions (0-based) whose images share interior points
    pub overlaps: Vec<(usize, usize)>,
    /// consecutive positions whose images are not left to right
    pub order_violations: Vec<usize>,
    /// positions whose image leaves the hull
    pub outside_hull: Vec<usize>,
    /// comparisons the enclosures could not settle
    pub undecided: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport {
    pub status: SeparationStatus,
    pub vertices: Vec<VertexSeparation>,
}

impl SeparationReport {
    pub fn order_ok(&self) -> bool {
        self.vertices.iter().all(|v| v.order_violations.is_empty())
    }
}

/// Checks that each vertex's child images lie in its hull, appear left to
/// right in out-list order, and do not overlap. Comparisons are exact where
/// the coefficients decide them and by enclosures otherwise.
pub fn verify_separation(f: &GdIfs) -> Result<SeparationReport, ExactError> {
    let ctx = &f.numeric;
    let mut vertices = Vec::new();
    let mut any_zero = false;
    let mut fails = false;
    let mut unknown = false;
    for v in 0..f.graph.vertex_count() {
        let children = f.child_intervals(v);
        let (lo, hi) = &f.hulls[v];
        let mut vs = VertexSeparation {
            children: children.clone(),
            gaps: Vec::new(),
            overlaps: Vec::new(),
            order_violations: Vec::new(),
            outside_hull: Vec::new(),
            undecided: Vec::new(),
        };
        let note = |vs: &mut VertexSeparation, what: String| vs.undecided.push(what);
        for (k, (a, b)) in children.iter().enumerate() {
            let left_ok = cmp(ctx, a, lo)?;
            let right_ok = cmp(ctx, hi, b)?;
            match (left_ok, right_ok) {
                (Some(x), Some(y)) if x != Ordering::Less && y != Ordering::Less => {}
                (Some(Ordering::Less), _) | (_, Some(Ordering::Less)) => vs.outside_hull.push(k),
                _ => note(&mut vs, format!("containment of child {}", k + 1)),
            }
        }
        for i in 0..children.len() {
            for j in i + 1..children.len() {
                let (a, b) = &children[i];
                let (c, d) = &children[j];
                // interiors meet iff a < d and c < b
                match (cmp(ctx, a, d)?, cmp(ctx, c, b)?) {
                    (Some(Ordering::Less), Some(Ordering::Less)) => vs.overlaps.push((i, j)),
                    (Some(_), Some(_)) => {}
                    (Some(o), None) | (None, Some(o)) if o != Ordering::Less => {}
                    _ => note(&mut vs, format!("overlap of children {} and {}", i + 1, j + 1)),
                }
            }
        }
        for k in 0..children.len().saturating_sub(1) {
            let left = children[k].1.clone();
            let right = children[k + 1].0.clone();
            let length = &right - &left;
            match ctx.sign(&length)? {
                Some(Ordering::Greater) => {}
                Some(Ordering::Equal) => any_zero = true,
                Some(Ordering::Less) => {
                    if !vs.overlaps.contains(&(k, k + 1)) {
                        vs.order_violations.push(k);
                    }
                }
                None => note(&mut vs, format!("gap {} sign", k + 1)),
            }
            vs.gaps.push(BasicGap { left, right, length });
        }
        fails |= !vs.overlaps.is_empty() || !vs.outside_hull.is_empty();
        unknown |= !vs.undecided.is_empty() || !vs.order_violations.is_empty();
        vertices.push(vs);
    }
    let status = if fails {
        SeparationStatus::FailsCosc
    } else if unknown {
        SeparationStatus::Indeterminate
    } else if any_zero {
        SeparationStatus::CoscOnly
    } else {
        SeparationStatus::Cssc
    };
    Ok(SeparationReport { status, vertices })
}

fn cmp(ctx: &NumericContext, a: &MonomialSum, b: &MonomialSum) -> Result<Option<Ordering>, ExactError> {
    ctx.compare(a, b)
}
