//! Canonical JSON for core results. Object keys come out sorted and numbers
//! are written as exact strings, so equal inputs give equal bytes.

use gdfractal_core::classify::{
    admissible_entries, Admissibility, Breach, CandidateFailure, Certificate, Check, Outcome, StandardIfs, Verdict,
};
use gdfractal_core::construct::{GdIfs, SeparationReport};
use gdfractal_core::digraph::Path;
use gdfractal_core::exactnum::{rational_string, ConeIntersection, Membership, Monomial, Rational};
use gdfractal_core::gaps::{GapCatalog, Provenance};
use serde_json::{json, Map, Value};

fn strs<T: ToString>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(x.to_string())).collect())
}

fn rats(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(rational_string(x))).collect())
}

fn path_label(f: &GdIfs, p: &Path) -> Value {
    Value::String(p.label(&f.graph))
}

fn by_vertex(f: &GdIfs, mut value: impl FnMut(usize) -> Value) -> Value {
    let mut m = Map::new();
    for v in 0..f.graph.vertex_count() {
        m.insert(f.graph.name(v).to_string(), value(v));
    }
    Value::Object(m)
}

/// Ratio magnitudes by edge, then nonzero gaps by vertex.
pub fn entries(f: &GdIfs) -> Vec<Option<Monomial>> {
    let ratios = f.maps.iter().map(|m| Some(m.ratio.magnitude.clone()));
    let gaps = (0..f.graph.vertex_count()).flat_map(|v| f.gaps[v].iter().map(|g| g.as_positive_monomial()));
    ratios.chain(gaps).collect()
}

pub fn admissibility(a: &Admissibility) -> Value {
    json!({
        "admissible": a.admissible,
        "excluded": a.excluded.iter().map(|i| format!("x{}", i + 1)).collect::<Vec<_>>(),
        "outside_p1": a.outside_p1(),
        "witness": a.witness.as_ref().map(|(p, m)| json!({"plus": rats(p), "minus": rats(m)})),
    })
}

pub fn separation(f: &GdIfs, rep: &SeparationReport) -> Value {
    json!({
        "status": rep.status.as_str(),
        "vertices": by_vertex(f, |v| {
            let s = &rep.vertices[v];
            let out = f.graph.out_edges(v);
            let edge = |k: usize| f.graph.edge_label(out[k]);
            json!({
                "gaps": s.gaps.iter().map(|g| json!({
                    "left": g.left.to_string(),
                    "right": g.right.to_string(),
                    "length": g.length.to_string(),
                })).collect::<Vec<_>>(),
                "overlaps": s.overlaps.iter().map(|&(a, b)| [edge(a), edge(b)]).collect::<Vec<_>>(),
                "order_violations": s.order_violations.iter().map(|&k| edge(k)).collect::<Vec<_>>(),
                "outside_hull": s.outside_hull.iter().map(|&k| edge(k)).collect::<Vec<_>>(),
                "undecided": s.undecided,
            })
        }),
    })
}

pub fn construction(f: &GdIfs, sep: &SeparationReport) -> Value {
    let g = &f.graph;
    json!({
        "lengths": by_vertex(f, |v| Value::String(f.length(v).to_string())),
        "hulls": by_vertex(f, |v| json!([f.hulls[v].0.to_string(), f.hulls[v].1.to_string()])),
        "anchors": by_vertex(f, |v| f.anchors.get(v).map_or(Value::Array(vec![]), |a| strs(a))),
        "maps": (0..g.edge_count()).map(|e| json!({
            "edge": g.edge_label(e),
            "from": g.name(g.edge(e).from),
            "to": g.name(g.edge(e).to),
            "ratio": f.maps[e].ratio.to_string(),
            "translation": f.maps[e].translation.to_string(),
        })).collect::<Vec<_>>(),
        "gaps": by_vertex(f, |v| strs(&f.gaps[v])),
        "lambda": by_vertex(f, |v| strs(&f.lambda(v))),
        "equal_gap": f.equal_gap.as_ref().map(rational_string),
        "separation": separation(f, sep),
        "admissibility": admissibility(&admissible_entries(&entries(f))),
        "generators_assumed_independent": f.abstract_generators(),
    })
}

pub fn check(c: &Check) -> Value {
    match c {
        Check::Membership { target, set, cone, answer } => json!({
            "kind": "membership",
            "target": target.to_string(),
            "set": strs(set),
            "cone": cone.to_string(),
            "member": answer.is_yes(),
            "witness": match answer {
                Membership::Yes { witness } => rats(witness),
                Membership::No => Value::Null,
            },
        }),
        Check::ConeIntersection { a1, a2, answer } => json!({
            "kind": "cone_intersection",
            "a1": strs(a1),
            "a2": strs(a2),
            "empty": answer.is_empty(),
            "witness": match answer {
                ConeIntersection::Empty => Value::Null,
                ConeIntersection::Witness { p, q } => json!({"p": rats(p), "q": rats(q)}),
            },
        }),
        Check::Distinct { values, distinct } => json!({
            "kind": "distinct",
            "values": strs(values),
            "distinct": distinct,
        }),
        Check::PointInGap { point, lo, hi, inside } => json!({
            "kind": "point_in_gap",
            "point": rational_string(point),
            "gap": [rational_string(lo), rational_string(hi)],
            "inside": inside,
        }),
    }
}

fn failure(f: &GdIfs, c: &CandidateFailure) -> Value {
    json!({
        "circuit": path_label(f, &c.circuit),
        "v": f.graph.name(c.v),
        "reachable": c.reachable,
        "condition_i": c.condition_i,
        "condition_ii": c.condition_ii,
        "condition_iii": c.condition_iii,
    })
}

fn breach(b: &Breach) -> Value {
    json!({
        "theta1": b.theta1.to_string(),
        "ratio_l": b.ratio_l.to_string(),
        "ratio_check": check(&b.ratio_check),
        "theta2": b.theta2.to_string(),
        "theta1_ratios": strs(&b.theta1_ratios),
        "theta2_checks": b.theta2_checks.iter().map(check).collect::<Vec<_>>(),
        "search_depth": b.search_depth,
        "consistent": b.consistent(),
    })
}

pub fn certificate(f: &GdIfs, c: &Certificate) -> Value {
    json!({
        "route": c.route.map(|r| r.as_str()),
        "circuit": c.circuit.as_ref().map(|p| path_label(f, p)),
        "v": c.v.map(|v| f.graph.name(v)),
        "connecting_path": c.connecting_path.as_ref().map(|p| path_label(f, p)),
        "conditions": c.conditions.iter().map(|r| json!({
            "name": r.name,
            "holds": r.holds,
            "detail": r.detail,
            "checks": r.checks.iter().map(check).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "failures": c.failures.iter().map(|x| failure(f, x)).collect::<Vec<_>>(),
        "breach": c.breach.as_ref().map(breach),
        "assumptions": c.assumptions,
        "notes": c.notes,
        "replayed": c.replay(),
    })
}

pub fn standard_ifs(f: &GdIfs, s: &StandardIfs) -> Value {
    Value::Array(
        s.maps
            .iter()
            .zip(&s.circuits)
            .map(|(m, c)| {
                json!({
                    "circuit": path_label(f, c),
                    "ratio": m.ratio.to_string(),
                    "translation": m.translation.to_string(),
                })
            })
            .collect(),
    )
}

pub fn verdict(f: &GdIfs, v: &Verdict) -> Value {
    json!({
        "vertex": f.graph.name(v.vertex),
        "outcome": v.outcome.as_str(),
        "standard_ifs": match &v.outcome {
            Outcome::SelfSimilar(s) => standard_ifs(f, s),
            _ => Value::Null,
        },
        "certificate": certificate(f, &v.certificate),
    })
}

pub fn catalog(f: &GdIfs, c: &GapCatalog) -> Value {
    let values: Vec<String> = c.distinct_values().iter().map(Monomial::to_string).collect();
    json!({
        "vertex": f.graph.name(c.vertex),
        "depth": c.depth,
        "floor": c.floor.as_ref().map(Monomial::to_string),
        "values": values,
        "entries": c.entries.iter().map(|e| {
            let source = match &e.provenance {
                Provenance::Path { path, vertex, gap_index } => json!({
                    "path": path_label(f, path),
                    "gap_vertex": f.graph.name(*vertex),
                    "gap_index": gap_index + 1,
                }),
                Provenance::Geometric { left, right } => json!({
                    "left": left.to_string(),
                    "right": right.to_string(),
                }),
            };
            json!({"length": e.length.to_string(), "depth": e.depth, "source": source})
        }).collect::<Vec<_>>(),
    })
}

/// `key.path = value` lines.
pub fn to_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) if !m.is_empty() => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(a) if !a.is_empty() => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
            other => out.push_str(&format!("{prefix} = {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}
