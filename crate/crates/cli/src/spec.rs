//! The `gdfractal/1` problem format.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use gdfractal_core::construct::{build_equal_gap_family, build_gdifs, ConstructError, GdIfs, ParamPoint};
use gdfractal_core::digraph::Digraph;
use gdfractal_core::exactnum::primes::is_prime;
use gdfractal_core::exactnum::{
    parse_decimal, Monomial, MonomialSum, NumericContext, Rational, Sign, SignedMonomial,
};
use gdfractal_core::gaps::DEFAULT_MAX_INTERVALS;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse_expr, Expr, Symbols};

pub const SCHEMA: &str = "gdfractal/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    #[serde(default)]
    pub generators: Vec<GeneratorDecl>,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gaps: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub base_points: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub query: Vec<String>,
    #[serde(default)]
    pub numeric: NumericSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Prime,
    Abstract,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDecl {
    pub name: String,
    pub kind: GeneratorKind,
    /// the prime, for `kind = prime`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    /// decimal approximation of an abstract generator, used for ordering and drawing
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    /// signed ratio; in the equal-gap family only the sign is read
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub delta: String,
    pub magnitudes: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSpec {
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_max_intervals")]
    pub max_intervals: u64,
}

fn default_precision() -> u32 {
    128
}

fn default_depth() -> usize {
    6
}

fn default_max_intervals() -> u64 {
    DEFAULT_MAX_INTERVALS as u64
}

impl Default for NumericSpec {
    fn default() -> Self {
        NumericSpec { precision: default_precision(), depth: default_depth(), max_intervals: default_max_intervals() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("{}", .0.iter().map(|i| format!("{}: {}", i.path, i.message)).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Issue>),
}

/// How the system is parametrized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parameters {
    Point(ParamPoint),
    EqualGap { delta: Rational, magnitudes: Vec<Vec<Monomial>>, signs: Vec<Vec<Sign>> },
}

/// A validated problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub graph: Digraph,
    pub parameters: Parameters,
    pub numeric: NumericContext,
    pub queries: Vec<usize>,
}

impl Problem {
    pub fn build(&self) -> Result<GdIfs, ConstructError> {
        match &self.parameters {
            Parameters::Point(p) => build_gdifs(p, &self.numeric),
            Parameters::EqualGap { delta, magnitudes, signs } => {
                build_equal_gap_family(&self.graph, delta, magnitudes, signs, &self.numeric)
            }
        }
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.graph.index_of(name)
    }
}

pub fn parse_spec(text: &[u8]) -> Result<Problem, SpecError> {
    let spec: ProblemSpec = serde_json::from_slice(text).map_err(|e| SpecError::Parse {
        line: e.line(),
        col: e.column(),
        message: e.to_string(),
    })?;
    spec.compile()
}

impl ProblemSpec {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn compile(&self) -> Result<Problem, SpecError> {
        let mut issues = Vec::new();
        let mut push = |path: String, message: String| issues.push(Issue { path, message });

        if self.schema != SCHEMA {
            push("schema".into(), format!("expected \"{SCHEMA}\", found \"{}\"", self.schema));
        }

        let mut symbols = Symbols::new();
        let mut ctx = NumericContext::default().with_precision(self.numeric.precision);
        for (i, g) in self.generators.iter().enumerate() {
            let path = format!("generators[{i}]");
            let ident = g.name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && g.name.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !ident {
                push(format!("{path}.name"), format!("'{}' is not an identifier", g.name));
                continue;
            }
            if symbols.contains_key(&g.name) {
                push(format!("{path}.name"), format!("duplicate generator '{}'", g.name));
                continue;
            }
            let mono = match g.kind {
                GeneratorKind::Prime => match g.value {
                    Some(p) if is_prime(p) => Monomial::ratio(p, 1),
                    Some(p) => {
                        push(format!("{path}.value"), format!("{p} is not prime"));
                        continue;
                    }
                    None => {
                        push(format!("{path}.value"), "prime generator needs a value".into());
                        continue;
                    }
                },
                GeneratorKind::Abstract => {
                    if let Some(a) = &g.approx {
                        match parse_decimal(a) {
                            Some(x) if x > Rational::from_integer(0.into()) => ctx.set_approx(&g.name, x),
                            _ => push(format!("{path}.approx"), format!("'{a}' is not a positive decimal")),
                        }
                    }
                    Monomial::abstract_generator(&g.name)
                }
            };
            symbols.insert(g.name.clone(), mono);
        }

        let mut index = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                push(format!("vertices[{i}]"), format!("duplicate vertex '{v}'"));
            }
        }
        if self.vertices.is_empty() {
            push("vertices".into(), "no vertices".into());
        }
        let mut pairs = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let from = index.get(e.from.as_str()).copied();
            let to = index.get(e.to.as_str()).copied();
            if from.is_none() {
                push(format!("edges[{i}].from"), format!("unknown vertex '{}'", e.from));
            }
            if to.is_none() {
                push(format!("edges[{i}].to"), format!("unknown vertex '{}'", e.to));
            }
            if let (Some(a), Some(b)) = (from, to) {
                pairs.push((a, b));
            }
        }
        if !issues.is_empty() {
            return Err(SpecError::Validation(issues));
        }
        let graph = Digraph::new(self.vertices.clone(), &pairs).expect("names and edges checked");
        for v in graph.validate() {
            let i = index[v.vertex.as_str()];
            issues.push(Issue {
                path: format!("vertices[{i}]"),
                message: format!("out-degree {} but every vertex needs d_u >= 2", v.degree),
            });
        }

        let expr = |path: String, text: &str, issues: &mut Vec<Issue>| -> Option<Expr> {
            parse_expr(text, &symbols)
                .map_err(|e| issues.push(Issue { path, message: format!("{e} in '{text}'") }))
                .ok()
        };
        let one = MonomialSum::from_integer(1);
        let check_ratio = |path: &str, s: &SignedMonomial, issues: &mut Vec<Issue>| {
            match ctx.compare(&MonomialSum::from_monomial(&s.magnitude), &one) {
                Ok(Some(Ordering::Less)) => {}
                Ok(Some(_)) => issues.push(Issue { path: path.into(), message: format!("|{s}| >= 1") }),
                Ok(None) => issues.push(Issue { path: path.into(), message: format!("cannot decide |{s}| < 1") }),
                Err(e) => issues.push(Issue { path: path.into(), message: e.to_string() }),
            }
        };

        let mut ratios = Vec::new();
        let mut signs_by_edge = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let path = format!("edges[{i}].ratio");
            match (&e.ratio, &self.family) {
                (None, None) => issues.push(Issue { path, message: "missing ratio".into() }),
                (None, Some(_)) => signs_by_edge.push(Sign::Positive),
                (Some(text), family) => match expr(path.clone(), text, &mut issues) {
                    Some(x) if x.value.is_none() => issues.push(Issue { path, message: "ratio is zero".into() }),
                    Some(x) => {
                        let s = x.signed().unwrap();
                        if family.is_none() {
                            check_ratio(&path, &s, &mut issues);
                        }
                        signs_by_edge.push(s.sign);
                        ratios.push(s);
                    }
                    None => {}
                },
            }
        }

        let parameters = match &self.family {
            None => {
                let mut gaps = Vec::new();
                for v in 0..graph.vertex_count() {
                    let name = graph.name(v);
                    let need = graph.out_degree(v).saturating_sub(1);
                    let row = self.gaps.get(name).cloned().unwrap_or_default();
                    if row.len() != need {
                        issues.push(Issue {
                            path: format!("gaps.{name}"),
                            message: format!("expected {need} gap expressions, found {}", row.len()),
                        });
                        continue;
                    }
                    let mut parsed = Vec::new();
                    for (k, text) in row.iter().enumerate() {
                        let path = format!("gaps.{name}[{k}]");
                        if let Some(x) = expr(path.clone(), text, &mut issues) {
                            if x.sign == Sign::Negative && x.value.is_some() {
                                issues.push(Issue { path, message: "gap is negative".into() });
                            }
                            parsed.push(x.value);
                        }
                    }
                    gaps.push(parsed);
                }
                for name in self.gaps.keys() {
                    if !index.contains_key(name.as_str()) {
                        issues.push(Issue { path: format!("gaps.{name}"), message: "unknown vertex".into() });
                    }
                }
                let mut base = vec![MonomialSum::zero(); graph.vertex_count()];
                for (name, text) in &self.base_points {
                    let path = format!("base_points.{name}");
                    match index.get(name.as_str()) {
                        None => issues.push(Issue { path, message: "unknown vertex".into() }),
                        Some(&v) => {
                            if let Some(x) = expr(path, text, &mut issues) {
                                base[v] = x.signed().map_or_else(MonomialSum::zero, |s| MonomialSum::from_signed(&s));
                            }
                        }
                    }
                }
                if !issues.is_empty() {
                    return Err(SpecError::Validation(issues));
                }
                let point = ParamPoint::new(graph.clone(), ratios, gaps)
                    .and_then(|p| p.with_base_points(base))
                    .map_err(|e| SpecError::Validation(vec![Issue { path: "gaps".into(), message: e.to_string() }]))?;
                Parameters::Point(point)
            }
            Some(fam) => {
                if !self.gaps.is_empty() {
                    issues.push(Issue { path: "gaps".into(), message: "the equal-gap family fixes every gap to delta".into() });
                }
                if !self.base_points.is_empty() {
                    issues.push(Issue { path: "base_points".into(), message: "the equal-gap family places every hull at [0, 1]".into() });
                }
                let delta = expr("family.delta".into(), &fam.delta, &mut issues).and_then(|x| {
                    let r = x.signed().and_then(|s| s.to_rational());
                    if r.is_none() {
                        issues.push(Issue { path: "family.delta".into(), message: "delta must be a positive rational".into() });
                    }
                    r
                });
                let mut magnitudes = Vec::new();
                let mut signs = Vec::new();
                for v in 0..graph.vertex_count() {
                    let name = graph.name(v);
                    let out = graph.out_edges(v);
                    let row = fam.magnitudes.get(name).cloned().unwrap_or_default();
                    if row.len() != out.len() {
                        issues.push(Issue {
                            path: format!("family.magnitudes.{name}"),
                            message: format!("expected {} magnitudes, found {}", out.len(), row.len()),
                        });
                        continue;
                    }
                    let mut mags = Vec::new();
                    for (k, text) in row.iter().enumerate() {
                        let path = format!("family.magnitudes.{name}[{k}]");
                        if let Some(x) = expr(path.clone(), text, &mut issues) {
                            match x.signed() {
                                Some(s) if s.sign == Sign::Positive => {
                                    check_ratio(&path, &s, &mut issues);
                                    mags.push(s.magnitude);
                                }
                                _ => issues.push(Issue { path, message: "magnitude must be positive".into() }),
                            }
                        }
                    }
                    magnitudes.push(mags);
                    signs.push(out.iter().map(|&e| signs_by_edge.get(e).copied().unwrap_or(Sign::Positive)).collect());
                }
                if !issues.is_empty() {
                    return Err(SpecError::Validation(issues));
                }
                Parameters::EqualGap { delta: delta.expect("checked"), magnitudes, signs }
            }
        };

        let mut queries = Vec::new();
        for (i, q) in self.query.iter().enumerate() {
            match index.get(q.as_str()) {
                Some(&v) => queries.push(v),
                None => issues.push(Issue { path: format!("query[{i}]"), message: format!("unknown vertex '{q}'") }),
            }
        }
        if self.query.is_empty() {
            queries = (0..graph.vertex_count()).collect();
        }
        if !issues.is_empty() {
            return Err(SpecError::Validation(issues));
        }
        Ok(Problem { spec: self.clone(), graph, parameters, numeric: ctx, queries })
    }
}
