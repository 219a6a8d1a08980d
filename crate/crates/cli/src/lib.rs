//! Command-line front end for `gdfractal-core`: problem files, reports and
//! drawings.

pub mod expr;
pub mod render;
pub mod report;
pub mod spec;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use gdfractal_core::classify::{classify_vertex, extract_standard_ifs, ClassifyError, ClassifyOptions};
use gdfractal_core::construct::{verify_separation, GdIfs};
use gdfractal_core::gaps::gap_lengths_truncated;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::spec::{parse_spec, Problem, SpecError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Construct,
    Classify,
    Gaps,
    Render,
    Extract,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Svg,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "gdfractal", version, about = "Graph-directed fractals on the line: construction, gaps and self-similarity")]
pub struct Args {
    pub command: Command,
    /// problem file (JSON, schema gdfractal/1)
    pub spec: PathBuf,
    #[arg(long)]
    pub vertex: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// working precision in bits for numeric comparisons
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long)]
    pub max_intervals: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// include wall-clock timing in the report
    #[arg(long)]
    pub timing: bool,
}

/// An error reported as JSON on stderr. `code` is the process exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub details: Value,
}

impl CliError {
    fn input(kind: &'static str, message: impl ToString) -> Self {
        CliError { code: 1, kind, message: message.to_string(), details: Value::Null }
    }

    pub fn internal(message: impl ToString) -> Self {
        CliError { code: 2, kind: "internal", message: message.to_string(), details: Value::Null }
    }

    pub fn to_json(&self) -> String {
        let v = json!({"error": {"kind": self.kind, "message": self.message, "details": self.details}});
        serde_json::to_string(&v).expect("json")
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        let details = match &e {
            SpecError::Parse { line, col, .. } => json!({"line": line, "col": col}),
            SpecError::Validation(issues) => json!(issues),
        };
        let kind = match e {
            SpecError::Parse { .. } => "parse",
            SpecError::Validation(_) => "validation",
        };
        CliError { code: 1, kind, message: e.to_string(), details }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        CliError::input("classify", e)
    }
}

/// Options taken from the command line, independent of the file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub vertex: Option<String>,
    pub depth: Option<usize>,
    pub precision: Option<u32>,
    pub max_intervals: Option<u64>,
    pub format: Option<Format>,
    pub timing: bool,
}

impl From<&Args> for RunOptions {
    fn from(a: &Args) -> Self {
        RunOptions {
            vertex: a.vertex.clone(),
            depth: a.depth,
            precision: a.precision,
            max_intervals: a.max_intervals,
            format: a.format,
            timing: a.timing,
        }
    }
}

/// Runs `command` on the problem file contents and returns the output document.
pub fn run(command: Command, bytes: &[u8], opts: &RunOptions) -> Result<String, CliError> {
    let start = Instant::now();
    let mut problem = parse_spec(bytes)?;
    if let Some(bits) = opts.precision {
        problem.numeric = problem.numeric.clone().with_precision(bits);
    }
    let format = opts.format.unwrap_or(if command == Command::Render { Format::Svg } else { Format::Json });
    if format == Format::Svg && command != Command::Render {
        return Err(CliError::input("format", "svg output is only available for render"));
    }
    let budget = opts.max_intervals.unwrap_or(problem.spec.numeric.max_intervals) as u128;
    let depth = opts.depth.unwrap_or(problem.spec.numeric.depth);

    let mut report = json!({
        "tool": {"name": "gdfractal", "version": env!("CARGO_PKG_VERSION")},
        "command": format!("{command:?}").to_lowercase(),
        "spec": {
            "sha256": format!("{:x}", Sha256::digest(bytes)),
            "echo": serde_json::to_value(&problem.spec).expect("spec serializes"),
        },
    });
    let body = match command {
        Command::Validate => validate(&problem),
        Command::Construct => {
            let f = build(&problem)?;
            let sep = verify_separation(&f).map_err(|e| CliError::input("numeric", e))?;
            json!({"construction": report::construction(&f, &sep)})
        }
        Command::Classify => {
            let f = build(&problem)?;
            let sep = verify_separation(&f).map_err(|e| CliError::input("numeric", e))?;
            let options = ClassifyOptions { breach_depth: Some(depth), budget, ..ClassifyOptions::default() };
            let targets = match &opts.vertex {
                Some(_) => vec![vertex(&problem, opts)?],
                None => problem.queries.clone(),
            };
            let mut verdicts = Vec::new();
            for u in targets {
                verdicts.push(report::verdict(&f, &classify_vertex(&f, u, &options)?));
            }
            json!({"construction": report::construction(&f, &sep), "verdicts": verdicts})
        }
        Command::Gaps => {
            let f = build(&problem)?;
            let u = vertex(&problem, opts)?;
            let c = gap_lengths_truncated(&f, u, depth, budget).map_err(|e| CliError::input("gaps", e))?;
            json!({"catalog": report::catalog(&f, &c)})
        }
        Command::Render => {
            let f = build(&problem)?;
            let u = vertex(&problem, opts)?;
            let m = opts.depth.unwrap_or(3);
            let svg = render::render_svg(&f, u, m, budget).map_err(|e| CliError::input("render", e))?;
            if format == Format::Svg {
                return Ok(svg);
            }
            json!({"svg": svg})
        }
        Command::Extract => {
            let f = build(&problem)?;
            let u = vertex(&problem, opts)?;
            let ifs = extract_standard_ifs(&f, u)?;
            json!({"vertex": f.graph.name(u), "standard_ifs": report::standard_ifs(&f, &ifs)})
        }
    };
    let obj = report.as_object_mut().expect("object");
    for (k, v) in body.as_object().expect("object") {
        obj.insert(k.clone(), v.clone());
    }
    if opts.timing {
        obj.insert("timing_ms".into(), json!(start.elapsed().as_secs_f64() * 1000.0));
    }
    Ok(match format {
        Format::Text => report::to_text(&report),
        _ => serde_json::to_string_pretty(&report).expect("json") + "\n",
    })
}

fn build(problem: &Problem) -> Result<GdIfs, CliError> {
    problem.build().map_err(|e| CliError::input("construct", e))
}

fn vertex(problem: &Problem, opts: &RunOptions) -> Result<usize, CliError> {
    match &opts.vertex {
        None => Ok(problem.queries[0]),
        Some(name) => problem
            .vertex(name)
            .ok_or_else(|| CliError::input("argument", format!("unknown vertex '{name}'"))),
    }
}

fn validate(problem: &Problem) -> Value {
    let g = &problem.graph;
    let mut violations: Vec<String> = g.validate().iter().map(|v| v.to_string()).collect();
    if let Err(e) = problem.build() {
        violations.push(e.to_string());
    }
    json!({
        "valid": violations.is_empty(),
        "violations": violations,
        "graph": {
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "strongly_connected": g.strongly_connected(),
        },
    })
}
