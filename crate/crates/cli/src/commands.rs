use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::json;

use linkcensus::census::{
    census, classify_k33_pattern, classify_pyramid_type, conway_gordon_parity, local_search_minimize, trace_to_jsonl, verify_against_tables,
    CensusKind, CensusReport, SearchOptions, SearchResult, Verdict,
};
use linkcensus::embeddings::{fan_embedding, random_embedding, weave_embedding_n1111, with_loop};
use linkcensus::graph::{Cycle, Graph, PartiteGraph};
use linkcensus::invariants::{a2_skein, conway_a2, gauss_diagram, DEFAULT_ORACLE_CAP};
use linkcensus::{Diagram, Error};

/// Where a diagram comes from: a named construction or a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Fan,
    Weave,
    Random,
    File(String),
}

impl Source {
    pub fn parse(s: &str) -> Source {
        match s {
            "fan" => Source::Fan,
            "weave" => Source::Weave,
            "random" => Source::Random,
            other => Source::File(other.to_string()),
        }
    }
}

pub fn build(parts: &[usize], layout: &Source, seed: u64) -> anyhow::Result<Diagram> {
    Ok(match layout {
        Source::Fan => fan_embedding(parts)?,
        Source::Weave => match parts {
            [n, 1, 1, 1, 1] => weave_embedding_n1111(*n)?,
            _ => bail!(Error::UnsupportedFamily(format!("weave needs parts n,1,1,1,1, got {parts:?}"))),
        },
        Source::Random => random_embedding(PartiteGraph::new(parts)?.graph(), seed),
        Source::File(path) => load(Path::new(path))?,
    })
}

pub fn load(path: &Path) -> anyhow::Result<Diagram> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (d, warnings) = Diagram::from_json(&text).with_context(|| format!("loading {}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(d)
}

pub fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn count(d: &Diagram, kind: CensusKind) -> anyhow::Result<CensusReport> {
    Ok(linkcensus::census::with_workers(|| census(d, kind))?)
}

/// Census plus table verdicts. A count below a proven bound comes back as
/// an error from the core.
pub fn verify(parts: &[usize], d: &Diagram, kind: CensusKind) -> anyhow::Result<Vec<Verdict>> {
    let want = PartiteGraph::new(parts)?;
    let sorted = |g: &Graph| {
        let mut e = g.edges().to_vec();
        e.sort_unstable();
        e
    };
    if want.vertex_count() != d.graph().vertex_count() || sorted(want.graph()) != sorted(d.graph()) {
        bail!(Error::WrongGraph(format!("diagram is not K{parts:?}")));
    }
    let report = count(d, kind)?;
    Ok(verify_against_tables(parts, &report)?)
}

pub fn verdict_line(v: &Verdict) -> String {
    let mut line = format!("{} {} {}", v.verdict.as_str(), v.count, v.what);
    if let Some(lb) = v.lower_bound {
        line += &format!(" lower={lb}");
    }
    if v.improves {
        line += " improves";
    }
    line
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    K6Parity,
    K7Parity,
    K33Lemma,
    PyramidLemma,
    A2Oracle,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "k6-parity" => Family::K6Parity,
            "k7-parity" => Family::K7Parity,
            "k33-lemma" => Family::K33Lemma,
            "pyramid-lemma" => Family::PyramidLemma,
            "a2-oracle" => Family::A2Oracle,
            _ => return Err(format!("unknown family {s:?}")),
        })
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::K6Parity => "k6-parity",
            Family::K7Parity => "k7-parity",
            Family::K33Lemma => "k33-lemma",
            Family::PyramidLemma => "pyramid-lemma",
            Family::A2Oracle => "a2-oracle",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub family: &'static str,
    pub seed: u64,
    pub trials: u64,
    pub passed: u64,
    pub skipped: u64,
    pub failed: u64,
    pub failures: Vec<String>,
}

enum Trial {
    Pass,
    Skip,
    Fail(String),
}

fn polygon(k: usize) -> Graph {
    Graph::new(k, (0..k).map(|i| (i.min((i + 1) % k), i.max((i + 1) % k))).collect()).expect("cycle graph")
}

fn trial(family: Family, seed: u64) -> linkcensus::Result<Trial> {
    Ok(match family {
        Family::K6Parity | Family::K7Parity => {
            let n = if family == Family::K6Parity { 6 } else { 7 };
            let g = PartiteGraph::new(&vec![1; n])?.into_graph();
            let r = conway_gordon_parity(&random_embedding(&g, seed))?;
            if r.parity == 1 {
                Trial::Pass
            } else {
                Trial::Fail(format!("seed {seed}: sum {} over {} terms is even", r.sum, r.terms))
            }
        }
        Family::K33Lemma => {
            classify_k33_pattern(&random_embedding(&with_loop(&[3, 3], 4)?, seed))?;
            Trial::Pass
        }
        Family::PyramidLemma => {
            let c = classify_pyramid_type(&random_embedding(&with_loop(&[2, 2, 1], 4)?, seed))?;
            match c.pyramid_type {
                Some(p) if p.odd_triangles + p.odd_squares + p.odd_pentagons < 6 => {
                    Trial::Fail(format!("seed {seed}: type {} has fewer than 6 odd cycles", p.kind))
                }
                _ => Trial::Pass,
            }
        }
        Family::A2Oracle => {
            let k = 5 + (seed % 5) as usize;
            let d = random_embedding(&polygon(k), seed);
            let gd = gauss_diagram(&d, &Cycle::from_traversal(&(0..k).collect::<Vec<_>>())?)?;
            match a2_skein(&gd, DEFAULT_ORACLE_CAP) {
                Ok(v) if v == conway_a2(&gd) => Trial::Pass,
                Ok(v) => Trial::Fail(format!("seed {seed}: chord count {} vs skein {v}", conway_a2(&gd))),
                Err(Error::OracleCapExceeded { .. }) => Trial::Skip,
                Err(e) => return Err(e),
            }
        }
    })
}

pub fn random_audit(family: Family, trials: u64, seed: u64) -> AuditReport {
    let mut r = AuditReport { family: family.name(), seed, trials, passed: 0, skipped: 0, failed: 0, failures: Vec::new() };
    for s in seed..seed + trials {
        match trial(family, s) {
            Ok(Trial::Pass) => r.passed += 1,
            Ok(Trial::Skip) => r.skipped += 1,
            Ok(Trial::Fail(msg)) => {
                r.failed += 1;
                r.failures.push(msg);
            }
            Err(e) => {
                r.failed += 1;
                r.failures.push(format!("seed {s}: {e}"));
            }
        }
    }
    r.failures.truncate(20);
    r
}

pub fn search(d: &Diagram, opts: &SearchOptions) -> anyhow::Result<SearchResult> {
    Ok(linkcensus::census::with_workers(|| local_search_minimize(d, opts))?)
}

pub fn search_summary(r: &SearchResult, opts: &SearchOptions) -> serde_json::Value {
    json!({
        "options": opts,
        "initial_score": r.initial_score,
        "best_score": r.best_score,
        "steps": r.trace.len(),
    })
}

pub fn trace_text(r: &SearchResult) -> String {
    trace_to_jsonl(&r.trace)
}

/// Pretty JSON with a trailing newline; serde_json maps keep keys sorted.
pub fn canonical<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}

/// Short machine-readable name for an error, used in diagnostics.
pub fn error_kind(e: &anyhow::Error) -> &'static str {
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidSpec(_)) => "invalid_spec",
        Some(Error::InvalidArgument(_)) => "invalid_argument",
        Some(Error::Degenerate(_)) => "degenerate",
        Some(Error::UnknownCrossing(_)) => "unknown_crossing",
        Some(Error::NotDisjoint) => "not_disjoint",
        Some(Error::DisconnectedIntersection(_)) => "disconnected_intersection",
        Some(Error::UnsupportedFamily(_)) => "unsupported_family",
        Some(Error::WrongGraph(_)) => "wrong_graph",
        Some(Error::OracleCapExceeded { .. }) => "oracle_cap_exceeded",
        Some(Error::Classification(_)) => "classification",
        Some(Error::BoundViolated { .. }) => "bound_violated",
        Some(Error::Internal(_)) => "internal",
        Some(Error::Cancelled) => "cancelled",
        Some(Error::Format(_)) | Some(Error::Json(_)) => "format",
        None if e.downcast_ref::<std::io::Error>().is_some() => "io",
        None => "error",
    }
}

pub fn diagnostic(e: &anyhow::Error) -> String {
    let mut v = json!({ "error": error_kind(e), "message": format!("{e:#}") });
    if let Some(Error::Degenerate(violations)) = e.downcast_ref::<Error>() {
        v["violations"] = serde_json::to_value(violations).expect("serializable");
    }
    serde_json::to_string(&v).expect("serializable")
}
