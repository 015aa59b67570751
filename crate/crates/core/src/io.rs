//! JSON documents: the network input schema, validation diagnostics, and
//! the reports emitted by the command-line tool.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coder::{CodingState, RateReport};
use crate::netgraph::{CutReport, NetError, Network};
use crate::reduction::{ReductionSequence, StageTrace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    pub s1: String,
    pub s2: String,
    #[serde(rename = "T1")]
    pub t1: Vec<String>,
    #[serde(rename = "T2")]
    pub t2: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub prune: bool,
}

impl NetworkDoc {
    /// Document for an existing network, edges in topological order.
    pub fn from_network(net: &Network) -> Self {
        Self {
            vertices: net.vertex_names().to_vec(),
            edges: net
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    id: e.name.clone(),
                    tail: net.vertex_name(e.tail).to_string(),
                    head: net.vertex_name(e.head).to_string(),
                })
                .collect(),
            s1: net.vertex_name(net.s1()).to_string(),
            s2: net.vertex_name(net.s2()).to_string(),
            t1: net.edge_names(net.t1()),
            t2: net.edge_names(net.t2()),
            prune: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// JSON pointer into the input document.
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let path = if self.path.is_empty() { "/" } else { &self.path };
        write!(f, "{sev}: {path}: {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone)]
pub struct ParsedNetwork {
    pub network: Network,
    pub warnings: Vec<Diagnostic>,
}

/// Parses and validates a network document. Unreachable destinations are
/// warnings, or errors when `strict`.
pub fn parse_network(text: &str, strict: bool) -> Result<ParsedNetwork, ParseError> {
    let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| ParseError {
        diagnostics: vec![Diagnostic::error("", e.to_string())],
    })?;
    network_from_doc(&doc, strict)
}

pub fn network_from_doc(doc: &NetworkDoc, strict: bool) -> Result<ParsedNetwork, ParseError> {
    let mut errs = Vec::new();
    let mut seen = HashSet::new();
    for (i, v) in doc.vertices.iter().enumerate() {
        if !seen.insert(v.as_str()) {
            errs.push(Diagnostic::error(
                format!("/vertices/{i}"),
                format!("duplicate vertex {v:?}"),
            ));
        }
    }
    let vertices: HashSet<&str> = doc.vertices.iter().map(String::as_str).collect();
    let mut ids = HashSet::new();
    for (i, e) in doc.edges.iter().enumerate() {
        if !ids.insert(e.id.as_str()) {
            errs.push(Diagnostic::error(
                format!("/edges/{i}/id"),
                format!("duplicate edge id {:?}", e.id),
            ));
        }
        for (field, v) in [("tail", &e.tail), ("head", &e.head)] {
            if !vertices.contains(v.as_str()) {
                errs.push(Diagnostic::error(
                    format!("/edges/{i}/{field}"),
                    format!("unknown vertex {v:?}"),
                ));
            }
        }
    }
    for (field, v) in [("s1", &doc.s1), ("s2", &doc.s2)] {
        if !vertices.contains(v.as_str()) {
            errs.push(Diagnostic::error(format!("/{field}"), format!("unknown vertex {v:?}")));
        }
    }
    for (field, set) in [("T1", &doc.t1), ("T2", &doc.t2)] {
        if set.is_empty() {
            errs.push(Diagnostic::error(format!("/{field}"), "destination set is empty"));
        }
        for (k, id) in set.iter().enumerate() {
            if !ids.contains(id.as_str()) {
                errs.push(Diagnostic::error(
                    format!("/{field}/{k}"),
                    format!("unknown edge {id:?}"),
                ));
            } else if set[..k].contains(id) {
                errs.push(Diagnostic::error(
                    format!("/{field}/{k}"),
                    format!("edge {id:?} listed twice"),
                ));
            }
        }
    }
    if !errs.is_empty() {
        return Err(ParseError { diagnostics: errs });
    }

    let edges: Vec<(&str, &str, &str)> = doc
        .edges
        .iter()
        .map(|e| (e.id.as_str(), e.tail.as_str(), e.head.as_str()))
        .collect();
    let vs: Vec<&str> = doc.vertices.iter().map(String::as_str).collect();
    let t1: Vec<&str> = doc.t1.iter().map(String::as_str).collect();
    let t2: Vec<&str> = doc.t2.iter().map(String::as_str).collect();
    let mut net = Network::from_names(&vs, &edges, &doc.s1, &doc.s2, &t1, &t2).map_err(|e| {
        let path = match &e {
            NetError::Cycle { edge, .. } => doc
                .edges
                .iter()
                .position(|x| &x.id == edge)
                .map(|i| format!("/edges/{i}"))
                .unwrap_or_default(),
            _ => String::new(),
        };
        ParseError {
            diagnostics: vec![Diagnostic::error(path, e.to_string())],
        }
    })?;
    if doc.prune {
        net = net.prune_noncontributing();
    }

    let mut warnings = Vec::new();
    let severity = if strict { Severity::Error } else { Severity::Warning };
    for (field, s, t) in [("T1", net.s1(), net.t1()), ("T2", net.s2(), net.t2())] {
        if !net.source_reaches(s, t) {
            warnings.push(Diagnostic {
                severity,
                path: format!("/{field}"),
                message: format!("source {} reaches no edge of {field}", net.vertex_name(s)),
            });
        }
    }
    if strict && !warnings.is_empty() {
        return Err(ParseError { diagnostics: warnings });
    }
    Ok(ParsedNetwork { network: net, warnings })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinCuts {
    pub c11: usize,
    pub c21: usize,
    pub c22: usize,
}

impl From<&CutReport> for MinCuts {
    fn from(c: &CutReport) -> Self {
        Self {
            c11: c.c11,
            c21: c.c21,
            c22: c.c22,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeTrace {
    pub stages: Vec<StageTrace>,
    /// Grank per stage, stage 0 first.
    pub stage_granks: Vec<usize>,
}

/// Result of coding one network. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeReport {
    pub r1_max: usize,
    pub r2_max: usize,
    pub grank: usize,
    pub sum_cap_alt: usize,
    pub gns: Option<usize>,
    pub mincuts: MinCuts,
    /// `(stage, vertex, edge)` of every alignment step.
    pub aligned_at: Vec<(usize, String, String)>,
    pub seed: u64,
    pub field_p: u64,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<CodeTrace>,
}

impl CodeReport {
    pub fn new(
        seq: &ReductionSequence,
        st: &CodingState,
        rates: &RateReport,
        seed: u64,
        version: &str,
        trace: bool,
    ) -> Self {
        let net = seq.network();
        let cuts = net.cut_report();
        Self {
            r1_max: rates.r1_max,
            r2_max: rates.r2_max,
            grank: rates.grank,
            sum_cap_alt: rates.sum_cap_alt,
            gns: cuts.gns,
            mincuts: MinCuts::from(&cuts),
            aligned_at: st
                .alignments()
                .map(|a| {
                    (
                        a.stage,
                        net.vertex_name(a.vertex).to_string(),
                        net.edge_name(a.edge).to_string(),
                    )
                })
                .collect(),
            seed,
            field_p: st.field().modulus(),
            version: version.to_string(),
            trace: trace.then(|| CodeTrace {
                stages: seq.trace(),
                stage_granks: st.stage_granks().to_vec(),
            }),
        }
    }
}

/// Aggregate of a randomized sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub trials: usize,
    pub pass: usize,
    pub fail: usize,
    pub fail_seeds: Vec<u64>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG5: &str = r#"{
        "vertices": ["s1", "s2", "b", "a", "c", "v5", "t1", "t2"],
        "edges": [
            {"id": "e1", "tail": "s1", "head": "a"},
            {"id": "e2", "tail": "s2", "head": "b"},
            {"id": "e3", "tail": "b", "head": "a"},
            {"id": "e4", "tail": "b", "head": "v5"},
            {"id": "e5", "tail": "a", "head": "c"},
            {"id": "e6", "tail": "c", "head": "v5"},
            {"id": "e7", "tail": "c", "head": "t2"},
            {"id": "e8", "tail": "v5", "head": "t1"}
        ],
        "s1": "s1", "s2": "s2", "T1": ["e8"], "T2": ["e7"]
    }"#;

    #[test]
    fn fig5_document() {
        let p = parse_network(FIG5, true).unwrap();
        assert_eq!(p.network.edge_count(), 8);
        assert_eq!(p.network.vertex_count(), 8);
        assert!(p.warnings.is_empty());
        assert_eq!(p.network, Network::fig5());
    }

    #[test]
    fn round_trip_through_doc() {
        let net = Network::fig5();
        let doc = NetworkDoc::from_network(&net);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(!text.contains("prune"));
        assert_eq!(parse_network(&text, false).unwrap().network, net);
    }

    #[test]
    fn cycle_names_back_edge() {
        let text = r#"{"vertices":["s1","s2","a","b"],
            "edges":[{"id":"x","tail":"s1","head":"a"},{"id":"y","tail":"a","head":"b"},{"id":"z","tail":"b","head":"a"}],
            "s1":"s1","s2":"s2","T1":["y"],"T2":["y"]}"#;
        let err = parse_network(text, false).unwrap_err();
        assert_eq!(err.diagnostics.len(), 1);
        assert!(err.diagnostics[0].path.starts_with("/edges/"));
        assert!(err.diagnostics[0].message.contains("cycle"));
    }

    #[test]
    fn unknown_vertex_and_empty_destination() {
        let text = r#"{"vertices":["s1","s2"],
            "edges":[{"id":"x","tail":"s1","head":"q"}],
            "s1":"s1","s2":"s2","T1":[],"T2":["x"]}"#;
        let err = parse_network(text, false).unwrap_err();
        let paths: Vec<&str> = err.diagnostics.iter().map(|d| d.path.as_str()).collect();
        assert_eq!(paths, vec!["/edges/0/head", "/T1"]);
    }

    #[test]
    fn parallel_edges_are_distinct() {
        let text = r#"{"vertices":["s1","s2","a"],
            "edges":[{"id":"p","tail":"s1","head":"a"},{"id":"q","tail":"s1","head":"a"}],
            "s1":"s1","s2":"s1","T1":["p","q"],"T2":["q"]}"#;
        let net = parse_network(text, true).unwrap().network;
        assert_eq!(net.edge_count(), 2);
        assert_eq!(net.min_cut(net.s1(), net.t1()), 2);
    }

    #[test]
    fn unreachable_destination_warns_or_fails() {
        let text = r#"{"vertices":["s1","s2","a"],
            "edges":[{"id":"x","tail":"s1","head":"a"},{"id":"y","tail":"a","head":"s2"}],
            "s1":"s1","s2":"s2","T1":["y"],"T2":["x"]}"#;
        let ok = parse_network(text, false).unwrap();
        assert_eq!(ok.warnings.len(), 1);
        assert_eq!(ok.warnings[0].path, "/T2");
        let err = parse_network(text, true).unwrap_err();
        assert_eq!(err.diagnostics[0].severity, Severity::Error);
    }

    #[test]
    fn prune_flag_drops_dead_ends() {
        let text = r#"{"vertices":["s1","s2","a","b"],
            "edges":[{"id":"x","tail":"s1","head":"a"},{"id":"d","tail":"a","head":"b"},{"id":"y","tail":"s2","head":"a"}],
            "s1":"s1","s2":"s2","T1":["x"],"T2":["y"],"prune":true}"#;
        let net = parse_network(text, false).unwrap().network;
        assert_eq!(net.edge_count(), 2);
        assert!(net.edge_id("d").is_none());
    }

    #[test]
    fn malformed_json_reports_root() {
        let err = parse_network("{", false).unwrap_err();
        assert_eq!(err.diagnostics[0].path, "");
        assert!(err.to_string().starts_with("error: /:"));
    }
}
