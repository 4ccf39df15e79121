//! Graph job files.

use std::collections::BTreeMap;
use std::path::Path;

use feynsec::graphpoly::{Edge, FeynmanGraph, Kinematics};
use feynsec::rational::{parse_rational, Q};
use serde::{Deserialize, Deserializer};

use crate::CliError;

/// Rational literal `"p/q"` or `"n"`.
#[derive(Debug, Clone)]
struct Rational(Q);

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(Rational).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeSpec {
    from: i64,
    to: i64,
    mass2: Rational,
    power: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExternalSpec {
    vertex: i64,
    label: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    edges: Vec<EdgeSpec>,
    external: Vec<ExternalSpec>,
    invariants: BTreeMap<String, Rational>,
    dim_anchor: i64,
    order: i32,
}

#[derive(Debug)]
pub struct Job {
    pub graph: FeynmanGraph,
    pub kinematics: Kinematics,
    pub dim_anchor: i64,
    pub order: i32,
}

pub fn load(path: &Path) -> Result<Job, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
    parse(&text).map_err(|e| match e {
        CliError::Parse { line, column, msg, .. } => CliError::Parse {
            file: path.display().to_string(),
            line,
            column,
            msg,
        },
        other => other,
    })
}

pub fn parse(text: &str) -> Result<Job, CliError> {
    let f: GraphFile = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let tail = format!(" at line {} column {}", e.line(), e.column());
        CliError::Parse {
            file: "<input>".into(),
            line: e.line(),
            column: e.column(),
            msg: full.strip_suffix(&tail).unwrap_or(&full).to_string(),
        }
    })?;
    let edges = f
        .edges
        .into_iter()
        .map(|e| Edge::new(e.from, e.to, e.mass2.0, e.power))
        .collect();
    let externals = f.external.into_iter().map(|e| (e.vertex, e.label)).collect();
    let graph = FeynmanGraph::new(edges, externals)?;
    let supplied: Vec<(Vec<String>, Q)> = f
        .invariants
        .into_iter()
        .map(|(k, v)| (k.split(',').map(|s| s.trim().to_string()).collect(), v.0))
        .collect();
    let kinematics = Kinematics::new(&graph.labels(), &supplied)?;
    Ok(Job {
        graph,
        kinematics,
        dim_anchor: f.dim_anchor,
        order: f.order,
    })
}
