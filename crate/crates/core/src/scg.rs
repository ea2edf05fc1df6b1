//! Service composition graph: one vertex per published service, an edge
//! `a -> b` whenever the outputs of `a` can feed the inputs of `b`.
//!
//! Edge weights combine the source service's QoS score with a penalty for
//! how loosely the parameters match:
//!
//! ```text
//! qos(a)   = alpha * cost + beta * time + mu * availability'
//! w(a, b)  = qos(a) + mean(penalty(degree) for each matched input of b)
//! ```
//!
//! where `availability'` is the raw availability or its complement,
//! depending on [`AvailabilityMode`].

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::DistMatrix;
use crate::ontology::{ConceptHierarchy, MatchDegree, SimilarityConfig};
use crate::registry::{QosAttributes, Registry, ServiceDescription};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScgError {
    #[error("invalid weight configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("no edge {from} -> {to} to override")]
    NotAnEdge { from: String, to: String },
    #[error("edge {from} -> {to} overridden twice")]
    DuplicateOverride { from: String, to: String },
    #[error("edge {from} -> {to}: weight must be finite")]
    NonFiniteWeight { from: String, to: String },
    #[error("inconsistent graph: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AvailabilityMode {
    /// Availability enters the score as-is.
    #[default]
    Raw,
    /// `1 - availability` enters the score, so more available services are cheaper.
    Complement,
}

/// How many inputs of the target must be matched for an edge to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputCoverage {
    #[default]
    All,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub availability_mode: AvailabilityMode,
    pub similarity: SimilarityConfig,
    pub input_coverage: InputCoverage,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            mu: 1.0,
            availability_mode: AvailabilityMode::Raw,
            similarity: SimilarityConfig::default(),
            input_coverage: InputCoverage::All,
        }
    }
}

impl WeightConfig {
    pub fn validate(&self) -> Result<(), ScgError> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("mu", self.mu)] {
            if !v.is_finite() {
                return Err(ScgError::InvalidConfig(format!("{name} must be finite")));
            }
        }
        if self.alpha == 0.0 && self.beta == 0.0 && self.mu == 0.0 {
            return Err(ScgError::InvalidConfig(
                "at least one of alpha, beta, mu must be nonzero".into(),
            ));
        }
        self.similarity
            .validate()
            .map_err(|e| ScgError::InvalidConfig(e.to_string()))
    }

    pub fn qos_score(&self, qos: &QosAttributes) -> f64 {
        let availability = match self.availability_mode {
            AvailabilityMode::Raw => qos.availability,
            AvailabilityMode::Complement => 1.0 - qos.availability,
        };
        self.alpha * qos.cost + self.beta * qos.time + self.mu * availability
    }
}

/// One matched (output, input) parameter pair on an edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterMatch {
    pub output: String,
    pub input: String,
    pub degree: MatchDegree,
}

/// Returns, for each input of `dst`, the best-matching output of `src`, or
/// `None` when coverage fails. The list follows `dst.inputs` order; with
/// [`InputCoverage::Any`] unmatched inputs are skipped.
pub fn composable(
    hierarchy: &ConceptHierarchy,
    src: &ServiceDescription,
    dst: &ServiceDescription,
    coverage: InputCoverage,
) -> Option<Vec<ParameterMatch>> {
    let mut matches = Vec::with_capacity(dst.inputs.len());
    for input in &dst.inputs {
        let best = src
            .outputs
            .iter()
            .map(|output| {
                let degree = hierarchy
                    .match_degree(output, input)
                    .unwrap_or(MatchDegree::Fail);
                (degree, output)
            })
            .filter(|(degree, _)| degree.is_match())
            .min_by_key(|(degree, _)| *degree);
        match best {
            Some((degree, output)) => matches.push(ParameterMatch {
                output: output.clone(),
                input: input.clone(),
                degree,
            }),
            None if coverage == InputCoverage::All => return None,
            None => {}
        }
    }
    (!matches.is_empty()).then_some(matches)
}

/// Returns `(weight, s_value)` for an edge leaving `src` with the given
/// parameter matches. `matches` must be non-empty and contain no failures.
pub fn edge_weight(src: &ServiceDescription, matches: &[ParameterMatch], cfg: &WeightConfig) -> (f64, f64) {
    debug_assert!(!matches.is_empty());
    let total: f64 = matches
        .iter()
        .map(|m| {
            cfg.similarity
                .similarity_value(m.degree)
                .expect("edge matches never fail")
        })
        .sum();
    let s_value = total / matches.len() as f64;
    (cfg.qos_score(&src.qos) + s_value, s_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightOrigin {
    #[default]
    Computed,
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeAnnotation {
    pub source: String,
    pub target: String,
    pub weight: f64,
    pub s_value: f64,
    pub matches: Vec<ParameterMatch>,
    #[serde(default)]
    pub origin: WeightOrigin,
}

/// Explicit weight for an existing edge, bypassing the QoS formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeWeightOverride {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionGraph {
    vertices: Vec<String>,
    edges: Vec<EdgeAnnotation>,
    built_from: u64,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<(usize, usize), usize>,
}

impl CompositionGraph {
    /// Assembles a graph from parts, checking its structural invariants.
    /// Edges are reordered by (source index, target index).
    pub fn from_parts(
        vertices: Vec<String>,
        mut edges: Vec<EdgeAnnotation>,
        built_from: u64,
    ) -> Result<Self, ScgError> {
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(ScgError::Inconsistent(format!("duplicate vertex `{v}`")));
            }
        }
        let endpoint = |id: &str| {
            vertex_index
                .get(id)
                .copied()
                .ok_or_else(|| ScgError::UnknownVertex(id.to_string()))
        };
        let mut keyed = Vec::with_capacity(edges.len());
        for e in edges.drain(..) {
            let key = (endpoint(&e.source)?, endpoint(&e.target)?);
            if key.0 == key.1 {
                return Err(ScgError::Inconsistent(format!("self-edge on `{}`", e.source)));
            }
            keyed.push((key, e));
        }
        keyed.sort_by_key(|(key, _)| *key);
        let mut edge_index = HashMap::with_capacity(keyed.len());
        let mut edges = Vec::with_capacity(keyed.len());
        for (pos, (key, e)) in keyed.into_iter().enumerate() {
            if edge_index.insert(key, pos).is_some() {
                return Err(ScgError::Inconsistent(format!(
                    "parallel edges {} -> {}",
                    e.source, e.target
                )));
            }
            edges.push(e);
        }
        Ok(Self {
            vertices,
            edges,
            built_from,
            vertex_index,
            edge_index,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeAnnotation] {
        &self.edges
    }

    pub fn built_from(&self) -> u64 {
        self.built_from
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge(&self, from: usize, to: usize) -> Option<&EdgeAnnotation> {
        self.edge_index.get(&(from, to)).map(|&pos| &self.edges[pos])
    }

    pub fn edge_between(&self, source: &str, target: &str) -> Option<&EdgeAnnotation> {
        self.edge(self.index_of(source)?, self.index_of(target)?)
    }

    /// N x N matrix: 0 on the diagonal, edge weights where present, +inf elsewhere.
    pub fn to_adjacency(&self) -> DistMatrix {
        let n = self.vertices.len();
        let mut m = DistMatrix::filled(n, f64::INFINITY);
        for i in 0..n {
            m[(i, i)] = 0.0;
        }
        for (&(i, j), &pos) in &self.edge_index {
            m[(i, j)] = self.edges[pos].weight;
        }
        m
    }

    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph scg {\n");
        for v in &self.vertices {
            writeln!(out, "  {};", dot_id(v)).unwrap();
        }
        for e in &self.edges {
            writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                dot_id(&e.source),
                dot_id(&e.target),
                e.weight
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn dot_id(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Builds the graph with every weight computed from QoS and match penalties.
pub fn build_scg(
    registry: &Registry,
    hierarchy: &ConceptHierarchy,
    cfg: &WeightConfig,
) -> Result<CompositionGraph, ScgError> {
    build_scg_with_overrides(registry, hierarchy, cfg, &[])
}

/// Like [`build_scg`], then replaces the weight of each overridden edge.
/// Overrides must name existing edges; they never create edges.
pub fn build_scg_with_overrides(
    registry: &Registry,
    hierarchy: &ConceptHierarchy,
    cfg: &WeightConfig,
    overrides: &[EdgeWeightOverride],
) -> Result<CompositionGraph, ScgError> {
    cfg.validate()?;
    let services = registry.services();
    let mut edges = Vec::new();
    for src in services {
        for dst in services {
            if src.id == dst.id {
                continue;
            }
            if let Some(matches) = composable(hierarchy, src, dst, cfg.input_coverage) {
                let (weight, s_value) = edge_weight(src, &matches, cfg);
                edges.push(EdgeAnnotation {
                    source: src.id.clone(),
                    target: dst.id.clone(),
                    weight,
                    s_value,
                    matches,
                    origin: WeightOrigin::Computed,
                });
            }
        }
    }
    let vertices = services.iter().map(|s| s.id.clone()).collect();
    let mut graph = CompositionGraph::from_parts(vertices, edges, registry.revision())?;

    for o in overrides {
        let not_an_edge = || ScgError::NotAnEdge {
            from: o.source.clone(),
            to: o.target.clone(),
        };
        let from = graph.index_of(&o.source).ok_or_else(not_an_edge)?;
        let to = graph.index_of(&o.target).ok_or_else(not_an_edge)?;
        let pos = *graph.edge_index.get(&(from, to)).ok_or_else(not_an_edge)?;
        if !o.weight.is_finite() {
            return Err(ScgError::NonFiniteWeight {
                from: o.source.clone(),
                to: o.target.clone(),
            });
        }
        let edge = &mut graph.edges[pos];
        if edge.origin == WeightOrigin::Override {
            return Err(ScgError::DuplicateOverride {
                from: o.source.clone(),
                to: o.target.clone(),
            });
        }
        edge.weight = o.weight;
        edge.origin = WeightOrigin::Override;
    }
    Ok(graph)
}
