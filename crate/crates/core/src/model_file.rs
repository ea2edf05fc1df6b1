//! Serialized planner model: everything a query needs, computed at publish
//! time. The file records the registry revision and a hash of the run
//! configuration so a stale or tampered model can be detected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apsp::ApspTables;
use crate::config::{ConfigDocument, RunConfig};
use crate::matrix::{DistMatrix, PredMatrix};
use crate::ontology::{ConceptHierarchy, HierarchyEntry};
use crate::planner::{PlannerError, PlannerModel};
use crate::registry::{Registry, ServiceDescription};
use crate::scg::{CompositionGraph, EdgeAnnotation};

pub const MODEL_FORMAT: &str = "compose-model/1";

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("malformed model file: {0}")]
    Malformed(String),
    #[error("unsupported model format `{0}`")]
    Format(String),
    #[error("config hash mismatch: file says {stored}, content hashes to {actual}")]
    ConfigHash { stored: String, actual: String },
    #[error("model revision {model} does not match registry revision {registry}")]
    Stale { model: u64, registry: u64 },
    #[error("stored tables differ from a fresh rebuild")]
    RebuildMismatch,
    #[error("{0}")]
    Part(String),
    #[error(transparent)]
    Planner(#[from] PlannerError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    format: String,
    revision: u64,
    config_hash: String,
    config: ConfigDocument,
    hierarchy: Vec<HierarchyEntry>,
    services: Vec<ServiceDescription>,
    vertices: Vec<String>,
    edges: Vec<EdgeAnnotation>,
    /// Distance rows in matrix text form, `inf` for unreachable.
    dist: Vec<String>,
    /// Predecessor rows in matrix text form, `null` for absent.
    pred: Vec<String>,
}

pub fn to_json(model: &PlannerModel) -> String {
    let lines = |text: String| text.lines().map(str::to_string).collect::<Vec<_>>();
    let doc = ModelDocument {
        format: MODEL_FORMAT.to_string(),
        revision: model.revision(),
        config_hash: model.config().hash(),
        config: model.config().to_document(),
        hierarchy: model.hierarchy().entries(),
        services: model.registry().services().to_vec(),
        vertices: model.graph().vertices().to_vec(),
        edges: model.graph().edges().to_vec(),
        dist: lines(model.tables().dist().to_text()),
        pred: lines(model.tables().pred().to_text()),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("model serializes");
    out.push('\n');
    out
}

/// Loads a model file. With `verify`, the graph and tables are rebuilt from
/// the embedded registry and compared against the stored ones.
pub fn from_json(text: &str, verify: bool) -> Result<PlannerModel, ModelFileError> {
    let doc: ModelDocument =
        serde_json::from_str(text).map_err(|e| ModelFileError::Malformed(e.to_string()))?;
    if doc.format != MODEL_FORMAT {
        return Err(ModelFileError::Format(doc.format));
    }
    let config = RunConfig::from_document(doc.config).map_err(|e| ModelFileError::Part(e.to_string()))?;
    let actual = config.hash();
    if actual != doc.config_hash {
        return Err(ModelFileError::ConfigHash {
            stored: doc.config_hash,
            actual,
        });
    }
    let hierarchy =
        ConceptHierarchy::from_entries(&doc.hierarchy).map_err(|e| ModelFileError::Part(e.to_string()))?;
    let registry = Registry::from_snapshot(doc.services, doc.revision, &hierarchy)
        .map_err(|e| ModelFileError::Part(e.to_string()))?;
    let graph = CompositionGraph::from_parts(doc.vertices, doc.edges, doc.revision)
        .map_err(|e| ModelFileError::Part(e.to_string()))?;
    let dist = DistMatrix::parse(&doc.dist.join("\n")).map_err(|e| ModelFileError::Part(format!("dist: {e}")))?;
    let pred = PredMatrix::parse(&doc.pred.join("\n")).map_err(|e| ModelFileError::Part(format!("pred: {e}")))?;
    let tables =
        ApspTables::from_parts(dist, pred, doc.revision).map_err(|e| ModelFileError::Part(e.to_string()))?;
    let model = PlannerModel::from_parts(registry, hierarchy, config, graph, tables)?;

    if verify {
        let fresh = PlannerModel::build(
            model.registry().clone(),
            model.hierarchy().clone(),
            model.config().clone(),
        )?;
        if fresh.graph() != model.graph() || fresh.tables() != model.tables() {
            return Err(ModelFileError::RebuildMismatch);
        }
    }
    Ok(model)
}

/// Fails when `model` was built from a different registry revision.
pub fn check_fresh(model: &PlannerModel, registry: &Registry) -> Result<(), ModelFileError> {
    if model.revision() != registry.revision() {
        return Err(ModelFileError::Stale {
            model: model.revision(),
            registry: registry.revision(),
        });
    }
    Ok(())
}
