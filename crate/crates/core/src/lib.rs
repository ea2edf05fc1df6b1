//! Service composition planning.
//!
//! Published services become vertices of a weighted composition graph;
//! all-pairs shortest paths over that graph are computed once per registry
//! revision, and each composition query is then answered by table lookups
//! plus path reconstruction.
//!
//! Pipeline: [`ontology`] and [`registry`] load inputs, [`scg`] builds the
//! graph, [`apsp`] precomputes distances and predecessors, [`planner`]
//! answers queries, [`model_file`] persists the result.

pub mod apsp;
pub mod bench;
pub mod config;
pub mod matrix;
pub mod model_file;
pub mod ontology;
pub mod oracle;
pub mod planner;
pub mod registry;
pub mod scg;

pub use apsp::{floyd_warshall, ApspError, ApspTables, Path};
pub use config::{ConfigError, RunConfig};
pub use matrix::{DistMatrix, PredMatrix};
pub use ontology::{ConceptHierarchy, HierarchyEntry, MatchDegree, OntologyError, SimilarityConfig};
pub use planner::{
    CompositionPlan, CompositionQuery, EntryMode, ModelHandle, PathSelection, PlannerError,
    PlannerModel, ResolveOptions,
};
pub use registry::{QosAttributes, Registry, RegistryError, ServiceDescription};
pub use scg::{build_scg, CompositionGraph, ScgError, WeightConfig};
