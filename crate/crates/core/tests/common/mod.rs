#![allow(dead_code)]

use std::path::PathBuf;

use compose_core::config::RunConfig;
use compose_core::matrix::DistMatrix;
use compose_core::ontology::ConceptHierarchy;
use compose_core::registry::Registry;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/rcar").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn hierarchy() -> ConceptHierarchy {
    ConceptHierarchy::from_json(&read("hierarchy.json")).unwrap()
}

pub fn registry(h: &ConceptHierarchy) -> Registry {
    Registry::from_json(&read("registry.json"), h).unwrap()
}

pub fn raw_config() -> RunConfig {
    RunConfig::from_json(&read("raw_weights.json")).unwrap()
}

pub fn matrix3() -> DistMatrix {
    DistMatrix::parse(&read("matrix3.txt")).unwrap()
}

/// `V1`-style label to zero-based index.
pub fn v(label: &str) -> usize {
    label[1..].parse::<usize>().unwrap() - 1
}
