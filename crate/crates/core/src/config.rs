//! Run configuration file.
//!
//! ```json
//! {
//!   "alpha": 1, "beta": 1, "mu": 1,
//!   "availability_mode": "raw",
//!   "penalties": {"exact": 0, "plugin": 0.5, "subsumes": 1},
//!   "input_coverage": "all",
//!   "entry_mode": "any",
//!   "edge_weights": [{"source": "V1", "target": "V2", "weight": 5}]
//! }
//! ```
//!
//! Every key is optional. `edge_weights` pins the weight of existing edges
//! instead of deriving it from QoS.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ontology::SimilarityConfig;
use crate::planner::EntryMode;
use crate::scg::{AvailabilityMode, EdgeWeightOverride, InputCoverage, ScgError, WeightConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("malformed config document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Invalid(#[from] ScgError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigDocument {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub availability_mode: AvailabilityMode,
    pub penalties: SimilarityConfig,
    pub input_coverage: InputCoverage,
    pub entry_mode: EntryMode,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub edge_weights: Vec<EdgeWeightOverride>,
}

impl Default for ConfigDocument {
    fn default() -> Self {
        RunConfig::default().to_document()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub weights: WeightConfig,
    pub entry_mode: EntryMode,
    pub edge_weights: Vec<EdgeWeightOverride>,
}

impl RunConfig {
    pub fn from_document(doc: ConfigDocument) -> Result<Self, ConfigError> {
        let cfg = Self {
            weights: WeightConfig {
                alpha: doc.alpha,
                beta: doc.beta,
                mu: doc.mu,
                availability_mode: doc.availability_mode,
                similarity: doc.penalties,
                input_coverage: doc.input_coverage,
            },
            entry_mode: doc.entry_mode,
            edge_weights: doc.edge_weights,
        };
        cfg.weights.validate()?;
        Ok(cfg)
    }

    pub fn from_json(document: &str) -> Result<Self, ConfigError> {
        let doc: ConfigDocument =
            serde_json::from_str(document).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn to_document(&self) -> ConfigDocument {
        ConfigDocument {
            alpha: self.weights.alpha,
            beta: self.weights.beta,
            mu: self.weights.mu,
            availability_mode: self.weights.availability_mode,
            penalties: self.weights.similarity,
            input_coverage: self.weights.input_coverage,
            entry_mode: self.entry_mode,
            edge_weights: self.edge_weights.clone(),
        }
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&self.to_document()).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
