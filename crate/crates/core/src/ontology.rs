//! Concept hierarchy and subsumption-based matching of I/O concepts.
//!
//! A hierarchy is a forest of named concepts, each with at most one parent.
//! Matching an output concept against an input concept yields one of four
//! degrees, tried in order: [`MatchDegree::Exact`], [`MatchDegree::PlugIn`],
//! [`MatchDegree::Subsumes`], otherwise [`MatchDegree::Fail`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OntologyError {
    #[error("malformed hierarchy document: {0}")]
    Malformed(String),
    #[error("empty concept id")]
    EmptyId,
    #[error("duplicate concept `{0}`")]
    DuplicateConcept(String),
    #[error("concept `{concept}` references unknown parent `{parent}`")]
    UnknownParent { concept: String, parent: String },
    #[error("parent cycle through concept `{0}`")]
    ParentCycle(String),
    #[error("undeclared concept `{0}`")]
    UndeclaredConcept(String),
    #[error("no similarity value for a failed match")]
    NoSimilarity,
    #[error("invalid similarity penalties: {0}")]
    InvalidPenalties(String),
}

/// One record of the hierarchy file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

impl HierarchyEntry {
    pub fn root(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            parent: None,
        }
    }

    pub fn child(id: impl Into<String>, parent: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            parent: Some(parent.into()),
        }
    }
}

/// Rooted is-a forest of concepts. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptHierarchy {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parent: Vec<Option<usize>>,
}

impl ConceptHierarchy {
    /// Builds a hierarchy from entries. Parents may be declared after their
    /// children.
    pub fn from_entries(entries: &[HierarchyEntry]) -> Result<Self, OntologyError> {
        let mut names = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for entry in entries {
            if entry.id.is_empty() {
                return Err(OntologyError::EmptyId);
            }
            if index.insert(entry.id.clone(), names.len()).is_some() {
                return Err(OntologyError::DuplicateConcept(entry.id.clone()));
            }
            names.push(entry.id.clone());
        }

        let mut parent = Vec::with_capacity(entries.len());
        for entry in entries {
            let p = match &entry.parent {
                None => None,
                Some(p) => Some(*index.get(p).ok_or_else(|| OntologyError::UnknownParent {
                    concept: entry.id.clone(),
                    parent: p.clone(),
                })?),
            };
            parent.push(p);
        }

        // Any chain longer than the concept count must revisit a concept.
        for start in 0..names.len() {
            let mut cur = parent[start];
            let mut steps = 0;
            while let Some(c) = cur {
                steps += 1;
                if c == start || steps > names.len() {
                    return Err(OntologyError::ParentCycle(names[start].clone()));
                }
                cur = parent[c];
            }
        }

        Ok(Self {
            names,
            index,
            parent,
        })
    }

    /// Parses a JSON hierarchy document: an array of `{id, parent?}` records.
    pub fn from_json(document: &str) -> Result<Self, OntologyError> {
        let entries: Vec<HierarchyEntry> =
            serde_json::from_str(document).map_err(|e| OntologyError::Malformed(e.to_string()))?;
        Self::from_entries(&entries)
    }

    pub fn entries(&self) -> Vec<HierarchyEntry> {
        self.names
            .iter()
            .zip(&self.parent)
            .map(|(id, p)| HierarchyEntry {
                id: id.clone(),
                parent: p.map(|p| self.names[p].clone()),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.index.contains_key(concept)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn parent_of(&self, concept: &str) -> Result<Option<&str>, OntologyError> {
        let i = self.lookup(concept)?;
        Ok(self.parent[i].map(|p| self.names[p].as_str()))
    }

    /// Number of parent links.
    pub fn link_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    fn lookup(&self, concept: &str) -> Result<usize, OntologyError> {
        self.index
            .get(concept)
            .copied()
            .ok_or_else(|| OntologyError::UndeclaredConcept(concept.to_string()))
    }

    fn is_strict_ancestor(&self, general: usize, specific: usize) -> bool {
        let mut cur = self.parent[specific];
        while let Some(c) = cur {
            if c == general {
                return true;
            }
            cur = self.parent[c];
        }
        false
    }

    /// True iff `specific` is a strict descendant of `general`.
    pub fn subsumes(&self, general: &str, specific: &str) -> Result<bool, OntologyError> {
        let g = self.lookup(general)?;
        let s = self.lookup(specific)?;
        Ok(self.is_strict_ancestor(g, s))
    }

    /// Degree to which a produced `output_concept` satisfies a demanded
    /// `input_concept`.
    pub fn match_degree(
        &self,
        output_concept: &str,
        input_concept: &str,
    ) -> Result<MatchDegree, OntologyError> {
        let out = self.lookup(output_concept)?;
        let inp = self.lookup(input_concept)?;
        Ok(if out == inp {
            MatchDegree::Exact
        } else if self.is_strict_ancestor(inp, out) {
            MatchDegree::PlugIn
        } else if self.is_strict_ancestor(out, inp) {
            MatchDegree::Subsumes
        } else {
            MatchDegree::Fail
        })
    }
}

/// Outcome of matching one output concept against one input concept.
/// Ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchDegree {
    Exact,
    #[serde(rename = "plugin")]
    PlugIn,
    Subsumes,
    Fail,
}

impl MatchDegree {
    pub fn is_match(self) -> bool {
        self != MatchDegree::Fail
    }
}

impl fmt::Display for MatchDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchDegree::Exact => "exact",
            MatchDegree::PlugIn => "plugin",
            MatchDegree::Subsumes => "subsumes",
            MatchDegree::Fail => "fail",
        })
    }
}

/// Penalty added to an edge weight for each match degree. Better matches
/// must not cost more than worse ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimilarityConfig {
    pub exact: f64,
    pub plugin: f64,
    pub subsumes: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            exact: 0.0,
            plugin: 0.5,
            subsumes: 1.0,
        }
    }
}

impl SimilarityConfig {
    pub fn new(exact: f64, plugin: f64, subsumes: f64) -> Result<Self, OntologyError> {
        let cfg = Self {
            exact,
            plugin,
            subsumes,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), OntologyError> {
        for (name, v) in [
            ("exact", self.exact),
            ("plugin", self.plugin),
            ("subsumes", self.subsumes),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(OntologyError::InvalidPenalties(format!(
                    "{name} penalty must be a finite non-negative number, got {v}"
                )));
            }
        }
        if !(self.exact <= self.plugin && self.plugin <= self.subsumes) {
            return Err(OntologyError::InvalidPenalties(
                "penalties must satisfy exact <= plugin <= subsumes".into(),
            ));
        }
        Ok(())
    }

    pub fn similarity_value(&self, degree: MatchDegree) -> Result<f64, OntologyError> {
        match degree {
            MatchDegree::Exact => Ok(self.exact),
            MatchDegree::PlugIn => Ok(self.plugin),
            MatchDegree::Subsumes => Ok(self.subsumes),
            MatchDegree::Fail => Err(OntologyError::NoSimilarity),
        }
    }
}
