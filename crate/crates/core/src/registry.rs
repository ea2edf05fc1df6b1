//! Published service descriptions.
//!
//! A [`Registry`] is an immutable snapshot. Mutations return a new snapshot
//! with a bumped revision; any composition model built from an older
//! revision is stale and must be rebuilt.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::ConceptHierarchy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegistryError {
    #[error("malformed registry document: {0}")]
    Malformed(String),
    #[error("service with empty id")]
    EmptyId,
    #[error("duplicate service id `{0}`")]
    DuplicateId(String),
    #[error("unknown service id `{0}`")]
    UnknownId(String),
    #[error("service `{service}`: unknown concept `{concept}`")]
    UnknownConcept { service: String, concept: String },
    #[error("service `{service}`: {side} list is empty")]
    EmptyParameters { service: String, side: &'static str },
    #[error("service `{service}`: concept `{concept}` repeated in {side}")]
    RepeatedConcept {
        service: String,
        side: &'static str,
        concept: String,
    },
    #[error("service `{service}`: qos {field} = {value} out of bounds")]
    QosBound {
        service: String,
        field: &'static str,
        value: f64,
    },
}

/// Non-functional attributes of a service.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QosAttributes {
    pub cost: f64,
    pub time: f64,
    pub availability: f64,
}

impl QosAttributes {
    pub fn new(cost: f64, time: f64, availability: f64) -> Self {
        Self {
            cost,
            time,
            availability,
        }
    }

    /// Returns the name and value of the first attribute out of bounds.
    pub fn violation(&self) -> Option<(&'static str, f64)> {
        if !(self.cost.is_finite() && self.cost >= 0.0) {
            return Some(("cost", self.cost));
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Some(("time", self.time));
        }
        if !(0.0..=1.0).contains(&self.availability) {
            return Some(("availability", self.availability));
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceDescription {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub qos: QosAttributes,
}

impl ServiceDescription {
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        inputs: &[&str],
        outputs: &[&str],
        qos: QosAttributes,
    ) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            qos,
        }
    }

    /// Checks this description on its own (id uniqueness is the registry's job).
    pub fn validate(&self, hierarchy: &ConceptHierarchy) -> Result<(), RegistryError> {
        if self.id.is_empty() {
            return Err(RegistryError::EmptyId);
        }
        for (side, list) in [("inputs", &self.inputs), ("outputs", &self.outputs)] {
            if list.is_empty() {
                return Err(RegistryError::EmptyParameters {
                    service: self.id.clone(),
                    side,
                });
            }
            let mut seen = HashSet::new();
            for concept in list {
                if !hierarchy.contains(concept) {
                    return Err(RegistryError::UnknownConcept {
                        service: self.id.clone(),
                        concept: concept.clone(),
                    });
                }
                if !seen.insert(concept.as_str()) {
                    return Err(RegistryError::RepeatedConcept {
                        service: self.id.clone(),
                        side,
                        concept: concept.clone(),
                    });
                }
            }
        }
        if let Some((field, value)) = self.qos.violation() {
            return Err(RegistryError::QosBound {
                service: self.id.clone(),
                field,
                value,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RegistryDocument {
    Bare(Vec<ServiceDescription>),
    Versioned {
        revision: u64,
        services: Vec<ServiceDescription>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    services: Vec<ServiceDescription>,
    revision: u64,
}

impl Registry {
    pub fn empty() -> Self {
        Self {
            services: Vec::new(),
            revision: 1,
        }
    }

    /// Validates every service against `hierarchy`. The result has revision 1.
    pub fn from_services(
        services: Vec<ServiceDescription>,
        hierarchy: &ConceptHierarchy,
    ) -> Result<Self, RegistryError> {
        Self::from_snapshot(services, 1, hierarchy)
    }

    /// Restores a snapshot taken at `revision` (at least 1).
    pub fn from_snapshot(
        services: Vec<ServiceDescription>,
        revision: u64,
        hierarchy: &ConceptHierarchy,
    ) -> Result<Self, RegistryError> {
        if revision == 0 {
            return Err(RegistryError::Malformed("revision must be >= 1".into()));
        }
        if let Some(err) = diagnose(&services, hierarchy).into_iter().next() {
            return Err(err);
        }
        Ok(Self { services, revision })
    }

    /// Parses a JSON registry document. Accepts either a bare array of
    /// service records or `{"revision": n, "services": [...]}`.
    pub fn from_json(document: &str, hierarchy: &ConceptHierarchy) -> Result<Self, RegistryError> {
        let (services, revision) = parse_document(document)?;
        Self::from_snapshot(services, revision, hierarchy)
    }

    pub fn to_json(&self) -> String {
        let doc = RegistryDocument::Versioned {
            revision: self.revision,
            services: self.services.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("registry serializes")
    }

    pub fn services(&self) -> &[ServiceDescription] {
        &self.services
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn len(&self) -> usize {
        self.services.len()
    }

    pub fn is_empty(&self) -> bool {
        self.services.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ServiceDescription> {
        self.services.iter().find(|s| s.id == id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.services.iter().position(|s| s.id == id)
    }

    pub fn publish(
        &self,
        service: ServiceDescription,
        hierarchy: &ConceptHierarchy,
    ) -> Result<Self, RegistryError> {
        if self.get(&service.id).is_some() {
            return Err(RegistryError::DuplicateId(service.id));
        }
        service.validate(hierarchy)?;
        let mut services = self.services.clone();
        services.push(service);
        Ok(Self {
            services,
            revision: self.revision + 1,
        })
    }

    pub fn remove(&self, id: &str) -> Result<Self, RegistryError> {
        let pos = self
            .position(id)
            .ok_or_else(|| RegistryError::UnknownId(id.to_string()))?;
        let mut services = self.services.clone();
        services.remove(pos);
        Ok(Self {
            services,
            revision: self.revision + 1,
        })
    }

    /// Replaces the service with the same id, keeping its position.
    pub fn update(
        &self,
        service: ServiceDescription,
        hierarchy: &ConceptHierarchy,
    ) -> Result<Self, RegistryError> {
        let pos = self
            .position(&service.id)
            .ok_or_else(|| RegistryError::UnknownId(service.id.clone()))?;
        service.validate(hierarchy)?;
        let mut services = self.services.clone();
        services[pos] = service;
        Ok(Self {
            services,
            revision: self.revision + 1,
        })
    }
}

fn parse_document(document: &str) -> Result<(Vec<ServiceDescription>, u64), RegistryError> {
    let doc: RegistryDocument =
        serde_json::from_str(document).map_err(|e| RegistryError::Malformed(e.to_string()))?;
    Ok(match doc {
        RegistryDocument::Bare(services) => (services, 1),
        RegistryDocument::Versioned { revision, services } => (services, revision),
    })
}

/// Collects every problem in a list of services instead of stopping at the
/// first one.
pub fn diagnose(services: &[ServiceDescription], hierarchy: &ConceptHierarchy) -> Vec<RegistryError> {
    let mut findings = Vec::new();
    let mut ids = HashSet::new();
    for s in services {
        if !s.id.is_empty() && !ids.insert(s.id.as_str()) {
            findings.push(RegistryError::DuplicateId(s.id.clone()));
        }
        if let Err(e) = s.validate(hierarchy) {
            findings.push(e);
        }
    }
    findings
}

/// Parses a registry document and reports all findings. A malformed
/// document yields a single finding.
pub fn diagnose_document(document: &str, hierarchy: &ConceptHierarchy) -> Vec<RegistryError> {
    match parse_document(document) {
        Ok((services, _)) => diagnose(&services, hierarchy),
        Err(e) => vec![e],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::HierarchyEntry;

    fn hierarchy() -> ConceptHierarchy {
        ConceptHierarchy::from_entries(&[
            HierarchyEntry::root("Thing"),
            HierarchyEntry::child("Login", "Thing"),
            HierarchyEntry::child("Session", "Thing"),
            HierarchyEntry::child("Form", "Thing"),
        ])
        .unwrap()
    }

    fn svc(id: &str) -> ServiceDescription {
        ServiceDescription::new(
            id,
            id,
            &["Login"],
            &["Session"],
            QosAttributes::new(1.0, 2.0, 0.9),
        )
    }

    #[test]
    fn rejects_duplicate_id() {
        let err = Registry::from_services(vec![svc("V1"), svc("V1")], &hierarchy()).unwrap_err();
        assert_eq!(err, RegistryError::DuplicateId("V1".into()));
    }

    #[test]
    fn rejects_availability_out_of_bounds() {
        let mut s = svc("V1");
        s.qos.availability = 1.5;
        let err = Registry::from_services(vec![s], &hierarchy()).unwrap_err();
        assert_eq!(
            err,
            RegistryError::QosBound {
                service: "V1".into(),
                field: "availability",
                value: 1.5
            }
        );
        let mut s = svc("V2");
        s.qos.cost = -1.0;
        assert!(Registry::from_services(vec![s], &hierarchy()).is_err());
    }

    #[test]
    fn rejects_empty_or_repeated_parameters() {
        let mut s = svc("V1");
        s.inputs.clear();
        assert!(matches!(
            s.validate(&hierarchy()),
            Err(RegistryError::EmptyParameters { side: "inputs", .. })
        ));
        let mut s = svc("V1");
        s.outputs = vec!["Session".into(), "Session".into()];
        assert!(matches!(
            s.validate(&hierarchy()),
            Err(RegistryError::RepeatedConcept { side: "outputs", .. })
        ));
    }

    #[test]
    fn mutations_bump_revision() {
        let h = hierarchy();
        let r = Registry::from_services(vec![svc("V1"), svc("V2")], &h).unwrap();
        assert_eq!(r.revision(), 1);

        let r2 = r.publish(svc("V3"), &h).unwrap();
        assert_eq!((r2.len(), r2.revision()), (3, 2));
        assert_eq!(r.len(), 2, "original snapshot untouched");

        assert_eq!(
            r2.publish(svc("V1"), &h).unwrap_err(),
            RegistryError::DuplicateId("V1".into())
        );
        let mut bad = svc("V9");
        bad.inputs = vec!["Nope".into()];
        assert!(matches!(
            r2.publish(bad, &h),
            Err(RegistryError::UnknownConcept { .. })
        ));

        let r3 = r2.remove("V2").unwrap();
        assert_eq!((r3.len(), r3.revision()), (2, 3));
        assert_eq!(r3.remove("V99").unwrap_err(), RegistryError::UnknownId("V99".into()));

        let mut changed = svc("V1");
        changed.qos.cost = 7.0;
        let r4 = r3.update(changed, &h).unwrap();
        assert_eq!((r4.len(), r4.revision()), (2, 4));
        assert_eq!(r4.get("V1").unwrap().qos.cost, 7.0);
        assert_eq!(r4.services()[0].id, "V1");
    }

    #[test]
    fn bare_and_versioned_documents() {
        let h = hierarchy();
        let bare = r#"[{"id":"V1","name":"a","inputs":["Login"],"outputs":["Session"],
                       "qos":{"cost":1,"time":2,"availability":0.5}}]"#;
        let r = Registry::from_json(bare, &h).unwrap();
        assert_eq!((r.len(), r.revision()), (1, 1));
        let again = Registry::from_json(&r.publish(svc("V2"), &h).unwrap().to_json(), &h).unwrap();
        assert_eq!(again.revision(), 2);
        assert!(matches!(
            Registry::from_json("[{}]", &h),
            Err(RegistryError::Malformed(_))
        ));
    }

    #[test]
    fn diagnose_reports_everything() {
        let h = hierarchy();
        let mut bad = svc("V2");
        bad.qos.availability = 2.0;
        let findings = diagnose(&[svc("V1"), svc("V1"), bad], &h);
        assert_eq!(findings.len(), 2);
    }
}
