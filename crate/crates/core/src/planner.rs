//! Query-time composition planning over a precomputed model.
//!
//! A query names the concepts the requester can provide and the concepts it
//! wants back. Services consuming a provided concept act as entry points,
//! services emitting a requested concept act as goal providers. Because the
//! virtual start and goal vertices attach with zero-weight edges, the best
//! route for a goal is the cheapest `dist(entry, provider)` over all
//! entry/provider pairs, read straight from the precomputed tables.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apsp::{floyd_warshall, ApspError, ApspTables, Path};
use crate::config::RunConfig;
use crate::matrix::DistMatrix;
use crate::ontology::ConceptHierarchy;
use crate::registry::Registry;
use crate::scg::{build_scg_with_overrides, dot_id, CompositionGraph, ScgError};

/// Cap on equal-cost alternatives enumerated per entry/provider pair when
/// compacting a plan.
pub const MAX_TIED_PATHS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("no service accepts the provided inputs")]
    NoEntry,
    #[error("no service provides `{0}`")]
    UnsatisfiableGoal(String),
    #[error("goal `{0}` is unreachable from every entry service")]
    UnreachableGoal(String),
    #[error("merged plan is not acyclic: {0}")]
    PlanIntegrity(String),
    #[error("registry revision {0} is already modelled")]
    NoRevisionChange(u64),
    #[error("model parts disagree: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Graph(#[from] ScgError),
    #[error(transparent)]
    Apsp(#[from] ApspError),
}

/// Which services the virtual start vertex connects to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryMode {
    /// At least one input matched by a provided concept.
    #[default]
    Any,
    /// Every input matched by a provided concept.
    All,
}

/// How to choose among equal-cost routes for a goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathSelection {
    /// Smallest (entry, provider) index pair, then the path recorded in the
    /// predecessor table.
    #[default]
    Canonical,
    /// Among all equal-cost routes, prefer the ones adding the fewest new
    /// services to the merged plan.
    Compact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionQuery {
    pub provided_inputs: Vec<String>,
    pub requested_outputs: Vec<String>,
}

impl CompositionQuery {
    pub fn new<I, O, S, T>(inputs: I, outputs: O) -> Self
    where
        I: IntoIterator<Item = S>,
        O: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        Self {
            provided_inputs: inputs.into_iter().map(Into::into).collect(),
            requested_outputs: outputs.into_iter().map(Into::into).collect(),
        }
    }

    /// Undeclared requested concepts are reported as unsatisfiable goals,
    /// since no service can emit them.
    pub fn validate(&self, hierarchy: &ConceptHierarchy) -> Result<(), PlannerError> {
        if self.provided_inputs.is_empty() {
            return Err(PlannerError::InvalidQuery("no provided inputs".into()));
        }
        if self.requested_outputs.is_empty() {
            return Err(PlannerError::InvalidQuery("no requested outputs".into()));
        }
        let mut seen = HashSet::new();
        for c in &self.provided_inputs {
            if !hierarchy.contains(c) {
                return Err(PlannerError::InvalidQuery(format!("undeclared input concept `{c}`")));
            }
            if !seen.insert(c) {
                return Err(PlannerError::InvalidQuery(format!("input `{c}` given twice")));
            }
        }
        let mut seen = HashSet::new();
        for c in &self.requested_outputs {
            if !hierarchy.contains(c) {
                return Err(PlannerError::UnsatisfiableGoal(c.clone()));
            }
            if !seen.insert(c) {
                return Err(PlannerError::InvalidQuery(format!("output `{c}` requested twice")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResolveOptions {
    pub entry_mode: EntryMode,
    pub selection: PathSelection,
}

/// Cheapest entry/provider pair for one goal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Route {
    pub entry: usize,
    pub provider: usize,
    pub cost: f64,
}

/// Minimum of `dist(e, p)` over entries `e` and providers `p`. Ties go to
/// the pair seen first, so callers passing ascending indices get the
/// smallest (entry, provider) pair. `None` when every pair is unreachable.
pub fn best_route(tables: &ApspTables, entries: &[usize], providers: &[usize]) -> Option<Route> {
    let mut best: Option<Route> = None;
    for &entry in entries {
        for &provider in providers {
            let cost = tables.distance(entry, provider);
            if cost == f64::INFINITY {
                continue;
            }
            if best.is_none_or(|b| cost < b.cost) {
                best = Some(Route {
                    entry,
                    provider,
                    cost,
                });
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalProviders {
    pub goal: String,
    pub services: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalRoute {
    pub goal: String,
    pub entry: String,
    pub provider: String,
    pub path: Vec<String>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanEdge {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionPlan {
    pub revision: u64,
    pub entry_services: Vec<String>,
    pub goal_providers: Vec<GoalProviders>,
    pub goals: Vec<GoalRoute>,
    pub vertices: Vec<String>,
    pub edges: Vec<PlanEdge>,
}

impl CompositionPlan {
    pub fn plan_cost(&self) -> BTreeMap<String, f64> {
        self.goals.iter().map(|g| (g.goal.clone(), g.cost)).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "revision {}", self.revision).unwrap();
        writeln!(out, "entry services: {}", self.entry_services.join(", ")).unwrap();
        for g in &self.goals {
            writeln!(out, "goal {}: {} (cost {})", g.goal, g.path.join(" -> "), g.cost).unwrap();
        }
        writeln!(
            out,
            "merged plan: {} services, {} edges",
            self.vertex_count(),
            self.edge_count()
        )
        .unwrap();
        for e in &self.edges {
            writeln!(out, "  {} -> {} ({})", e.source, e.target, e.weight).unwrap();
        }
        out
    }

    /// Merged plan with the virtual start and goal vertices drawn in.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph plan {\n");
        out.push_str("  \"VSTART\" [shape=box];\n");
        for (i, g) in self.goals.iter().enumerate() {
            writeln!(
                out,
                "  \"VGOAL{}\" [shape=box, label={}];",
                i + 1,
                dot_id(&format!("VGOAL{}: {}", i + 1, g.goal))
            )
            .unwrap();
        }
        for v in &self.vertices {
            writeln!(out, "  {};", dot_id(v)).unwrap();
        }
        let starts: BTreeSet<&str> = self.goals.iter().map(|g| g.entry.as_str()).collect();
        for v in self.vertices.iter().filter(|v| starts.contains(v.as_str())) {
            writeln!(out, "  \"VSTART\" -> {} [label=\"0\"];", dot_id(v)).unwrap();
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
        for (i, g) in self.goals.iter().enumerate() {
            writeln!(out, "  {} -> \"VGOAL{}\" [label=\"0\"];", dot_id(&g.provider), i + 1).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Immutable snapshot: graph and shortest-path tables built from one
/// registry revision.
#[derive(Debug, Clone)]
pub struct PlannerModel {
    hierarchy: Arc<ConceptHierarchy>,
    registry: Arc<Registry>,
    config: RunConfig,
    graph: CompositionGraph,
    adjacency: DistMatrix,
    tables: ApspTables,
}

impl PlannerModel {
    pub fn build(
        registry: impl Into<Arc<Registry>>,
        hierarchy: impl Into<Arc<ConceptHierarchy>>,
        config: RunConfig,
    ) -> Result<Self, PlannerError> {
        let registry = registry.into();
        let hierarchy = hierarchy.into();
        let graph = build_scg_with_overrides(&registry, &hierarchy, &config.weights, &config.edge_weights)?;
        let adjacency = graph.to_adjacency();
        let tables = floyd_warshall(&adjacency)?.with_revision(registry.revision());
        Ok(Self {
            hierarchy,
            registry,
            config,
            graph,
            adjacency,
            tables,
        })
    }

    /// Reassembles a model from stored parts without recomputing the tables.
    pub fn from_parts(
        registry: impl Into<Arc<Registry>>,
        hierarchy: impl Into<Arc<ConceptHierarchy>>,
        config: RunConfig,
        graph: CompositionGraph,
        tables: ApspTables,
    ) -> Result<Self, PlannerError> {
        let registry = registry.into();
        let ids: Vec<&str> = registry.services().iter().map(|s| s.id.as_str()).collect();
        let vertices: Vec<&str> = graph.vertices().iter().map(String::as_str).collect();
        if ids != vertices {
            return Err(PlannerError::Inconsistent(
                "graph vertices differ from registry services".into(),
            ));
        }
        if tables.n() != graph.len() {
            return Err(PlannerError::Inconsistent(format!(
                "{} vertices but {}x{} tables",
                graph.len(),
                tables.n(),
                tables.n()
            )));
        }
        let rev = registry.revision();
        if graph.built_from() != rev || tables.built_from() != rev {
            return Err(PlannerError::Inconsistent(format!(
                "registry revision {rev}, graph {}, tables {}",
                graph.built_from(),
                tables.built_from()
            )));
        }
        let adjacency = graph.to_adjacency();
        Ok(Self {
            hierarchy: hierarchy.into(),
            registry,
            config,
            graph,
            adjacency,
            tables,
        })
    }

    /// Full rebuild for a newer registry revision.
    pub fn refresh(
        &self,
        registry: impl Into<Arc<Registry>>,
        hierarchy: impl Into<Arc<ConceptHierarchy>>,
        config: RunConfig,
    ) -> Result<Self, PlannerError> {
        let registry = registry.into();
        if registry.revision() == self.revision() {
            return Err(PlannerError::NoRevisionChange(registry.revision()));
        }
        Self::build(registry, hierarchy, config)
    }

    pub fn revision(&self) -> u64 {
        self.registry.revision()
    }

    pub fn hierarchy(&self) -> &ConceptHierarchy {
        &self.hierarchy
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn graph(&self) -> &CompositionGraph {
        &self.graph
    }

    pub fn tables(&self) -> &ApspTables {
        &self.tables
    }

    pub fn adjacency(&self) -> &DistMatrix {
        &self.adjacency
    }

    /// Resolve options taking the entry mode from the model's config.
    pub fn default_options(&self) -> ResolveOptions {
        ResolveOptions {
            entry_mode: self.config.entry_mode,
            selection: PathSelection::Canonical,
        }
    }

    /// Indices of services the virtual start vertex connects to, ascending.
    pub fn find_entry_services(
        &self,
        query: &CompositionQuery,
        mode: EntryMode,
    ) -> Result<Vec<usize>, PlannerError> {
        query.validate(&self.hierarchy)?;
        let h = &self.hierarchy;
        let accepts = |input: &String| {
            query
                .provided_inputs
                .iter()
                .any(|p| h.match_degree(p, input).is_ok_and(|d| d.is_match()))
        };
        let entries: Vec<usize> = self
            .registry
            .services()
            .iter()
            .enumerate()
            .filter(|(_, s)| match mode {
                EntryMode::Any => s.inputs.iter().any(accepts),
                EntryMode::All => s.inputs.iter().all(accepts),
            })
            .map(|(i, _)| i)
            .collect();
        if entries.is_empty() {
            return Err(PlannerError::NoEntry);
        }
        Ok(entries)
    }

    /// For each requested concept in query order, the ascending indices of
    /// services with an output matching it.
    pub fn find_goal_providers(
        &self,
        query: &CompositionQuery,
    ) -> Result<Vec<(String, Vec<usize>)>, PlannerError> {
        query.validate(&self.hierarchy)?;
        let h = &self.hierarchy;
        query
            .requested_outputs
            .iter()
            .map(|goal| {
                let providers: Vec<usize> = self
                    .registry
                    .services()
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| {
                        s.outputs
                            .iter()
                            .any(|o| h.match_degree(o, goal).is_ok_and(|d| d.is_match()))
                    })
                    .map(|(i, _)| i)
                    .collect();
                if providers.is_empty() {
                    Err(PlannerError::UnsatisfiableGoal(goal.clone()))
                } else {
                    Ok((goal.clone(), providers))
                }
            })
            .collect()
    }

    pub fn resolve(
        &self,
        query: &CompositionQuery,
        options: &ResolveOptions,
    ) -> Result<CompositionPlan, PlannerError> {
        let entries = self.find_entry_services(query, options.entry_mode)?;
        let providers = self.find_goal_providers(query)?;

        let mut routes = Vec::with_capacity(providers.len());
        for (goal, goal_providers) in &providers {
            let route = best_route(&self.tables, &entries, goal_providers)
                .ok_or_else(|| PlannerError::UnreachableGoal(goal.clone()))?;
            routes.push(route);
        }

        let chosen: Vec<(usize, usize, Path)> = match options.selection {
            PathSelection::Canonical => routes
                .iter()
                .map(|r| Ok((r.entry, r.provider, self.tables.path(r.entry, r.provider)?)))
                .collect::<Result<_, ApspError>>()?,
            PathSelection::Compact => self.compact_paths(&entries, &providers, &routes)?,
        };

        self.assemble(entries, &providers, chosen)
    }

    fn compact_paths(
        &self,
        entries: &[usize],
        providers: &[(String, Vec<usize>)],
        routes: &[Route],
    ) -> Result<Vec<(usize, usize, Path)>, PlannerError> {
        let mut candidates: Vec<Vec<(usize, usize, Path)>> = Vec::with_capacity(routes.len());
        for ((_, goal_providers), route) in providers.iter().zip(routes) {
            let mut alts = Vec::new();
            for &e in entries {
                for &p in goal_providers {
                    if self.tables.distance(e, p) != route.cost {
                        continue;
                    }
                    for path in self.tables.all_paths(&self.adjacency, e, p, MAX_TIED_PATHS)? {
                        alts.push((e, p, path));
                    }
                }
            }
            // the canonical route survives even if enumeration was capped
            let canonical = self.tables.path(route.entry, route.provider)?;
            if !alts.iter().any(|(_, _, p)| p.vertices == canonical.vertices) {
                alts.push((route.entry, route.provider, canonical));
            }
            alts.sort_by(|a, b| (a.0, a.1, &a.2.vertices).cmp(&(b.0, b.1, &b.2.vertices)));
            candidates.push(alts);
        }

        let mut covered: BTreeSet<usize> = BTreeSet::new();
        let mut picked: Vec<Option<usize>> = vec![None; candidates.len()];
        for (g, alts) in candidates.iter().enumerate() {
            if alts.len() == 1 {
                picked[g] = Some(0);
                covered.extend(alts[0].2.vertices.iter().copied());
            }
        }
        for (g, alts) in candidates.iter().enumerate() {
            if picked[g].is_some() {
                continue;
            }
            let best = alts
                .iter()
                .enumerate()
                .min_by_key(|(i, (_, _, path))| {
                    let fresh = path.vertices.iter().filter(|v| !covered.contains(v)).count();
                    (fresh, *i)
                })
                .map(|(i, _)| i)
                .expect("every goal has at least one route");
            covered.extend(alts[best].2.vertices.iter().copied());
            picked[g] = Some(best);
        }

        Ok(candidates
            .into_iter()
            .zip(picked)
            .map(|(mut alts, i)| alts.swap_remove(i.unwrap()))
            .collect())
    }

    fn assemble(
        &self,
        entries: Vec<usize>,
        providers: &[(String, Vec<usize>)],
        chosen: Vec<(usize, usize, Path)>,
    ) -> Result<CompositionPlan, PlannerError> {
        let ids = self.graph.vertices();
        let mut vertex_set = BTreeSet::new();
        let mut edge_set = BTreeSet::new();
        let mut goals = Vec::with_capacity(chosen.len());
        for ((goal, _), (entry, provider, path)) in providers.iter().zip(chosen) {
            vertex_set.extend(path.vertices.iter().copied());
            edge_set.extend(path.edges());
            goals.push(GoalRoute {
                goal: goal.clone(),
                entry: ids[entry].clone(),
                provider: ids[provider].clone(),
                path: path.vertices.iter().map(|&v| ids[v].clone()).collect(),
                cost: path.cost,
            });
        }

        check_acyclic(&vertex_set, &edge_set).map_err(|v| {
            PlannerError::PlanIntegrity(format!("cycle through `{}`", ids[v]))
        })?;

        let edges = edge_set
            .iter()
            .map(|&(a, b)| PlanEdge {
                source: ids[a].clone(),
                target: ids[b].clone(),
                weight: self.adjacency[(a, b)],
            })
            .collect();
        Ok(CompositionPlan {
            revision: self.revision(),
            entry_services: entries.iter().map(|&i| ids[i].clone()).collect(),
            goal_providers: providers
                .iter()
                .map(|(goal, ps)| GoalProviders {
                    goal: goal.clone(),
                    services: ps.iter().map(|&i| ids[i].clone()).collect(),
                })
                .collect(),
            goals,
            vertices: vertex_set.iter().map(|&v| ids[v].clone()).collect(),
            edges,
        })
    }
}

/// Kahn's algorithm; on failure returns some vertex left on a cycle.
fn check_acyclic(vertices: &BTreeSet<usize>, edges: &BTreeSet<(usize, usize)>) -> Result<(), usize> {
    let mut indegree: BTreeMap<usize, usize> = vertices.iter().map(|&v| (v, 0)).collect();
    for &(_, b) in edges {
        *indegree.get_mut(&b).expect("edge endpoints are plan vertices") += 1;
    }
    let mut ready: Vec<usize> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut removed = 0;
    while let Some(v) = ready.pop() {
        removed += 1;
        for &(_, b) in edges.range((v, 0)..=(v, usize::MAX)) {
            let d = indegree.get_mut(&b).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(b);
            }
        }
    }
    if removed == vertices.len() {
        Ok(())
    } else {
        Err(*indegree.iter().find(|(_, &d)| d > 0).unwrap().0)
    }
}

/// Holder for the current model. Readers take a cheap snapshot; a refresh
/// builds the replacement outside the lock and swaps it in.
#[derive(Debug)]
pub struct ModelHandle {
    current: RwLock<Arc<PlannerModel>>,
}

impl ModelHandle {
    pub fn new(model: PlannerModel) -> Self {
        Self {
            current: RwLock::new(Arc::new(model)),
        }
    }

    pub fn snapshot(&self) -> Arc<PlannerModel> {
        self.current.read().expect("model lock poisoned").clone()
    }

    pub fn refresh(
        &self,
        registry: impl Into<Arc<Registry>>,
        hierarchy: impl Into<Arc<ConceptHierarchy>>,
        config: RunConfig,
    ) -> Result<Arc<PlannerModel>, PlannerError> {
        let next = Arc::new(self.snapshot().refresh(registry, hierarchy, config)?);
        let mut slot = self.current.write().expect("model lock poisoned");
        // another writer may have won the race with a newer revision
        if slot.revision() > next.revision() {
            return Ok(slot.clone());
        }
        *slot = next.clone();
        Ok(next)
    }
}
