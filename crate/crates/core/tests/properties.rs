use std::collections::BTreeSet;

use compose_core::apsp::floyd_warshall;
use compose_core::matrix::DistMatrix;
use compose_core::ontology::{ConceptHierarchy, HierarchyEntry, MatchDegree, SimilarityConfig};
use compose_core::oracle::brute_force_dist;
use compose_core::registry::{QosAttributes, Registry, ServiceDescription};
use compose_core::scg::{build_scg, composable, WeightConfig};
use proptest::prelude::*;

fn name(i: usize) -> String {
    format!("C{i}")
}

/// Parent choices for a forest: concept `i` hangs under some `j < i` or is a root.
fn forest() -> impl Strategy<Value = Vec<Option<usize>>> {
    (1usize..14).prop_flat_map(|n| {
        (0..n)
            .map(|i| {
                if i == 0 {
                    Just(None).boxed()
                } else {
                    prop_oneof![1 => Just(None), 3 => (0..i).prop_map(Some)].boxed()
                }
            })
            .collect::<Vec<_>>()
    })
}

fn hierarchy_of(parents: &[Option<usize>]) -> ConceptHierarchy {
    let entries: Vec<HierarchyEntry> = parents
        .iter()
        .enumerate()
        .map(|(i, p)| match p {
            Some(p) => HierarchyEntry::child(name(i), name(*p)),
            None => HierarchyEntry::root(name(i)),
        })
        .collect();
    ConceptHierarchy::from_entries(&entries).unwrap()
}

fn ancestors(parents: &[Option<usize>], mut i: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while let Some(p) = parents[i] {
        out.push(p);
        i = p;
    }
    out
}

fn adjacency() -> impl Strategy<Value = DistMatrix> {
    (1usize..=8).prop_flat_map(|n| {
        prop::collection::vec(prop::option::weighted(0.35, 0.0f64..20.0), n * n).prop_map(move |cells| {
            let rows = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                0.0
                            } else {
                                cells[i * n + j].unwrap_or(f64::INFINITY)
                            }
                        })
                        .collect()
                })
                .collect();
            DistMatrix::from_rows(rows).unwrap()
        })
    })
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn concept_set(n: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set(0..n, 1..=3).prop_map(|s| s.into_iter().map(name).collect())
}

fn service(id: usize, concepts: usize) -> impl Strategy<Value = ServiceDescription> {
    (concept_set(concepts), concept_set(concepts), 0.0f64..10.0, 0.0f64..10.0, 0.0f64..=1.0).prop_map(
        move |(inputs, outputs, cost, time, availability)| ServiceDescription {
            id: format!("S{id}"),
            name: String::new(),
            inputs,
            outputs,
            qos: QosAttributes::new(cost, time, availability),
        },
    )
}

fn world() -> impl Strategy<Value = (Vec<Option<usize>>, Vec<ServiceDescription>)> {
    forest().prop_flat_map(|parents| {
        let n = parents.len();
        let services = (0usize..8).prop_flat_map(move |k| (0..k).map(|i| service(i, n)).collect::<Vec<_>>());
        (Just(parents), services)
    })
}

#[derive(Debug, Clone)]
enum Op {
    Publish(usize),
    Remove(usize),
    Update(usize, f64),
}

fn ops() -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(
        prop_oneof![
            (0usize..6).prop_map(Op::Publish),
            (0usize..6).prop_map(Op::Remove),
            (0usize..6, 0.0f64..5.0).prop_map(|(i, c)| Op::Update(i, c)),
        ],
        0..20,
    )
}

proptest! {
    #[test]
    fn subsumption_follows_parent_chains(parents in forest()) {
        let h = hierarchy_of(&parents);
        prop_assert_eq!(h.len(), parents.len());
        prop_assert_eq!(h.link_count(), parents.iter().flatten().count());
        for i in 0..parents.len() {
            let up = ancestors(&parents, i);
            for j in 0..parents.len() {
                let (a, b) = (name(i), name(j));
                prop_assert_eq!(h.subsumes(&b, &a).unwrap(), up.contains(&j));
                let expected = if i == j {
                    MatchDegree::Exact
                } else if up.contains(&j) {
                    MatchDegree::PlugIn
                } else if ancestors(&parents, j).contains(&i) {
                    MatchDegree::Subsumes
                } else {
                    MatchDegree::Fail
                };
                prop_assert_eq!(h.match_degree(&a, &b).unwrap(), expected);
            }
        }
        let back = ConceptHierarchy::from_entries(&h.entries()).unwrap();
        prop_assert_eq!(back, h);
    }

    #[test]
    fn similarity_is_monotone(a in 0.0f64..5.0, b in 0.0f64..5.0, c in 0.0f64..5.0) {
        let mut v = [a, b, c];
        v.sort_by(f64::total_cmp);
        let s = SimilarityConfig::new(v[0], v[1], v[2]).unwrap();
        let degrees = [MatchDegree::Exact, MatchDegree::PlugIn, MatchDegree::Subsumes];
        for w in degrees.windows(2) {
            prop_assert!(s.similarity_value(w[0]).unwrap() <= s.similarity_value(w[1]).unwrap());
        }
        prop_assert!(s.similarity_value(MatchDegree::Fail).is_err());
        if v[0] < v[2] {
            prop_assert!(SimilarityConfig::new(v[2], v[1], v[0]).is_err());
        }
    }

    #[test]
    fn registry_operations_keep_invariants(ops in ops()) {
        let h = hierarchy_of(&[None, Some(0), Some(0)]);
        let make = |i: usize, cost: f64| ServiceDescription::new(
            format!("S{i}"), "", &["C1"], &["C2"], QosAttributes::new(cost, 1.0, 0.9),
        );
        let mut r = Registry::empty();
        let mut mutations = 0;
        for op in ops {
            let next = match op {
                Op::Publish(i) => r.publish(make(i, 1.0), &h),
                Op::Remove(i) => r.remove(&format!("S{i}")),
                Op::Update(i, c) => r.update(make(i, c), &h),
            };
            if let Ok(next) = next {
                mutations += 1;
                r = next;
            }
            let ids: BTreeSet<&str> = r.services().iter().map(|s| s.id.as_str()).collect();
            prop_assert_eq!(ids.len(), r.len());
            prop_assert_eq!(r.revision(), 1 + mutations);
        }
        prop_assert_eq!(Registry::from_json(&r.to_json(), &h).unwrap(), r);
    }

    #[test]
    fn floyd_matches_oracle(adj in adjacency()) {
        let t = floyd_warshall(&adj).unwrap();
        let oracle = brute_force_dist(&adj).unwrap();
        let n = adj.n();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(close(t.distance(i, j), oracle[(i, j)]), "({}, {})", i, j);
            }
        }
    }

    #[test]
    fn distances_satisfy_triangle_and_idempotence(adj in adjacency()) {
        let t = floyd_warshall(&adj).unwrap();
        let d = t.dist();
        let n = adj.n();
        for i in 0..n {
            prop_assert_eq!(d[(i, i)], 0.0);
            for j in 0..n {
                prop_assert!(d[(i, j)] <= adj[(i, j)]);
                for k in 0..n {
                    prop_assert!(d[(i, j)] <= d[(i, k)] + d[(k, j)] + 1e-9);
                }
            }
        }
        let again = floyd_warshall(d).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(close(again.distance(i, j), d[(i, j)]));
            }
        }
    }

    #[test]
    fn reconstructed_paths_are_shortest(adj in adjacency()) {
        let t = floyd_warshall(&adj).unwrap();
        let n = adj.n();
        for i in 0..n {
            for j in 0..n {
                let d = t.distance(i, j);
                match t.pred()[(i, j)] {
                    None => prop_assert!(i == j || d == f64::INFINITY),
                    Some(k) => {
                        prop_assert!(adj[(k, j)].is_finite());
                        prop_assert!(close(t.distance(i, k) + adj[(k, j)], d));
                    }
                }
                if d.is_finite() {
                    let p = t.path(i, j).unwrap();
                    prop_assert_eq!(p.vertices.first(), Some(&i));
                    prop_assert_eq!(p.vertices.last(), Some(&j));
                    let distinct: BTreeSet<_> = p.vertices.iter().collect();
                    prop_assert_eq!(distinct.len(), p.vertices.len());
                    let sum: f64 = p.edges().map(|(a, b)| adj[(a, b)]).sum();
                    prop_assert!(close(sum, d));
                    prop_assert!(close(p.cost, d));
                    let tied = t.all_paths(&adj, i, j, 64).unwrap();
                    prop_assert!(tied.iter().any(|q| q.vertices == p.vertices));
                } else {
                    prop_assert!(t.path(i, j).is_err());
                }
            }
        }
    }

    #[test]
    fn edge_weights_follow_the_weight_law((parents, services) in world()) {
        let h = hierarchy_of(&parents);
        let r = Registry::from_services(services, &h).unwrap();
        let cfg = WeightConfig::default();
        let g = build_scg(&r, &h, &cfg).unwrap();
        prop_assert_eq!(g.len(), r.len());
        for (i, src) in r.services().iter().enumerate() {
            for (j, dst) in r.services().iter().enumerate() {
                let m = if i == j { None } else { composable(&h, src, dst, cfg.input_coverage) };
                let e = g.edge(i, j);
                prop_assert_eq!(m.is_some(), e.is_some());
                if let (Some(m), Some(e)) = (m, e) {
                    let penalties: Vec<f64> = m.iter()
                        .map(|p| cfg.similarity.similarity_value(p.degree).unwrap())
                        .collect();
                    let s = penalties.iter().sum::<f64>() / penalties.len() as f64;
                    prop_assert!(close(e.s_value, s));
                    prop_assert!(close(e.weight, cfg.qos_score(&src.qos) + s));
                    prop_assert!(m.iter().all(|p| dst.inputs.contains(&p.input)));
                }
            }
        }
        let again = build_scg(&r, &h, &cfg).unwrap();
        prop_assert_eq!(g.export_dot(), again.export_dot());
        prop_assert_eq!(g.to_adjacency().to_text(), again.to_adjacency().to_text());
    }
}
