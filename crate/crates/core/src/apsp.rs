//! All-pairs shortest paths with path reconstruction.
//!
//! `pred[(i, j)]` holds the vertex immediately before `j` on the chosen
//! least-cost path from `i` to `j`. Paths are rebuilt by walking it
//! backwards from `j`. Relaxation is strict, with intermediate vertices
//! taken in ascending index order, so among equal-cost routes the first one
//! discovered is kept.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::{DistMatrix, PredMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApspError {
    #[error("negative cycle through vertex {vertex}")]
    NegativeCycle { vertex: usize },
    #[error("invalid adjacency matrix: {0}")]
    InvalidMatrix(String),
    #[error("no path from {from} to {to}")]
    NoPath { from: usize, to: usize },
    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("predecessor table is inconsistent between {from} and {to}")]
    BrokenPredecessors { from: usize, to: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub cost: f64,
}

impl Path {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApspTables {
    dist: DistMatrix,
    pred: PredMatrix,
    built_from: u64,
}

impl ApspTables {
    /// Reassembles tables produced earlier, checking only their shape.
    pub fn from_parts(dist: DistMatrix, pred: PredMatrix, built_from: u64) -> Result<Self, ApspError> {
        if dist.n() != pred.n() {
            return Err(ApspError::InvalidMatrix(format!(
                "dist is {0}x{0} but pred is {1}x{1}",
                dist.n(),
                pred.n()
            )));
        }
        if let Some(bad) = pred.rows().flatten().flatten().find(|&&k| k >= dist.n()) {
            return Err(ApspError::IndexOutOfRange {
                index: *bad,
                n: dist.n(),
            });
        }
        Ok(Self {
            dist,
            pred,
            built_from,
        })
    }

    pub fn n(&self) -> usize {
        self.dist.n()
    }

    pub fn dist(&self) -> &DistMatrix {
        &self.dist
    }

    pub fn pred(&self) -> &PredMatrix {
        &self.pred
    }

    pub fn built_from(&self) -> u64 {
        self.built_from
    }

    pub fn with_revision(mut self, revision: u64) -> Self {
        self.built_from = revision;
        self
    }

    pub fn distance(&self, from: usize, to: usize) -> f64 {
        self.dist[(from, to)]
    }

    fn check_index(&self, index: usize) -> Result<(), ApspError> {
        if index < self.n() {
            Ok(())
        } else {
            Err(ApspError::IndexOutOfRange { index, n: self.n() })
        }
    }

    /// Rebuilds the least-cost path from `from` to `to`.
    pub fn path(&self, from: usize, to: usize) -> Result<Path, ApspError> {
        self.check_index(from)?;
        self.check_index(to)?;
        if from == to {
            return Ok(Path {
                vertices: vec![from],
                cost: 0.0,
            });
        }
        let cost = self.dist[(from, to)];
        if cost == f64::INFINITY {
            return Err(ApspError::NoPath { from, to });
        }
        let broken = || ApspError::BrokenPredecessors { from, to };
        let mut vertices = vec![to];
        let mut cur = to;
        while cur != from {
            cur = self.pred[(from, cur)].ok_or_else(broken)?;
            vertices.push(cur);
            if vertices.len() > self.n() {
                return Err(broken());
            }
        }
        vertices.reverse();
        Ok(Path { vertices, cost })
    }

    /// Every simple least-cost path from `from` to `to`, sorted by vertex
    /// sequence, stopping after `limit` paths. `adjacency` must be the matrix
    /// these tables were computed from. Equal-cost comparison uses a relative
    /// tolerance of 1e-9.
    pub fn all_paths(
        &self,
        adjacency: &DistMatrix,
        from: usize,
        to: usize,
        limit: usize,
    ) -> Result<Vec<Path>, ApspError> {
        self.check_index(from)?;
        self.check_index(to)?;
        if adjacency.n() != self.n() {
            return Err(ApspError::InvalidMatrix("adjacency size mismatch".into()));
        }
        if from == to {
            return Ok(vec![Path {
                vertices: vec![from],
                cost: 0.0,
            }]);
        }
        let cost = self.dist[(from, to)];
        if cost == f64::INFINITY {
            return Err(ApspError::NoPath { from, to });
        }
        let mut found = Vec::new();
        let mut on_path = vec![false; self.n()];
        let mut stack = vec![to];
        on_path[to] = true;
        self.collect_paths(adjacency, from, &mut stack, &mut on_path, &mut found, limit);
        for p in &mut found {
            p.reverse();
        }
        found.sort();
        Ok(found
            .into_iter()
            .map(|vertices| Path { vertices, cost })
            .collect())
    }

    fn collect_paths(
        &self,
        adjacency: &DistMatrix,
        from: usize,
        stack: &mut Vec<usize>,
        on_path: &mut [bool],
        found: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        let v = *stack.last().unwrap();
        if v == from {
            found.push(stack.clone());
            return;
        }
        let target = self.dist[(from, v)];
        for k in 0..self.n() {
            if found.len() >= limit {
                return;
            }
            let w = adjacency[(k, v)];
            if k == v || on_path[k] || w == f64::INFINITY {
                continue;
            }
            let via = self.dist[(from, k)] + w;
            if !via.is_finite() || !approx_eq(via, target) {
                continue;
            }
            on_path[k] = true;
            stack.push(k);
            self.collect_paths(adjacency, from, stack, on_path, found, limit);
            stack.pop();
            on_path[k] = false;
        }
    }
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Runs Floyd–Warshall on an adjacency matrix with a zero diagonal and
/// `+inf` for missing edges. Negative edges are allowed; negative cycles
/// are rejected.
pub fn floyd_warshall(adjacency: &DistMatrix) -> Result<ApspTables, ApspError> {
    let n = adjacency.n();
    for i in 0..n {
        if adjacency[(i, i)] != 0.0 {
            return Err(ApspError::InvalidMatrix(format!(
                "diagonal entry {i} is {}, expected 0",
                adjacency[(i, i)]
            )));
        }
    }
    if let Some(v) = adjacency
        .rows()
        .flatten()
        .find(|v| v.is_nan() || **v == f64::NEG_INFINITY)
    {
        return Err(ApspError::InvalidMatrix(format!("entry {v} not allowed")));
    }

    let mut dist = adjacency.clone();
    let mut pred = PredMatrix::filled(n, None);
    for i in 0..n {
        for j in 0..n {
            if i != j && dist[(i, j)] != f64::INFINITY {
                pred[(i, j)] = Some(i);
            }
        }
    }

    let mut row_k = vec![0.0; n];
    let mut pred_k = vec![None; n];
    for k in 0..n {
        row_k.copy_from_slice(dist.row(k));
        pred_k.copy_from_slice(pred.row(k));
        let d = dist.as_mut_slice();
        let p = pred.as_mut_slice();
        for i in 0..n {
            let d_ik = d[i * n + k];
            if d_ik == f64::INFINITY {
                continue;
            }
            let d_row = &mut d[i * n..(i + 1) * n];
            let p_row = &mut p[i * n..(i + 1) * n];
            for j in 0..n {
                let candidate = d_ik + row_k[j];
                if candidate < d_row[j] {
                    d_row[j] = candidate;
                    p_row[j] = pred_k[j];
                }
            }
        }
    }

    if let Some(vertex) = (0..n).find(|&i| dist[(i, i)] < 0.0) {
        return Err(ApspError::NegativeCycle { vertex });
    }
    Ok(ApspTables {
        dist,
        pred,
        built_from: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn m(rows: &[&[f64]]) -> DistMatrix {
        DistMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn single_vertex() {
        let t = floyd_warshall(&m(&[&[0.0]])).unwrap();
        assert_eq!(t.dist().to_text(), "0\n");
        assert_eq!(t.pred()[(0, 0)], None);
        assert_eq!(
            t.path(0, 0).unwrap(),
            Path {
                vertices: vec![0],
                cost: 0.0
            }
        );
    }

    #[test]
    fn empty_matrix() {
        let t = floyd_warshall(&DistMatrix::parse("").unwrap()).unwrap();
        assert_eq!(t.n(), 0);
        assert!(t.path(0, 0).is_err());
    }

    #[test]
    fn negative_cycle_rejected() {
        let err = floyd_warshall(&m(&[&[0.0, -1.0], &[-1.0, 0.0]])).unwrap_err();
        assert_eq!(err, ApspError::NegativeCycle { vertex: 0 });
    }

    #[test]
    fn negative_edge_without_cycle() {
        let t = floyd_warshall(&m(&[&[0.0, 4.0, INF], &[INF, 0.0, -2.0], &[INF, INF, 0.0]])).unwrap();
        assert_eq!(t.distance(0, 2), 2.0);
        assert_eq!(t.path(0, 2).unwrap().vertices, vec![0, 1, 2]);
    }

    #[test]
    fn invalid_input_rejected() {
        assert!(matches!(
            floyd_warshall(&m(&[&[1.0]])),
            Err(ApspError::InvalidMatrix(_))
        ));
        assert!(matches!(
            floyd_warshall(&m(&[&[0.0, f64::NAN], &[INF, 0.0]])),
            Err(ApspError::InvalidMatrix(_))
        ));
    }

    #[test]
    fn pred_absent_exactly_on_diagonal_or_unreachable() {
        let t = floyd_warshall(&m(&[&[0.0, 1.0, INF], &[INF, 0.0, 1.0], &[INF, INF, 0.0]])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let absent = t.pred()[(i, j)].is_none();
                assert_eq!(absent, i == j || t.distance(i, j) == INF, "({i},{j})");
            }
        }
        assert_eq!(t.path(2, 0), Err(ApspError::NoPath { from: 2, to: 0 }));
        assert_eq!(t.path(0, 3), Err(ApspError::IndexOutOfRange { index: 3, n: 3 }));
    }

    #[test]
    fn first_discovered_tie_is_kept() {
        // 0 -> 1 -> 3 and 0 -> 2 -> 3, both cost 2
        let adj = m(&[
            &[0.0, 1.0, 1.0, INF],
            &[INF, 0.0, INF, 1.0],
            &[INF, INF, 0.0, 1.0],
            &[INF, INF, INF, 0.0],
        ]);
        let t = floyd_warshall(&adj).unwrap();
        assert_eq!(t.path(0, 3).unwrap().vertices, vec![0, 1, 3]);
        let all = t.all_paths(&adj, 0, 3, 16).unwrap();
        let seqs: Vec<_> = all.iter().map(|p| p.vertices.clone()).collect();
        assert_eq!(seqs, vec![vec![0, 1, 3], vec![0, 2, 3]]);
        assert_eq!(t.all_paths(&adj, 0, 3, 1).unwrap().len(), 1);
    }

    #[test]
    fn zero_weight_cycle_paths_stay_simple() {
        let adj = m(&[&[0.0, 0.0, INF], &[0.0, 0.0, 1.0], &[INF, INF, 0.0]]);
        let t = floyd_warshall(&adj).unwrap();
        let all = t.all_paths(&adj, 0, 2, 16).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].vertices, vec![0, 1, 2]);
    }

    #[test]
    fn from_parts_checks_shape() {
        let t = floyd_warshall(&m(&[&[0.0, 1.0], &[INF, 0.0]])).unwrap();
        let again = ApspTables::from_parts(t.dist().clone(), t.pred().clone(), 3).unwrap();
        assert_eq!(again.built_from(), 3);
        let bad_pred = PredMatrix::filled(1, None);
        assert!(ApspTables::from_parts(t.dist().clone(), bad_pred, 0).is_err());
        let out_of_range = PredMatrix::from_rows(vec![vec![None, Some(7)], vec![None, None]]).unwrap();
        assert!(ApspTables::from_parts(t.dist().clone(), out_of_range, 0).is_err());
    }
}
