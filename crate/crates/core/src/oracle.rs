//! Exhaustive shortest-distance oracle for small graphs.
//!
//! Enumerates every simple path from every source and keeps the cheapest.
//! Shares no code with the dynamic-programming solver, so the two can be
//! checked against each other.

use thiserror::Error;

use crate::matrix::DistMatrix;

/// Largest graph the oracle accepts.
pub const ORACLE_MAX_VERTICES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle limited to {ORACLE_MAX_VERTICES} vertices, got {0}")]
    TooLarge(usize),
}

pub fn brute_force_dist(adjacency: &DistMatrix) -> Result<DistMatrix, OracleError> {
    let n = adjacency.n();
    if n > ORACLE_MAX_VERTICES {
        return Err(OracleError::TooLarge(n));
    }
    let mut best = DistMatrix::filled(n, f64::INFINITY);
    let mut visited = vec![false; n];
    for source in 0..n {
        best[(source, source)] = 0.0;
        visited[source] = true;
        walk(adjacency, source, source, 0.0, &mut visited, &mut best);
        visited[source] = false;
    }
    Ok(best)
}

fn walk(
    adjacency: &DistMatrix,
    source: usize,
    at: usize,
    cost: f64,
    visited: &mut [bool],
    best: &mut DistMatrix,
) {
    for next in 0..adjacency.n() {
        let w = adjacency[(at, next)];
        if visited[next] || w == f64::INFINITY {
            continue;
        }
        let c = cost + w;
        if c < best[(source, next)] {
            best[(source, next)] = c;
        }
        visited[next] = true;
        walk(adjacency, source, next, c, visited, best);
        visited[next] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_edges() {
        let adj = DistMatrix::parse("0 inf inf\ninf 0 inf\ninf inf 0").unwrap();
        let d = brute_force_dist(&adj).unwrap();
        assert_eq!(d, adj);
    }

    #[test]
    fn single_edge() {
        let adj = DistMatrix::parse("0 2.5\ninf 0").unwrap();
        let d = brute_force_dist(&adj).unwrap();
        assert_eq!(d[(0, 1)], 2.5);
        assert_eq!(d[(1, 0)], f64::INFINITY);
    }

    #[test]
    fn size_cap() {
        let adj = DistMatrix::filled(13, 0.0);
        assert_eq!(brute_force_dist(&adj), Err(OracleError::TooLarge(13)));
    }
}
