//! Seeded random graphs and a timing comparison between Floyd–Warshall and
//! running Dijkstra once per source.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::apsp::{floyd_warshall, ApspError};
use crate::matrix::DistMatrix;

const SAMPLE_WINDOW: Duration = Duration::from_millis(100);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("graph sizes must be positive")]
    ZeroSize,
    #[error("no sizes given")]
    NoSizes,
    #[error("density must lie in [0, 1], got {0}")]
    BadDensity(f64),
    #[error("repeated Dijkstra needs non-negative weights")]
    NegativeWeight,
    #[error(transparent)]
    Apsp(#[from] ApspError),
}

/// Random directed graph on `n` vertices: each ordered pair gets an edge with
/// probability `density`, weighted uniformly in `0..=max_weight`.
pub fn random_adjacency(n: usize, density: f64, max_weight: u32, seed: u64) -> DistMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DistMatrix::filled(n, f64::INFINITY);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                m[(i, j)] = 0.0;
            } else if rng.gen_bool(density) {
                m[(i, j)] = f64::from(rng.gen_range(0..=max_weight));
            }
        }
    }
    m
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed for a min-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// All-pairs distances by one binary-heap Dijkstra per source vertex.
pub fn repeated_dijkstra(adjacency: &DistMatrix) -> Result<DistMatrix, BenchError> {
    let n = adjacency.n();
    if adjacency.rows().flatten().any(|&w| w < 0.0) {
        return Err(BenchError::NegativeWeight);
    }
    let neighbours: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && adjacency[(i, j)] != f64::INFINITY)
                .map(|j| (j, adjacency[(i, j)]))
                .collect()
        })
        .collect();

    let mut out = DistMatrix::filled(n, f64::INFINITY);
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for s in 0..n {
        dist.fill(f64::INFINITY);
        dist[s] = 0.0;
        heap.push(Entry(0.0, s));
        while let Some(Entry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &neighbours[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Entry(nd, v));
                }
            }
        }
        for (t, &d) in dist.iter().enumerate() {
            out[(s, t)] = d;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub edges: usize,
    pub floyd: Duration,
    pub dijkstra: Duration,
    /// Floyd time relative to the previous row, if any.
    pub floyd_growth: Option<f64>,
    pub agree: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub seed: u64,
    pub density: f64,
    pub max_weight: u32,
    /// Each timing is the minimum over this many runs.
    pub repeats: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            density: 0.3,
            max_weight: 10,
            repeats: 3,
        }
    }
}

/// Shortest time per call over `repeats` samples. Each sample repeats `f`
/// until at least `SAMPLE_WINDOW` has passed and averages over the calls.
fn min_time<T>(repeats: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let mut calls = 0u32;
        while calls == 0 || start.elapsed() < SAMPLE_WINDOW {
            last = Some(f());
            calls += 1;
        }
        best = best.min(start.elapsed() / calls);
    }
    (best, last.unwrap())
}

/// Times both solvers on one seeded graph per size. Sizes run in the given
/// order; growth factors compare consecutive rows.
pub fn run_bench(sizes: &[usize], opts: BenchOptions) -> Result<Vec<BenchRow>, BenchError> {
    if sizes.is_empty() {
        return Err(BenchError::NoSizes);
    }
    if sizes.contains(&0) {
        return Err(BenchError::ZeroSize);
    }
    if !(0.0..=1.0).contains(&opts.density) {
        return Err(BenchError::BadDensity(opts.density));
    }
    let mut rows: Vec<BenchRow> = Vec::with_capacity(sizes.len());
    for (idx, &n) in sizes.iter().enumerate() {
        let adj = random_adjacency(n, opts.density, opts.max_weight, opts.seed.wrapping_add(idx as u64));
        let edges = adj.rows().flatten().filter(|w| w.is_finite()).count() - n;
        let (floyd, tables) = min_time(opts.repeats, || floyd_warshall(&adj));
        let tables = tables?;
        let (dijkstra, baseline) = min_time(opts.repeats, || repeated_dijkstra(&adj));
        let baseline = baseline?;
        let floyd_growth = rows
            .last()
            .map(|prev| floyd.as_secs_f64() / prev.floyd.as_secs_f64().max(1e-12));
        rows.push(BenchRow {
            n,
            edges,
            floyd,
            dijkstra,
            floyd_growth,
            agree: *tables.dist() == baseline,
        });
    }
    Ok(rows)
}
