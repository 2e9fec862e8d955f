//! Synthetic temporal graph families and the bundled running example.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{IdMap, Query, TemporalEdge, TemporalGraph, Timestamp, VertexId};
use crate::io::{parse_edge_list, LoadReport};

/// Edge-list text of the 8-vertex running example, with `#!alias` names
/// `s a b c d e f t`.
pub const RUNNING_EXAMPLE: &str = include_str!("../fixtures/RE.txt");

/// The running example graph and its alias table.
pub fn running_example() -> (TemporalGraph, LoadReport) {
    parse_edge_list(RUNNING_EXAMPLE).expect("bundled fixture parses")
}

/// Seeded generator used by every random family.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` distinct edges between `n` vertices with timestamps in `1..=t_count`,
/// uniformly at random, no self-loops.
pub fn random_graph(n: usize, m: usize, t_count: usize, seed: u64) -> Result<TemporalGraph> {
    if n < 2 || t_count == 0 {
        return Err(Error::InvalidParameter(format!("random graph needs n >= 2 and T >= 1 (got n={n}, T={t_count})")));
    }
    let capacity = (n as u128) * (n as u128 - 1) * t_count as u128;
    if m as u128 > capacity {
        return Err(Error::InvalidParameter(format!("{m} edges exceed the {capacity} possible")));
    }
    let n32 = VertexId::try_from(n).map_err(|_| Error::InvalidParameter(format!("n={n} too large")))?;
    let mut rng = rng(seed);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n32);
        let v = rng.gen_range(0..n32);
        if u == v {
            continue;
        }
        let t = rng.gen_range(1..=t_count as Timestamp);
        if seen.insert((u, v, t)) {
            edges.push(TemporalEdge::new(u, v, t));
        }
    }
    Ok(TemporalGraph::from_edges(Arc::new(IdMap::identity(n)), edges))
}

/// Layered DAG: source `0`, `layers` layers of `width` vertices, sink last.
/// The source links to layer 1 at time 1, layer `i` links completely to layer
/// `i + 1` at time `i + 1`, and the last layer links to the sink at time
/// `layers + 1`. The returned query spans `[1, layers + 1]` and has exactly
/// `width^layers` temporal simple paths.
pub fn layered_dag(width: usize, layers: usize) -> Result<(TemporalGraph, Query)> {
    if width == 0 || layers == 0 {
        return Err(Error::InvalidParameter(format!("layered DAG needs w >= 1 and L >= 1 (got w={width}, L={layers})")));
    }
    let n = width
        .checked_mul(layers)
        .and_then(|x| x.checked_add(2))
        .filter(|&n| VertexId::try_from(n).is_ok())
        .ok_or_else(|| Error::InvalidParameter("layered DAG too large".into()))?;
    let sink = (n - 1) as VertexId;
    let vertex = |layer: usize, i: usize| (1 + layer * width + i) as VertexId;
    let mut edges = Vec::new();
    for i in 0..width {
        edges.push(TemporalEdge::new(0, vertex(0, i), 1));
        edges.push(TemporalEdge::new(vertex(layers - 1, i), sink, layers as Timestamp + 1));
    }
    for layer in 0..layers - 1 {
        for i in 0..width {
            for j in 0..width {
                edges.push(TemporalEdge::new(vertex(layer, i), vertex(layer + 1, j), layer as Timestamp + 2));
            }
        }
    }
    let g = TemporalGraph::from_edges(Arc::new(IdMap::identity(n)), edges);
    let q = Query::new(0, sink, 1, layers as Timestamp + 1)?;
    Ok((g, q))
}

/// Directed ring `0 -> 1 -> ... -> n-1 -> 0` plus `chords` random extra
/// edges; every edge gets a random timestamp in `1..=t_count`.
pub fn ring_with_chords(n: usize, chords: usize, t_count: usize, seed: u64) -> Result<TemporalGraph> {
    if n < 3 || t_count == 0 {
        return Err(Error::InvalidParameter(format!("ring needs n >= 3 and T >= 1 (got n={n}, T={t_count})")));
    }
    let n32 = VertexId::try_from(n).map_err(|_| Error::InvalidParameter(format!("n={n} too large")))?;
    let mut rng = rng(seed);
    let mut edges: Vec<TemporalEdge> = (0..n32)
        .map(|u| TemporalEdge::new(u, (u + 1) % n32, rng.gen_range(1..=t_count as Timestamp)))
        .collect();
    for _ in 0..chords {
        let u = rng.gen_range(0..n32);
        let mut v = rng.gen_range(0..n32 - 1);
        if v >= u {
            v += 1;
        }
        edges.push(TemporalEdge::new(u, v, rng.gen_range(1..=t_count as Timestamp)));
    }
    Ok(TemporalGraph::from_edges(Arc::new(IdMap::identity(n)), edges))
}
