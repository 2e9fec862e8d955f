//! Immutable temporal graph storage.
//!
//! Edges are kept in one list sorted by `(timestamp, source, target)` and are
//! indexed by two CSR-style adjacency arrays. Each adjacency run is sorted by
//! `(timestamp, neighbor)`, which every traversal in this crate relies on.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::QueryError;

/// Dense internal vertex index, `0..n`.
pub type VertexId = u32;
/// Edge timestamp. Unitless tick; UNIX seconds in real data.
pub type Timestamp = i64;
/// Position of an edge in [`TemporalGraph::edges`].
pub type EdgeId = u32;

/// Smallest timestamp a graph or query may carry; `MIN_TIMESTAMP - 1` must
/// still be representable.
pub const MIN_TIMESTAMP: Timestamp = Timestamp::MIN + 2;
/// Largest timestamp a graph or query may carry.
pub const MAX_TIMESTAMP: Timestamp = Timestamp::MAX - 2;

pub fn timestamp_in_range(t: Timestamp) -> bool {
    (MIN_TIMESTAMP..=MAX_TIMESTAMP).contains(&t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TemporalEdge {
    pub source: VertexId,
    pub target: VertexId,
    pub time: Timestamp,
}

impl TemporalEdge {
    pub fn new(source: VertexId, target: VertexId, time: Timestamp) -> Self {
        TemporalEdge { source, target, time }
    }

    /// Ordering key used for the global edge list.
    #[inline]
    pub fn order_key(&self) -> (Timestamp, VertexId, VertexId) {
        (self.time, self.source, self.target)
    }

    pub fn triple(&self) -> (VertexId, VertexId, Timestamp) {
        (self.source, self.target, self.time)
    }
}

/// One entry of an adjacency run: the other endpoint, the edge time and the
/// edge's position in the owning graph's edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adjacent {
    pub vertex: VertexId,
    pub time: Timestamp,
    pub edge: EdgeId,
}

/// Bidirectional mapping between external (file) ids and dense indices.
///
/// Dense indices follow ascending external id, so sorting by internal index
/// and sorting by external id agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    external: Vec<u64>,
}

impl IdMap {
    /// Builds a map over the given ids; duplicates are collapsed.
    pub fn new(mut ids: Vec<u64>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        IdMap { external: ids }
    }

    /// Identity map over `0..n`.
    pub fn identity(n: usize) -> Self {
        IdMap { external: (0..n as u64).collect() }
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }

    pub fn internal(&self, external: u64) -> Option<VertexId> {
        self.external.binary_search(&external).ok().map(|i| i as VertexId)
    }

    pub fn external(&self, internal: VertexId) -> u64 {
        self.external[internal as usize]
    }
}

#[derive(Debug, Clone)]
pub struct TemporalGraph {
    ids: Arc<IdMap>,
    edges: Vec<TemporalEdge>,
    out_start: Vec<usize>,
    out_adj: Vec<Adjacent>,
    in_start: Vec<usize>,
    in_adj: Vec<Adjacent>,
}

impl TemporalGraph {
    /// Builds a graph over the vertex space of `ids`.
    ///
    /// Duplicate triples are merged. Panics on a self-loop or an endpoint
    /// outside the id space; loaders filter those before calling this.
    pub fn from_edges(ids: Arc<IdMap>, mut edges: Vec<TemporalEdge>) -> Self {
        let n = ids.len();
        for e in &edges {
            assert!(e.source != e.target, "self-loop on vertex {}", e.source);
            assert!((e.source as usize) < n && (e.target as usize) < n, "edge endpoint outside vertex space");
        }
        edges.sort_unstable_by_key(TemporalEdge::order_key);
        edges.dedup();
        Self::from_sorted_unique(ids, edges)
    }

    /// Builds a graph from an edge list already sorted by
    /// [`TemporalEdge::order_key`] and free of duplicates and self-loops.
    pub(crate) fn from_sorted_unique(ids: Arc<IdMap>, edges: Vec<TemporalEdge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0].order_key() < w[1].order_key()));
        let n = ids.len();
        let mut out_start = vec![0usize; n + 1];
        let mut in_start = vec![0usize; n + 1];
        for e in &edges {
            out_start[e.source as usize + 1] += 1;
            in_start[e.target as usize + 1] += 1;
        }
        for i in 0..n {
            out_start[i + 1] += out_start[i];
            in_start[i + 1] += in_start[i];
        }
        let placeholder = Adjacent { vertex: 0, time: 0, edge: 0 };
        let mut out_adj = vec![placeholder; edges.len()];
        let mut in_adj = vec![placeholder; edges.len()];
        let mut out_fill = out_start.clone();
        let mut in_fill = in_start.clone();
        // Edges arrive in (time, source, target) order, so every run ends up
        // sorted by (time, neighbor).
        for (id, e) in edges.iter().enumerate() {
            let slot = &mut out_fill[e.source as usize];
            out_adj[*slot] = Adjacent { vertex: e.target, time: e.time, edge: id as EdgeId };
            *slot += 1;
            let slot = &mut in_fill[e.target as usize];
            in_adj[*slot] = Adjacent { vertex: e.source, time: e.time, edge: id as EdgeId };
            *slot += 1;
        }
        TemporalGraph { ids, edges, out_start, out_adj, in_start, in_adj }
    }

    /// Keeps the edges selected by `keep`, over the same vertex space.
    pub fn filter_edges(&self, mut keep: impl FnMut(&TemporalEdge) -> bool) -> TemporalGraph {
        let edges = self.edges.iter().copied().filter(|e| keep(e)).collect();
        Self::from_sorted_unique(self.ids.clone(), edges)
    }

    /// Keeps the edges whose ids are flagged in `keep`.
    pub fn select_edges(&self, keep: &[bool]) -> TemporalGraph {
        debug_assert_eq!(keep.len(), self.edges.len());
        let edges = self.edges.iter().zip(keep).filter(|(_, &k)| k).map(|(e, _)| *e).collect();
        Self::from_sorted_unique(self.ids.clone(), edges)
    }

    pub fn ids(&self) -> &Arc<IdMap> {
        &self.ids
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> TemporalEdge {
        self.edges[id as usize]
    }

    /// Out-neighbors of `u` sorted by `(time, neighbor)`.
    #[inline]
    pub fn out_neighbors(&self, u: VertexId) -> &[Adjacent] {
        let u = u as usize;
        &self.out_adj[self.out_start[u]..self.out_start[u + 1]]
    }

    /// In-neighbors of `u` sorted by `(time, neighbor)`.
    #[inline]
    pub fn in_neighbors(&self, u: VertexId) -> &[Adjacent] {
        let u = u as usize;
        &self.in_adj[self.in_start[u]..self.in_start[u + 1]]
    }

    pub fn out_degree(&self, u: VertexId) -> usize {
        self.out_start[u as usize + 1] - self.out_start[u as usize]
    }

    pub fn in_degree(&self, u: VertexId) -> usize {
        self.in_start[u as usize + 1] - self.in_start[u as usize]
    }

    pub fn contains_edge(&self, source: VertexId, target: VertexId, time: Timestamp) -> bool {
        self.find_edge(source, target, time).is_some()
    }

    pub fn find_edge(&self, source: VertexId, target: VertexId, time: Timestamp) -> Option<EdgeId> {
        if source as usize >= self.vertex_count() {
            return None;
        }
        let run = self.out_neighbors(source);
        run.binary_search_by(|a| (a.time, a.vertex).cmp(&(time, target)))
            .ok()
            .map(|i| run[i].edge)
    }

    pub fn external_id(&self, u: VertexId) -> u64 {
        self.ids.external(u)
    }

    pub fn internal_id(&self, external: u64) -> Option<VertexId> {
        self.ids.internal(external)
    }

    /// Smallest and largest edge timestamp, `None` for an edgeless graph.
    pub fn time_range(&self) -> Option<(Timestamp, Timestamp)> {
        Some((self.edges.first()?.time, self.edges.last()?.time))
    }

    /// Edge triples as a set, for exact comparisons.
    pub fn edge_set(&self) -> BTreeSet<(VertexId, VertexId, Timestamp)> {
        self.edges.iter().map(TemporalEdge::triple).collect()
    }

    /// Endpoints of the edges, ascending.
    pub fn incident_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count() as VertexId)
            .filter(|&u| self.out_degree(u) + self.in_degree(u) > 0)
            .collect()
    }
}

/// A single `(s, t, [tau_b, tau_e])` query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Query {
    source: VertexId,
    target: VertexId,
    tau_b: Timestamp,
    tau_e: Timestamp,
}

impl Query {
    pub fn new(source: VertexId, target: VertexId, tau_b: Timestamp, tau_e: Timestamp) -> Result<Self, QueryError> {
        if source == target {
            return Err(QueryError::SourceEqualsTarget);
        }
        for t in [tau_b, tau_e] {
            if !timestamp_in_range(t) {
                return Err(QueryError::TimestampOutOfRange(t));
            }
        }
        if tau_b > tau_e {
            return Err(QueryError::EmptyInterval { tau_b, tau_e });
        }
        Ok(Query { source, target, tau_b, tau_e })
    }

    /// Builds a query from external ids of `g`.
    pub fn from_external(g: &TemporalGraph, s: u64, t: u64, tau_b: Timestamp, tau_e: Timestamp) -> Result<Self, QueryError> {
        let lookup = |x: u64| g.internal_id(x).ok_or_else(|| QueryError::UnknownExternalId(x.to_string()));
        let q = Query::new(lookup(s)?, lookup(t)?, tau_b, tau_e)?;
        Ok(q)
    }

    /// Checks that both endpoints exist in `g`.
    pub fn check_against(&self, g: &TemporalGraph) -> Result<(), QueryError> {
        for u in [self.source, self.target] {
            if u as usize >= g.vertex_count() {
                return Err(QueryError::UnknownVertex(u));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn begin(&self) -> Timestamp {
        self.tau_b
    }

    pub fn end(&self) -> Timestamp {
        self.tau_e
    }

    /// Interval span `tau_e - tau_b + 1`; bounds the length of every path.
    pub fn span(&self) -> u64 {
        (self.tau_e as i128 - self.tau_b as i128 + 1) as u64
    }

    #[inline]
    pub fn contains(&self, t: Timestamp) -> bool {
        self.tau_b <= t && t <= self.tau_e
    }
}

/// An edge-subset view of a base graph: `Gq`, `Gt`, the tspG and every
/// baseline upper-bound graph are values of this type.
///
/// The edges are materialized as their own [`TemporalGraph`] over the base
/// vertex space, so later stages traverse them directly.
#[derive(Debug, Clone)]
pub struct ResultGraph {
    graph: TemporalGraph,
}

impl ResultGraph {
    pub fn new(graph: TemporalGraph) -> Self {
        ResultGraph { graph }
    }

    /// Empty result over the vertex space of `base`.
    pub fn empty(base: &TemporalGraph) -> Self {
        ResultGraph { graph: TemporalGraph::from_sorted_unique(base.ids().clone(), Vec::new()) }
    }

    pub fn graph(&self) -> &TemporalGraph {
        &self.graph
    }

    pub fn into_graph(self) -> TemporalGraph {
        self.graph
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        self.graph.edges()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.edge_count() == 0
    }

    /// Vertices incident to a retained edge.
    pub fn vertices(&self) -> Vec<VertexId> {
        self.graph.incident_vertices()
    }

    pub fn edge_set(&self) -> BTreeSet<(VertexId, VertexId, Timestamp)> {
        self.graph.edge_set()
    }

    pub fn contains_edge(&self, source: VertexId, target: VertexId, time: Timestamp) -> bool {
        self.graph.contains_edge(source, target, time)
    }

    /// Edge-set inclusion.
    pub fn is_subgraph_of(&self, other: &TemporalGraph) -> bool {
        self.edges().iter().all(|e| other.contains_edge(e.source, e.target, e.time))
    }

    /// Same vertex and edge sets.
    pub fn same_as(&self, other: &ResultGraph) -> bool {
        self.edges() == other.edges()
    }
}

/// Keeps exactly the edges whose timestamp lies in the query interval.
pub fn project(g: &TemporalGraph, q: &Query) -> ResultGraph {
    // The edge list is time-sorted, so the projection is one contiguous run.
    let lo = g.edges().partition_point(|e| e.time < q.begin());
    let hi = g.edges().partition_point(|e| e.time <= q.end());
    ResultGraph::new(TemporalGraph::from_sorted_unique(g.ids().clone(), g.edges()[lo..hi].to_vec()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    pub distinct_timestamps: usize,
    pub max_degree: usize,
    pub time_range: Option<(Timestamp, Timestamp)>,
}

pub fn stats(g: &TemporalGraph) -> GraphStats {
    let distinct: HashSet<Timestamp> = g.edges().iter().map(|e| e.time).collect();
    let max_degree = (0..g.vertex_count() as VertexId)
        .map(|u| g.in_degree(u).max(g.out_degree(u)))
        .max()
        .unwrap_or(0);
    GraphStats {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        distinct_timestamps: distinct.len(),
        max_degree,
        time_range: g.time_range(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(u32, u32, i64)]) -> TemporalGraph {
        let edges = edges.iter().map(|&(u, v, t)| TemporalEdge::new(u, v, t)).collect();
        TemporalGraph::from_edges(Arc::new(IdMap::identity(n)), edges)
    }

    #[test]
    fn adjacency_is_sorted_and_consistent() {
        let g = graph(4, &[(0, 1, 5), (0, 2, 3), (0, 3, 3), (2, 1, 1), (3, 1, 3), (0, 1, 1)]);
        let times: Vec<_> = g.out_neighbors(0).iter().map(|a| (a.time, a.vertex)).collect();
        assert_eq!(times, vec![(1, 1), (3, 2), (3, 3), (5, 1)]);
        let ins: Vec<_> = g.in_neighbors(1).iter().map(|a| (a.time, a.vertex)).collect();
        assert_eq!(ins, vec![(1, 0), (1, 2), (3, 3), (5, 0)]);
        let total: usize = (0..4).map(|u| g.out_degree(u)).sum();
        assert_eq!(total, g.edge_count());
        for (id, e) in g.edges().iter().enumerate() {
            assert!(g.out_neighbors(e.source).iter().any(|a| a.edge as usize == id && a.vertex == e.target));
            assert!(g.in_neighbors(e.target).iter().any(|a| a.edge as usize == id && a.vertex == e.source));
        }
    }

    #[test]
    fn duplicates_are_merged() {
        let g = graph(2, &[(0, 1, 2), (0, 1, 2)]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn query_validation() {
        assert_eq!(Query::new(1, 1, 0, 3), Err(QueryError::SourceEqualsTarget));
        assert!(matches!(Query::new(0, 1, 4, 3), Err(QueryError::EmptyInterval { .. })));
        assert!(matches!(Query::new(0, 1, i64::MIN, 3), Err(QueryError::TimestampOutOfRange(_))));
        assert!(matches!(Query::new(0, 1, 0, i64::MAX - 1), Err(QueryError::TimestampOutOfRange(_))));
        let q = Query::new(0, 1, 2, 7).unwrap();
        assert_eq!(q.span(), 6);
        assert!(q.check_against(&graph(2, &[(0, 1, 1)])).is_ok());
        assert_eq!(Query::new(0, 5, 2, 7).unwrap().check_against(&graph(2, &[(0, 1, 1)])), Err(QueryError::UnknownVertex(5)));
    }

    #[test]
    fn stats_of_single_edge_and_star() {
        let s = stats(&graph(2, &[(0, 1, 5)]));
        assert_eq!((s.vertices, s.edges, s.distinct_timestamps, s.max_degree), (2, 1, 1, 1));
        let k = 7;
        let star: Vec<_> = (1..=k).map(|i| (0, i, i as i64)).collect();
        assert_eq!(stats(&graph(k as usize + 1, &star)).max_degree, k as usize);
    }

    #[test]
    fn projection_covering_everything_is_identity() {
        let g = graph(3, &[(0, 1, 1), (1, 2, 9), (0, 2, 4)]);
        let p = project(&g, &Query::new(0, 2, -5, 100).unwrap());
        assert_eq!(p.edge_set(), g.edge_set());
        let p = project(&g, &Query::new(0, 2, 2, 8).unwrap());
        assert_eq!(p.edge_set(), [(0, 2, 4)].into_iter().collect());
        assert_eq!(p.vertices(), vec![0, 2]);
    }
}
