//! Baseline upper-bound graphs and the enumeration-based tspG construction.
//!
//! The enumeration is deliberately naive: a plain DFS from `s` with only the
//! timestamp and visited checks. It is the reference every other method is
//! compared against, so it shares no code with the verification pipeline.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};
use std::fmt;
use std::time::Instant;

use crate::graph::{project, Query, ResultGraph, TemporalEdge, TemporalGraph, Timestamp, VertexId};

/// Consecutive edges of a non-decreasing walk.
pub const NON_DECREASING: fn(Timestamp, Timestamp) -> bool = |prev, next| next >= prev;
/// Consecutive edges of a temporal path.
pub const STRICTLY_ASCENDING: fn(Timestamp, Timestamp) -> bool = |prev, next| next > prev;

/// Interval projection; the weakest upper bound.
pub fn dt_tsg(g: &TemporalGraph, q: &Query) -> ResultGraph {
    project(g, q)
}

/// Keeps edges on some non-decreasing `s -> t` walk within the interval.
pub fn es_tsg(g: &TemporalGraph, q: &Query) -> ResultGraph {
    let n = g.vertex_count();
    let (s, t) = (q.source(), q.target());

    // Earliest time each vertex can be left again, walking forward.
    let mut ready: Vec<Option<Timestamp>> = vec![None; n];
    ready[s as usize] = Some(q.begin());
    let mut work = VecDeque::from([s]);
    let mut queued = vec![false; n];
    queued[s as usize] = true;
    while let Some(u) = work.pop_front() {
        queued[u as usize] = false;
        let at = ready[u as usize].unwrap();
        for adj in g.out_neighbors(u) {
            if !q.contains(adj.time) || !NON_DECREASING(at, adj.time) {
                continue;
            }
            let slot = &mut ready[adj.vertex as usize];
            if slot.is_none_or(|cur| adj.time < cur) {
                *slot = Some(adj.time);
                if !queued[adj.vertex as usize] {
                    queued[adj.vertex as usize] = true;
                    work.push_back(adj.vertex);
                }
            }
        }
    }

    // Latest time each vertex must be reached by, walking backward from t.
    let mut deadline: Vec<Option<Timestamp>> = vec![None; n];
    deadline[t as usize] = Some(q.end());
    let mut work = VecDeque::from([t]);
    queued.iter_mut().for_each(|x| *x = false);
    queued[t as usize] = true;
    while let Some(v) = work.pop_front() {
        queued[v as usize] = false;
        let by = deadline[v as usize].unwrap();
        for adj in g.in_neighbors(v) {
            if !q.contains(adj.time) || !NON_DECREASING(adj.time, by) {
                continue;
            }
            let slot = &mut deadline[adj.vertex as usize];
            if slot.is_none_or(|cur| adj.time > cur) {
                *slot = Some(adj.time);
                if !queued[adj.vertex as usize] {
                    queued[adj.vertex as usize] = true;
                    work.push_back(adj.vertex);
                }
            }
        }
    }

    ResultGraph::new(g.filter_edges(|e| {
        q.contains(e.time)
            && ready[e.source as usize].is_some_and(|r| NON_DECREASING(r, e.time))
            && deadline[e.target as usize].is_some_and(|d| NON_DECREASING(e.time, d))
    }))
}

/// Keeps edges on some strictly ascending `s -> t` path within the interval,
/// using Dijkstra searches for earliest arrival and latest departure.
pub fn tg_tsg(g: &TemporalGraph, q: &Query) -> ResultGraph {
    let n = g.vertex_count();
    let (s, t) = (q.source(), q.target());

    let mut arrival: Vec<Option<Timestamp>> = vec![None; n];
    arrival[s as usize] = Some(q.begin() - 1);
    let mut heap = BinaryHeap::from([Reverse((q.begin() - 1, s))]);
    while let Some(Reverse((at, u))) = heap.pop() {
        if arrival[u as usize] != Some(at) {
            continue;
        }
        for adj in g.out_neighbors(u) {
            let v = adj.vertex;
            if v == t || v == s || adj.time > q.end() || !STRICTLY_ASCENDING(at, adj.time) {
                continue;
            }
            if arrival[v as usize].is_none_or(|cur| adj.time < cur) {
                arrival[v as usize] = Some(adj.time);
                heap.push(Reverse((adj.time, v)));
            }
        }
    }

    let mut departure: Vec<Option<Timestamp>> = vec![None; n];
    departure[t as usize] = Some(q.end() + 1);
    let mut heap = BinaryHeap::from([(q.end() + 1, t)]);
    while let Some((by, v)) = heap.pop() {
        if departure[v as usize] != Some(by) {
            continue;
        }
        for adj in g.in_neighbors(v) {
            let u = adj.vertex;
            if u == s || u == t || adj.time < q.begin() || !STRICTLY_ASCENDING(adj.time, by) {
                continue;
            }
            if departure[u as usize].is_none_or(|cur| adj.time > cur) {
                departure[u as usize] = Some(adj.time);
                heap.push((adj.time, u));
            }
        }
    }

    ResultGraph::new(g.filter_edges(|e| {
        arrival[e.source as usize].is_some_and(|a| STRICTLY_ASCENDING(a, e.time))
            && departure[e.target as usize].is_some_and(|d| STRICTLY_ASCENDING(e.time, d))
    }))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerationLimits {
    pub max_paths: Option<u64>,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Complete,
    /// Stopped after `max_paths` paths.
    Truncated,
    TimedOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumeration {
    pub paths: u64,
    pub termination: Termination,
}

impl Enumeration {
    pub fn is_complete(&self) -> bool {
        self.termination == Termination::Complete
    }
}

const CLOCK_EVERY: u64 = 1 << 14;

struct Dfs<'a, F> {
    g: &'a TemporalGraph,
    q: &'a Query,
    limits: EnumerationLimits,
    visited: Vec<bool>,
    path: Vec<TemporalEdge>,
    found: u64,
    steps: u64,
    stop: Option<Termination>,
    visit: F,
}

impl<F: FnMut(&[TemporalEdge])> Dfs<'_, F> {
    fn descend(&mut self, u: VertexId, last: Timestamp) {
        for adj in self.g.out_neighbors(u) {
            if self.stop.is_some() {
                return;
            }
            self.steps += 1;
            if self.steps % CLOCK_EVERY == 0 && self.limits.deadline.is_some_and(|d| Instant::now() >= d) {
                self.stop = Some(Termination::TimedOut);
                return;
            }
            if adj.time < self.q.begin() || adj.time > self.q.end() || !STRICTLY_ASCENDING(last, adj.time) {
                continue;
            }
            if self.visited[adj.vertex as usize] {
                continue;
            }
            self.path.push(TemporalEdge::new(u, adj.vertex, adj.time));
            if adj.vertex == self.q.target() {
                self.found += 1;
                (self.visit)(&self.path);
                if self.limits.max_paths.is_some_and(|cap| self.found >= cap) {
                    self.stop = Some(Termination::Truncated);
                }
            } else {
                self.visited[adj.vertex as usize] = true;
                self.descend(adj.vertex, adj.time);
                self.visited[adj.vertex as usize] = false;
            }
            self.path.pop();
        }
    }
}

/// Calls `visit` once per temporal simple path `s -> t` in `g`, in adjacency
/// order. Stops early when a limit is hit; the returned [`Termination`] says
/// whether the stream was complete.
pub fn enumerate_tsp(
    g: &TemporalGraph,
    q: &Query,
    limits: EnumerationLimits,
    visit: impl FnMut(&[TemporalEdge]),
) -> Enumeration {
    let mut dfs = Dfs {
        g,
        q,
        limits,
        visited: vec![false; g.vertex_count()],
        path: Vec::new(),
        found: 0,
        steps: 0,
        stop: None,
        visit,
    };
    dfs.visited[q.source() as usize] = true;
    dfs.descend(q.source(), q.begin() - 1);
    Enumeration { paths: dfs.found, termination: dfs.stop.unwrap_or(Termination::Complete) }
}

/// Counts temporal simple paths without materializing them.
pub fn count_tsp(g: &TemporalGraph, q: &Query, limits: EnumerationLimits) -> Enumeration {
    enumerate_tsp(g, q, limits, |_| {})
}

/// Enumeration stopped before covering every path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incomplete(pub Enumeration);

impl fmt::Display for Incomplete {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.termination {
            Termination::TimedOut => write!(f, "enumeration timed out after {} paths", self.0.paths),
            _ => write!(f, "enumeration truncated after {} paths", self.0.paths),
        }
    }
}

impl std::error::Error for Incomplete {}

/// Union of all temporal simple paths found in `ubg`, with per-path
/// duplicate checks on vertices and edges.
pub fn build_tspg_by_enumeration(ubg: &TemporalGraph, q: &Query, limits: EnumerationLimits) -> Result<(ResultGraph, u64), Incomplete> {
    let mut edges: HashSet<TemporalEdge> = HashSet::new();
    let mut vertices: HashSet<VertexId> = HashSet::new();
    let run = enumerate_tsp(ubg, q, limits, |path| {
        for e in path {
            vertices.insert(e.source);
            vertices.insert(e.target);
            edges.insert(*e);
        }
    });
    if !run.is_complete() {
        return Err(Incomplete(run));
    }
    debug_assert!(edges.iter().all(|e| vertices.contains(&e.source) && vertices.contains(&e.target)));
    let kept = ubg.filter_edges(|e| edges.contains(e));
    Ok((ResultGraph::new(kept), run.paths))
}

/// `u0 -τ1-> u1 -τ2-> ... ul`, external ids.
pub fn format_path(g: &TemporalGraph, path: &[TemporalEdge]) -> String {
    let Some(first) = path.first() else {
        return String::new();
    };
    let mut out = g.external_id(first.source).to_string();
    for e in path {
        out.push_str(&format!(" -{}-> {}", e.time, g.external_id(e.target)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathViolation {
    Empty,
    WrongStart,
    WrongEnd,
    Disconnected(usize),
    NotAscending(usize),
    OutsideInterval(usize),
    RepeatedVertex(VertexId),
    MissingEdge(usize),
}

/// Checks that `path` is a temporal simple path `s -> t` within the interval
/// whose edges all belong to `g`.
pub fn validate_path(g: &TemporalGraph, q: &Query, path: &[TemporalEdge]) -> Result<(), PathViolation> {
    let first = path.first().ok_or(PathViolation::Empty)?;
    if first.source != q.source() {
        return Err(PathViolation::WrongStart);
    }
    if path.last().unwrap().target != q.target() {
        return Err(PathViolation::WrongEnd);
    }
    let mut seen = HashSet::from([first.source]);
    for (i, e) in path.iter().enumerate() {
        if !q.contains(e.time) {
            return Err(PathViolation::OutsideInterval(i));
        }
        if !g.contains_edge(e.source, e.target, e.time) {
            return Err(PathViolation::MissingEdge(i));
        }
        if i > 0 {
            if path[i - 1].target != e.source {
                return Err(PathViolation::Disconnected(i));
            }
            if path[i - 1].time >= e.time {
                return Err(PathViolation::NotAscending(i));
            }
        }
        if !seen.insert(e.target) {
            return Err(PathViolation::RepeatedVertex(e.target));
        }
    }
    Ok(())
}
