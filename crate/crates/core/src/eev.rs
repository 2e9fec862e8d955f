//! Escaped-edges verification: turns the tight upper-bound graph into the
//! exact temporal simple path graph.
//!
//! Edges are confirmed in three ways, cheapest first:
//!
//! * every edge leaving `s` or entering `t` (each lies on some simple path);
//! * two-hop rule: `e(u, v, τ)` with an earlier `e(s, u, ·)` or a later
//!   `e(v, t, ·)` in `Gt`;
//! * an exhaustive bidirectional DFS through the edge. A found path confirms
//!   all of its edges plus, at each interior position, every parallel edge
//!   whose timestamp fits between the neighboring path edges.
//!
//! An edge whose search fails is rejected; the DFS is exhaustive, so failure
//! proves the edge lies on no temporal simple path.

use std::fmt;
use std::time::Instant;

use crate::graph::{EdgeId, Query, ResultGraph, TemporalEdge, TemporalGraph, Timestamp, VertexId};

/// Returned when a deadline passes mid-computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimedOut;

impl fmt::Display for TimedOut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("deadline exceeded")
    }
}

impl std::error::Error for TimedOut {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfirmRule {
    /// Leaves `s` or enters `t`.
    Endpoint,
    /// Preceded by an edge from `s` or followed by an edge into `t`.
    TwoHop,
    /// On a path found by the DFS.
    Path,
    /// Parallel replacement of an interior path edge.
    Batch,
}

impl fmt::Display for ConfirmRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConfirmRule::Endpoint => "endpoint",
            ConfirmRule::TwoHop => "two-hop",
            ConfirmRule::Path => "path",
            ConfirmRule::Batch => "batch",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Confirmation {
    pub edge: TemporalEdge,
    pub rule: ConfirmRule,
}

/// A batch-confirmed edge together with the path it substitutes into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchSubstitution {
    pub path: Vec<TemporalEdge>,
    /// Zero-based index of the replaced edge in `path`.
    pub position: usize,
    pub replacement: TemporalEdge,
}

#[derive(Debug, Clone, Default)]
pub struct EevTrace {
    pub confirmations: Vec<Confirmation>,
    pub batches: Vec<BatchSubstitution>,
    pub rejected: Vec<TemporalEdge>,
    /// Seeds handed to the DFS, in order.
    pub searched: Vec<TemporalEdge>,
    pub paths: Vec<Vec<TemporalEdge>>,
    pub max_depth: usize,
}

impl EevTrace {
    /// One `u v t rule` line per confirmed edge, external ids.
    pub fn render(&self, g: &TemporalGraph) -> String {
        let mut out = String::new();
        for c in &self.confirmations {
            let e = c.edge;
            out.push_str(&format!("{} {} {} {}\n", g.external_id(e.source), g.external_id(e.target), e.time, c.rule));
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct EevOptions {
    pub trace: bool,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Unverified,
    Verified,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchDirection {
    Forward,
    Backward,
}

const DEADLINE_CHECK_INTERVAL: u64 = 1 << 12;

/// Working state of one bidirectional search, reusable across seeds.
#[derive(Debug)]
pub struct SearchState {
    visited: Vec<bool>,
    /// Edges of the partial path, in push order; the seed is at the bottom.
    stack: Vec<EdgeId>,
    seed: Option<TemporalEdge>,
    depth_limit: usize,
    max_depth: usize,
    steps: u64,
    deadline: Option<Instant>,
}

impl SearchState {
    pub fn new(gt: &TemporalGraph, q: &Query) -> Self {
        SearchState {
            visited: vec![false; gt.vertex_count()],
            stack: Vec::new(),
            seed: None,
            depth_limit: usize::try_from(q.span()).unwrap_or(usize::MAX),
            max_depth: 0,
            steps: 0,
            deadline: None,
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    /// Deepest path stack seen so far.
    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    fn tick(&mut self) -> Result<(), TimedOut> {
        self.steps += 1;
        if self.steps % DEADLINE_CHECK_INTERVAL == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(TimedOut);
                }
            }
        }
        Ok(())
    }

    fn push(&mut self, edge: EdgeId, vertex: VertexId) {
        self.stack.push(edge);
        self.visited[vertex as usize] = true;
        self.max_depth = self.max_depth.max(self.stack.len());
        assert!(self.stack.len() <= self.depth_limit, "path longer than the interval span");
    }

    fn pop(&mut self, vertex: VertexId) {
        self.stack.pop();
        self.visited[vertex as usize] = false;
    }

    fn clear(&mut self, gt: &TemporalGraph) {
        for &id in &self.stack {
            let e = gt.edge(id);
            self.visited[e.source as usize] = false;
            self.visited[e.target as usize] = false;
        }
        self.stack.clear();
        self.seed = None;
    }

    /// Continues the path in `dir` from `(vertex, time)`, the current
    /// frontier. `forward_done` / `backward_done` say whether the path already
    /// reaches `t` / starts at `s`.
    fn extend(
        &mut self,
        gt: &TemporalGraph,
        q: &Query,
        dir: SearchDirection,
        vertex: VertexId,
        time: Timestamp,
        forward_done: bool,
        backward_done: bool,
    ) -> Result<bool, TimedOut> {
        self.tick()?;
        let seed = self.seed.expect("search without seed");
        let (s, t) = (q.source(), q.target());
        match dir {
            SearchDirection::Forward => {
                // Latest edges first.
                for adj in gt.out_neighbors(vertex).iter().rev() {
                    if adj.time <= time {
                        break;
                    }
                    if adj.time > q.end() || adj.vertex == s || self.visited[adj.vertex as usize] {
                        continue;
                    }
                    self.push(adj.edge, adj.vertex);
                    let found = if adj.vertex == t {
                        backward_done
                            || self.extend(gt, q, SearchDirection::Backward, seed.source, seed.time, true, false)?
                    } else {
                        self.extend(gt, q, dir, adj.vertex, adj.time, forward_done, backward_done)?
                    };
                    if found {
                        return Ok(true);
                    }
                    self.pop(adj.vertex);
                }
            }
            SearchDirection::Backward => {
                // Earliest edges first.
                for adj in gt.in_neighbors(vertex) {
                    if adj.time >= time {
                        break;
                    }
                    if adj.time < q.begin() || adj.vertex == t || self.visited[adj.vertex as usize] {
                        continue;
                    }
                    self.push(adj.edge, adj.vertex);
                    let found = if adj.vertex == s {
                        forward_done
                            || self.extend(gt, q, SearchDirection::Forward, seed.target, seed.time, false, true)?
                    } else {
                        self.extend(gt, q, dir, adj.vertex, adj.time, forward_done, backward_done)?
                    };
                    if found {
                        return Ok(true);
                    }
                    self.pop(adj.vertex);
                }
            }
        }
        Ok(false)
    }
}

/// Direction searched first for a seed at time `tau`: the side with the
/// longer remaining time window goes second.
pub fn first_direction(q: &Query, tau: Timestamp) -> SearchDirection {
    if tau as i128 - q.begin() as i128 > q.end() as i128 - tau as i128 {
        SearchDirection::Forward
    } else {
        SearchDirection::Backward
    }
}

/// Finds a temporal simple path `s -> t` through `seed` in `gt`, or proves
/// none exists. The returned path is ordered by time.
pub fn bidir_search(gt: &TemporalGraph, q: &Query, seed: TemporalEdge, state: &mut SearchState) -> Option<Vec<TemporalEdge>> {
    let id = gt.find_edge(seed.source, seed.target, seed.time).expect("seed must be an edge of the graph");
    search_from(gt, q, id, state).expect("search without deadline")
}

fn search_from(gt: &TemporalGraph, q: &Query, seed_id: EdgeId, state: &mut SearchState) -> Result<Option<Vec<TemporalEdge>>, TimedOut> {
    let seed = gt.edge(seed_id);
    if !q.contains(seed.time) {
        return Ok(None);
    }
    let (s, t) = (q.source(), q.target());
    // A seed into s or out of t cannot be interior to a simple s-t path.
    if seed.target == s || seed.source == t {
        return Ok(None);
    }
    state.clear(gt);
    state.seed = Some(seed);
    state.stack.push(seed_id);
    state.visited[seed.source as usize] = true;
    state.visited[seed.target as usize] = true;
    state.max_depth = state.max_depth.max(1);

    let forward_done = seed.target == t;
    let backward_done = seed.source == s;
    let result = if forward_done && backward_done {
        Ok(true)
    } else {
        let dir = if forward_done {
            SearchDirection::Backward
        } else if backward_done {
            SearchDirection::Forward
        } else {
            first_direction(q, seed.time)
        };
        let (vertex, time) = match dir {
            SearchDirection::Forward => (seed.target, seed.time),
            SearchDirection::Backward => (seed.source, seed.time),
        };
        state.extend(gt, q, dir, vertex, time, forward_done, backward_done)
    };
    let found = match result {
        Ok(found) => found,
        Err(e) => {
            state.clear(gt);
            return Err(e);
        }
    };
    let path = if found {
        let mut path: Vec<TemporalEdge> = state.stack.iter().map(|&id| gt.edge(id)).collect();
        path.sort_unstable_by_key(|e| e.time);
        Some(path)
    } else {
        debug_assert_eq!(state.stack.len(), 1, "failed search must unwind to the seed");
        None
    };
    state.clear(gt);
    Ok(path)
}

/// Open time window in which the edge at `position` of `path` can be
/// swapped for a parallel edge; the path's outer neighbors are the virtual
/// timestamps `tau_b - 1` and `tau_e + 1`.
pub fn replacement_window(path: &[TemporalEdge], position: usize, q: &Query) -> (Timestamp, Timestamp) {
    let lo = if position == 0 { q.begin() - 1 } else { path[position - 1].time };
    let hi = path.get(position + 1).map_or(q.end() + 1, |e| e.time);
    (lo, hi)
}

/// The exact temporal simple path graph of `q`, computed from `gt`.
pub fn eev(gt: &TemporalGraph, q: &Query) -> ResultGraph {
    eev_with(gt, q, &EevOptions::default()).expect("no deadline set").0
}

pub fn eev_with(gt: &TemporalGraph, q: &Query, options: &EevOptions) -> Result<(ResultGraph, Option<EevTrace>), TimedOut> {
    let (s, t) = (q.source(), q.target());
    let m = gt.edge_count();
    let mut status = vec![Status::Unverified; m];
    let mut trace = options.trace.then(EevTrace::default);

    let confirm = |id: EdgeId, rule: ConfirmRule, status: &mut Vec<Status>, trace: &mut Option<EevTrace>| -> bool {
        if status[id as usize] != Status::Unverified {
            return false;
        }
        status[id as usize] = Status::Verified;
        if let Some(tr) = trace.as_mut() {
            tr.confirmations.push(Confirmation { edge: gt.edge(id), rule });
        }
        true
    };

    for adj in gt.out_neighbors(s) {
        confirm(adj.edge, ConfirmRule::Endpoint, &mut status, &mut trace);
    }
    for adj in gt.in_neighbors(t) {
        confirm(adj.edge, ConfirmRule::Endpoint, &mut status, &mut trace);
    }
    // Out-edges of s are sorted by time, so the first edge to each u is the
    // earliest.
    let mut seen = vec![false; gt.vertex_count()];
    for adj in gt.out_neighbors(s) {
        let u = adj.vertex;
        if u == t || std::mem::replace(&mut seen[u as usize], true) {
            continue;
        }
        for next in gt.out_neighbors(u).iter().filter(|n| n.time > adj.time) {
            confirm(next.edge, ConfirmRule::TwoHop, &mut status, &mut trace);
        }
    }
    seen.iter_mut().for_each(|x| *x = false);
    for adj in gt.in_neighbors(t).iter().rev() {
        let v = adj.vertex;
        if v == s || std::mem::replace(&mut seen[v as usize], true) {
            continue;
        }
        for prev in gt.in_neighbors(v).iter().filter(|p| p.time < adj.time) {
            confirm(prev.edge, ConfirmRule::TwoHop, &mut status, &mut trace);
        }
    }

    let mut state = SearchState::new(gt, q).with_deadline(options.deadline);
    for id in 0..m as EdgeId {
        if status[id as usize] != Status::Unverified {
            continue;
        }
        if let Some(tr) = trace.as_mut() {
            tr.searched.push(gt.edge(id));
        }
        let Some(path) = search_from(gt, q, id, &mut state)? else {
            status[id as usize] = Status::Rejected;
            if let Some(tr) = trace.as_mut() {
                tr.rejected.push(gt.edge(id));
            }
            continue;
        };
        for e in &path {
            let pid = gt.find_edge(e.source, e.target, e.time).expect("path edge in graph");
            confirm(pid, ConfirmRule::Path, &mut status, &mut trace);
        }
        let l = path.len();
        // Positions 1, 2, l-1 and l (one-based) are already covered by the
        // endpoint and two-hop rules.
        for pos in 2..l.saturating_sub(2) {
            let edge = path[pos];
            let (lo, hi) = replacement_window(&path, pos, q);
            for adj in gt.out_neighbors(edge.source) {
                if adj.vertex != edge.target || adj.time <= lo || adj.time >= hi {
                    continue;
                }
                if confirm(adj.edge, ConfirmRule::Batch, &mut status, &mut trace) {
                    if let Some(tr) = trace.as_mut() {
                        tr.batches.push(BatchSubstitution { path: path.clone(), position: pos, replacement: gt.edge(adj.edge) });
                    }
                }
            }
        }
        if let Some(tr) = trace.as_mut() {
            tr.paths.push(path);
        }
    }

    if let Some(tr) = trace.as_mut() {
        tr.max_depth = state.max_depth();
    }
    let keep: Vec<bool> = status.iter().map(|&st| st == Status::Verified).collect();
    Ok((ResultGraph::new(gt.select_edges(&keep)), trace))
}
