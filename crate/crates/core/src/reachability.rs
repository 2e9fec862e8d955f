//! Polarity times: earliest arrival from `s` and latest departure toward `t`.
//!
//! Both passes run the same label-correcting sweep. The backward pass works on
//! in-adjacency with negated timestamps, which turns "latest departure" into
//! "earliest arrival" without a second copy of the loop.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::graph::{Adjacent, Query, TemporalGraph, Timestamp, VertexId};

/// Earliest arrival time. `Unreached` orders after every timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arrival {
    At(Timestamp),
    Unreached,
}

/// Latest departure time. `Unreached` orders before every timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Departure {
    Unreached,
    At(Timestamp),
}

impl Arrival {
    pub fn time(self) -> Option<Timestamp> {
        match self {
            Arrival::At(t) => Some(t),
            Arrival::Unreached => None,
        }
    }

    pub fn is_reached(self) -> bool {
        self != Arrival::Unreached
    }
}

impl Departure {
    pub fn time(self) -> Option<Timestamp> {
        match self {
            Departure::At(t) => Some(t),
            Departure::Unreached => None,
        }
    }

    pub fn is_reached(self) -> bool {
        self != Departure::Unreached
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityTimes {
    arrival: Vec<Arrival>,
    departure: Vec<Departure>,
}

impl PolarityTimes {
    pub fn arrival(&self, u: VertexId) -> Arrival {
        self.arrival[u as usize]
    }

    pub fn departure(&self, u: VertexId) -> Departure {
        self.departure[u as usize]
    }

    pub fn arrivals(&self) -> &[Arrival] {
        &self.arrival
    }

    pub fn departures(&self) -> &[Departure] {
        &self.departure
    }

    /// One `u A(u) D(u)` line per vertex, external ids, `inf`/`-inf` for
    /// unreached.
    pub fn dump(&self, g: &TemporalGraph) -> String {
        let mut out = String::new();
        for u in 0..self.arrival.len() {
            let a = match self.arrival[u] {
                Arrival::At(t) => t.to_string(),
                Arrival::Unreached => "inf".into(),
            };
            let d = match self.departure[u] {
                Departure::At(t) => t.to_string(),
                Departure::Unreached => "-inf".into(),
            };
            let _ = writeln!(out, "{} {} {}", g.external_id(u as VertexId), a, d);
        }
        out
    }
}

/// Counters collected during a polarity computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    /// Adjacency entries consumed by the forward cursors.
    pub forward_advances: usize,
    /// Adjacency entries consumed by the backward cursors.
    pub backward_advances: usize,
    pub pops: usize,
    pub improvements: usize,
}

/// Per-query working arrays, reusable across queries on graphs of the same
/// or smaller vertex count.
#[derive(Debug, Default)]
pub struct PolarityScratch {
    best: Vec<i64>,
    cursor: Vec<usize>,
    queued: Vec<bool>,
    queue: VecDeque<VertexId>,
}

impl PolarityScratch {
    fn reset(&mut self, n: usize) {
        self.best.clear();
        self.best.resize(n, UNREACHED_KEY);
        self.cursor.clear();
        self.cursor.resize(n, 0);
        self.queued.clear();
        self.queued.resize(n, false);
        self.queue.clear();
    }
}

const UNREACHED_KEY: i64 = i64::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Orientation {
    Forward,
    Backward,
}

impl Orientation {
    #[inline]
    fn run(self, g: &TemporalGraph, u: VertexId) -> &[Adjacent] {
        match self {
            Orientation::Forward => g.out_neighbors(u),
            Orientation::Backward => g.in_neighbors(u),
        }
    }

    #[inline]
    fn key(self, t: Timestamp) -> i64 {
        match self {
            Orientation::Forward => t,
            Orientation::Backward => -t,
        }
    }

    /// The `p`-th entry of `run` in ascending key order.
    #[inline]
    fn nth(self, run: &[Adjacent], p: usize) -> Adjacent {
        match self {
            Orientation::Forward => run[p],
            Orientation::Backward => run[run.len() - 1 - p],
        }
    }
}

/// Earliest-arrival sweep in key space over `[key_begin, key_end]`, starting
/// at `root` and never expanding into `blocked`.
///
/// `cursor[u]` counts the adjacency entries of `u` not yet offered to their
/// heads; entries are consumed from the largest key downward, so every entry
/// is consumed at most once over the whole run.
fn sweep(
    g: &TemporalGraph,
    orientation: Orientation,
    root: VertexId,
    blocked: Option<VertexId>,
    key_begin: i64,
    key_end: i64,
    scratch: &mut PolarityScratch,
) -> (usize, usize, usize) {
    let n = g.vertex_count();
    scratch.reset(n);
    for u in 0..n {
        scratch.cursor[u] = orientation.run(g, u as VertexId).len();
    }
    let PolarityScratch { best, cursor, queued, queue } = scratch;
    best[root as usize] = key_begin - 1;
    queue.push_back(root);
    queued[root as usize] = true;
    let (mut advances, mut pops, mut improvements) = (0, 0, 0);

    while let Some(u) = queue.pop_front() {
        pops += 1;
        let ui = u as usize;
        queued[ui] = false;
        let run = orientation.run(g, u);
        while cursor[ui] > 0 {
            let adj = orientation.nth(run, cursor[ui] - 1);
            let k = orientation.key(adj.time);
            if k <= best[ui] {
                break;
            }
            cursor[ui] -= 1;
            advances += 1;
            let v = adj.vertex;
            if k > key_end || Some(v) == blocked || k >= best[v as usize] {
                continue;
            }
            debug_assert!(k < best[v as usize], "arrival labels only decrease");
            best[v as usize] = k;
            improvements += 1;
            if k != key_end && !queued[v as usize] {
                queued[v as usize] = true;
                queue.push_back(v);
            }
        }
    }
    (advances, pops, improvements)
}

/// Polarity times for `q` on `g`, allocating fresh scratch space.
pub fn compute_polarity(g: &TemporalGraph, q: &Query) -> PolarityTimes {
    compute_polarity_with(g, q, &mut PolarityScratch::default()).0
}

/// Polarity times for `q` on `g` using pooled scratch space.
pub fn compute_polarity_with(g: &TemporalGraph, q: &Query, scratch: &mut PolarityScratch) -> (PolarityTimes, SweepStats) {
    let (s, t) = (q.source(), q.target());
    let mut stats = SweepStats::default();

    let (adv, pops, imp) = sweep(g, Orientation::Forward, s, Some(t), q.begin(), q.end(), scratch);
    stats.forward_advances = adv;
    stats.pops += pops;
    stats.improvements += imp;
    let arrival = scratch
        .best
        .iter()
        .map(|&k| if k == UNREACHED_KEY { Arrival::Unreached } else { Arrival::At(k) })
        .collect();

    let (adv, pops, imp) = sweep(g, Orientation::Backward, t, Some(s), -q.end(), -q.begin(), scratch);
    stats.backward_advances = adv;
    stats.pops += pops;
    stats.improvements += imp;
    let departure = scratch
        .best
        .iter()
        .map(|&k| if k == UNREACHED_KEY { Departure::Unreached } else { Departure::At(-k) })
        .collect();

    (PolarityTimes { arrival, departure }, stats)
}

/// Earliest arrival from `source` within `[tau_b, tau_e]` with no vertex
/// blocked. Any vertex reached here is the target of some temporal path.
pub fn earliest_arrivals(g: &TemporalGraph, source: VertexId, tau_b: Timestamp, tau_e: Timestamp) -> Vec<Arrival> {
    let mut scratch = PolarityScratch::default();
    sweep(g, Orientation::Forward, source, None, tau_b, tau_e, &mut scratch);
    scratch
        .best
        .iter()
        .enumerate()
        .map(|(u, &k)| {
            if u == source as usize || k == UNREACHED_KEY {
                Arrival::Unreached
            } else {
                Arrival::At(k)
            }
        })
        .collect()
}
