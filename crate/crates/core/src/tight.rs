//! Tight upper-bound graph: drops `Gq` edges whose two sides necessarily share
//! a vertex.

use crate::graph::{Query, ResultGraph, TemporalGraph};
use crate::tcv::TcvTables;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TightStats {
    /// Edges admitted because they leave `s` or enter `t`.
    pub endpoint_edges: usize,
    /// Set intersections performed; at most one per remaining edge.
    pub intersections: usize,
    /// Edges with no earlier in-entry or later out-entry.
    pub missing_side: usize,
    pub kept: usize,
}

pub fn tight_ubg(gq: &TemporalGraph, q: &Query, tables: &TcvTables) -> ResultGraph {
    tight_ubg_with_stats(gq, q, tables).0
}

/// Edge `e(u, v, τ)` is kept iff `u = s`, `v = t`, or
/// `TCV_τl(s, u) ∩ TCV_τr(v, t) = ∅` where `τl` is the last in-timestamp of
/// `u` before `τ` and `τr` the first out-timestamp of `v` after `τ`.
pub fn tight_ubg_with_stats(gq: &TemporalGraph, q: &Query, tables: &TcvTables) -> (ResultGraph, TightStats) {
    let n = gq.vertex_count();
    let (s, t) = (q.source(), q.target());
    let fwd = &tables.forward;
    let bwd = &tables.backward;
    let mut stats = TightStats::default();

    // Forward cursor: index of the last in-entry with time < τ, advancing.
    let mut ps = vec![0usize; n];
    // Backward cursor: index of the first out-entry with time > τ. Backward
    // entries are stored by descending time, so it walks toward index 0;
    // `None` once every entry is at or before τ.
    let mut pt: Vec<Option<usize>> = (0..n as u32).map(|v| bwd.entry_count(v).checked_sub(1)).collect();

    let mut keep = vec![false; gq.edge_count()];
    for (id, e) in gq.edges().iter().enumerate() {
        let (u, v, tau) = (e.source, e.target, e.time);
        if u == s || v == t {
            keep[id] = true;
            stats.endpoint_edges += 1;
            continue;
        }

        let count = fwd.entry_count(u);
        let i = &mut ps[u as usize];
        while *i + 1 < count && fwd.time_at(u, *i + 1) < tau {
            *i += 1;
        }
        let left = (count > 0 && fwd.time_at(u, *i) < tau).then_some(*i);

        let j = &mut pt[v as usize];
        while let Some(idx) = *j {
            if bwd.time_at(v, idx) > tau {
                break;
            }
            *j = idx.checked_sub(1);
        }
        let right = *j;

        let (Some(i), Some(j)) = (left, right) else {
            // Every internal Gq edge has an earlier in-edge and a later
            // out-edge; only s/t-incident edges can lack one.
            debug_assert!(false, "edge {e:?} of Gq has no entry on one side");
            stats.missing_side += 1;
            continue;
        };
        let a = fwd.set_at(u, i);
        let b = bwd.set_at(v, j);
        stats.intersections += 1;
        if disjoint(&a, &b) {
            keep[id] = true;
        }
    }
    stats.kept = keep.iter().filter(|&&k| k).count();
    (ResultGraph::new(gq.select_edges(&keep)), stats)
}

fn disjoint(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}
