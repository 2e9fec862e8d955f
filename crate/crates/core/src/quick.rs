//! Quick upper-bound graph: edges on at least one temporal `s -> t` path.

use crate::graph::{Query, ResultGraph, TemporalGraph};
use crate::reachability::{Arrival, Departure, PolarityTimes};

/// Keeps `e(u, v, τ)` iff `A(u) < τ < D(v)`.
///
/// The result inherits the base edge order, so its edge list is
/// non-descending in time.
pub fn quick_ubg(g: &TemporalGraph, q: &Query, pt: &PolarityTimes) -> ResultGraph {
    debug_assert_eq!(pt.arrivals().len(), g.vertex_count());
    debug_assert_eq!(pt.arrival(q.source()), Arrival::At(q.begin() - 1));
    ResultGraph::new(g.filter_edges(|e| {
        pt.arrival(e.source) < Arrival::At(e.time) && Departure::At(e.time) < pt.departure(e.target)
    }))
}
