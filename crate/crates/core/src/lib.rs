//! Temporal simple path graph queries.
//!
//! Given a temporal graph, a source `s`, a target `t` and an interval
//! `[τb, τe]`, the temporal simple path graph (tspG) is the union of all
//! paths from `s` to `t` with strictly ascending timestamps inside the
//! interval that never repeat a vertex.
//!
//! The main entry point is [`vug::vug`], which narrows the graph in stages
//! ([`reachability`], [`quick`], [`tcv`], [`tight`]) and then verifies the
//! remaining edges exactly ([`eev`]). [`baselines`] holds the simpler upper
//! bounds and the enumeration-based construction used as a reference.

pub mod baselines;
pub mod eev;
pub mod error;
pub mod graph;
pub mod io;
pub mod quick;
pub mod reachability;
pub mod synth;
pub mod tcv;
pub mod tight;
pub mod vug;
pub mod workload;

pub use error::{Error, QueryError, Result};
pub use graph::{project, stats, EdgeId, GraphStats, IdMap, Query, ResultGraph, TemporalEdge, TemporalGraph, Timestamp, VertexId};
pub use vug::{run_vug, vug, VugOptions, VugOutput};
