//! The full query pipeline: polarity times, quick upper bound, TCV tables,
//! tight upper bound, then escaped-edges verification.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::eev::{eev_with, EevOptions, EevTrace, TimedOut};
use crate::graph::{Query, ResultGraph, TemporalGraph};
use crate::quick::quick_ubg;
use crate::reachability::{compute_polarity, PolarityTimes};
use crate::tcv::{compute_tcv, TcvTables};
use crate::tight::tight_ubg;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimes {
    pub polarity: Duration,
    pub quick: Duration,
    pub tcv: Duration,
    pub tight: Duration,
    pub eev: Duration,
}

impl StageTimes {
    /// Polarity plus quick upper-bound construction.
    pub fn quick_total(&self) -> Duration {
        self.polarity + self.quick
    }

    /// TCV tables plus tight upper-bound construction.
    pub fn tight_total(&self) -> Duration {
        self.tcv + self.tight
    }

    pub fn total(&self) -> Duration {
        self.quick_total() + self.tight_total() + self.eev
    }
}

#[derive(Debug, Clone, Default)]
pub struct VugOptions {
    /// Keep polarity times, `Gq`, TCV tables and `Gt` in the output.
    pub keep_stages: bool,
    pub trace: bool,
    pub deadline: Option<Instant>,
}

/// Intermediate results, kept on request.
#[derive(Debug, Clone)]
pub struct Stages {
    pub polarity: PolarityTimes,
    pub gq: ResultGraph,
    pub tcv: TcvTables,
    pub gt: ResultGraph,
}

#[derive(Debug, Clone)]
pub struct VugOutput {
    pub tspg: ResultGraph,
    pub gq_edges: usize,
    pub gt_edges: usize,
    pub times: StageTimes,
    pub stages: Option<Stages>,
    pub trace: Option<EevTrace>,
}

/// The temporal simple path graph of `q`.
pub fn vug(g: &TemporalGraph, q: &Query) -> ResultGraph {
    run_vug(g, q, &VugOptions::default()).expect("no deadline set").tspg
}

fn check(deadline: Option<Instant>) -> Result<(), TimedOut> {
    match deadline {
        Some(d) if Instant::now() >= d => Err(TimedOut),
        _ => Ok(()),
    }
}

pub fn run_vug(g: &TemporalGraph, q: &Query, options: &VugOptions) -> Result<VugOutput, TimedOut> {
    let mut times = StageTimes::default();

    let clock = Instant::now();
    let polarity = compute_polarity(g, q);
    times.polarity = clock.elapsed();

    let clock = Instant::now();
    let gq = quick_ubg(g, q, &polarity);
    times.quick = clock.elapsed();
    check(options.deadline)?;

    let clock = Instant::now();
    let tcv = compute_tcv(gq.graph(), q);
    times.tcv = clock.elapsed();
    check(options.deadline)?;

    let clock = Instant::now();
    let gt = tight_ubg(gq.graph(), q, &tcv);
    times.tight = clock.elapsed();
    check(options.deadline)?;

    let clock = Instant::now();
    let eev_options = EevOptions { trace: options.trace, deadline: options.deadline };
    let (tspg, trace) = eev_with(gt.graph(), q, &eev_options)?;
    times.eev = clock.elapsed();

    log::debug!(
        "query {}->{} [{},{}]: |Gq|={} |Gt|={} |tspG|={} in {:?}",
        q.source(),
        q.target(),
        q.begin(),
        q.end(),
        gq.edge_count(),
        gt.edge_count(),
        tspg.edge_count(),
        times.total()
    );

    Ok(VugOutput {
        gq_edges: gq.edge_count(),
        gt_edges: gt.edge_count(),
        tspg,
        times,
        stages: options.keep_stages.then_some(Stages { polarity, gq, tcv, gt }),
        trace,
    })
}

/// Builds only `Gq` and `Gt`, for timing the upper-bound stages.
pub fn upper_bounds(g: &TemporalGraph, q: &Query) -> (ResultGraph, ResultGraph) {
    let gq = quick_ubg(g, q, &compute_polarity(g, q));
    let gt = tight_ubg(gq.graph(), q, &compute_tcv(gq.graph(), q));
    (gq, gt)
}
