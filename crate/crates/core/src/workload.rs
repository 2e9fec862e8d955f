//! Random query workloads and the experiment runner comparing the
//! enumeration-based constructions with the verification pipeline.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::baselines::{build_tspg_by_enumeration, count_tsp, dt_tsg, es_tsg, tg_tsg, EnumerationLimits};
use crate::error::{Error, Result};
use crate::graph::{Query, ResultGraph, TemporalGraph, Timestamp, VertexId};
use crate::reachability::earliest_arrivals;
use crate::synth::rng;
use crate::vug::{run_vug, VugOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Enumeration over the interval projection.
    EpDt,
    /// Enumeration over the non-decreasing-walk bound.
    EpEs,
    /// Enumeration over the strict temporal-path bound.
    EpTg,
    Vug,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::EpDt, Method::EpEs, Method::EpTg, Method::Vug];

    pub fn name(self) -> &'static str {
        match self {
            Method::EpDt => "EPdtTSG",
            Method::EpEs => "EPesTSG",
            Method::EpTg => "EPtgTSG",
            Method::Vug => "VUG",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?} (expected EPdtTSG, EPesTSG, EPtgTSG or VUG)")))
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkloadSpec {
    pub query_count: usize,
    /// Interval span `τe - τb + 1`.
    pub theta: u64,
    pub seed: u64,
    /// Only emit queries where `s` temporally reaches `t` within the interval.
    pub reachability_filter: bool,
    /// Samples of `(s, τb)` tried per query before giving up.
    pub max_attempts: usize,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec { query_count: 100, theta: 6, seed: 0, reachability_filter: true, max_attempts: 10_000 }
    }
}

/// Samples `spec.query_count` queries: `s` and `τb` uniformly, then `t`
/// uniformly among the vertices `s` reaches in `[τb, τb + θ - 1]`.
pub fn generate_queries(g: &TemporalGraph, spec: &WorkloadSpec) -> Result<Vec<Query>> {
    if spec.theta == 0 {
        return Err(Error::Workload("theta must be at least 1".into()));
    }
    let Some((lo, hi)) = g.time_range() else {
        return Err(Error::Workload("graph has no edges".into()));
    };
    let span = (hi as i128 - lo as i128 + 1) as u128;
    if spec.theta as u128 > span {
        return Err(Error::Workload(format!("theta {} exceeds the graph's timestamp span {span}", spec.theta)));
    }
    if g.vertex_count() < 2 {
        return Err(Error::Workload("graph needs at least two vertices".into()));
    }
    let theta = spec.theta as Timestamp;
    let n = g.vertex_count() as VertexId;
    let mut rng = rng(spec.seed);
    let mut queries = Vec::with_capacity(spec.query_count);
    let mut candidates = Vec::new();
    while queries.len() < spec.query_count {
        let mut accepted = None;
        for _ in 0..spec.max_attempts.max(1) {
            let s = rng.gen_range(0..n);
            let tau_b = rng.gen_range(lo..=hi - theta + 1);
            let tau_e = tau_b + theta - 1;
            candidates.clear();
            if spec.reachability_filter {
                let arrivals = earliest_arrivals(g, s, tau_b, tau_e);
                candidates.extend((0..n).filter(|&v| arrivals[v as usize].is_reached()));
            } else {
                candidates.extend((0..n).filter(|&v| v != s));
            }
            if let Some(&t) = candidates.choose(&mut rng) {
                accepted = Some(Query::new(s, t, tau_b, tau_e)?);
                break;
            }
        }
        match accepted {
            Some(q) => queries.push(q),
            None => {
                return Err(Error::Workload(format!(
                    "no reachable query with theta={} found in {} attempts (seed {})",
                    spec.theta, spec.max_attempts, spec.seed
                )))
            }
        }
    }
    Ok(queries)
}

/// Reads `s t τb τe` lines with external vertex ids; `#` starts a comment.
pub fn read_queries<R: BufRead>(g: &TemporalGraph, reader: R) -> Result<Vec<Query>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.split('#').next().unwrap().trim();
        if text.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: idx + 1, message };
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(format!("expected `s t tau_b tau_e`, found {} fields", fields.len())));
        }
        let id = |i: usize| fields[i].parse::<u64>().map_err(|_| parse_err(format!("invalid vertex id {:?}", fields[i])));
        let time = |i: usize| fields[i].parse::<Timestamp>().map_err(|_| parse_err(format!("invalid timestamp {:?}", fields[i])));
        let q = Query::from_external(g, id(0)?, id(1)?, time(2)?, time(3)?).map_err(|e| parse_err(e.to_string()))?;
        out.push(q);
    }
    Ok(out)
}

pub fn write_queries<W: Write>(g: &TemporalGraph, queries: &[Query], mut out: W) -> std::io::Result<()> {
    for q in queries {
        writeln!(out, "{} {} {} {}", g.external_id(q.source()), g.external_id(q.target()), q.begin(), q.end())?;
    }
    Ok(())
}

/// Wall time of a run, or a timeout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Timing {
    Done(Duration),
    Inf,
}

impl Timing {
    pub fn millis(self) -> Option<f64> {
        match self {
            Timing::Done(d) => Some(d.as_secs_f64() * 1e3),
            Timing::Inf => None,
        }
    }

    pub fn is_inf(self) -> bool {
        self == Timing::Inf
    }
}

impl fmt::Display for Timing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.millis() {
            Some(ms) => write!(f, "{ms:.3}"),
            None => f.write_str("INF"),
        }
    }
}

impl Serialize for Timing {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.millis() {
            Some(ms) => s.serialize_f64(ms),
            None => s.serialize_str("INF"),
        }
    }
}

/// Upper-bound ratio `|E(tspG)| / |E(ubg)|`, with `0/0 = 1`.
pub fn upper_bound_ratio(tspg_edges: usize, ubg_edges: usize) -> f64 {
    if ubg_edges == 0 {
        1.0
    } else {
        tspg_edges as f64 / ubg_edges as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Ratios {
    pub project: f64,
    pub es: f64,
    pub tg: f64,
    pub gq: f64,
    pub gt: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EdgeCounts {
    pub project: usize,
    pub es: usize,
    pub tg: usize,
    pub gq: usize,
    pub gt: usize,
    pub tspg: Option<usize>,
}

impl EdgeCounts {
    pub fn ratios(&self) -> Option<Ratios> {
        let k = self.tspg?;
        Some(Ratios {
            project: upper_bound_ratio(k, self.project),
            es: upper_bound_ratio(k, self.es),
            tg: upper_bound_ratio(k, self.tg),
            gq: upper_bound_ratio(k, self.gq),
            gt: upper_bound_ratio(k, self.gt),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodRun {
    pub method: Method,
    /// Edges of the upper-bound graph the method starts from (`Gt` for VUG).
    pub ubg_edges: usize,
    pub tspg_edges: Option<usize>,
    pub time_ms: Timing,
}

/// VUG stage times in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageMillis {
    pub quick: f64,
    pub tcv_tight: f64,
    pub eev: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryReport {
    pub index: usize,
    pub source: u64,
    pub target: u64,
    pub tau_b: Timestamp,
    pub tau_e: Timestamp,
    pub edges: EdgeCounts,
    /// Temporal simple path count, when requested and finished in time.
    pub paths: Option<u64>,
    pub ratios: Option<Ratios>,
    pub vug_stages: Option<StageMillis>,
    pub methods: Vec<MethodRun>,
    /// All finished methods produced the same edge set.
    pub consistent: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub methods: Vec<Method>,
    /// Budget per (query, method).
    pub timeout: Duration,
    pub count_paths: bool,
    /// Worker threads; 1 runs sequentially.
    pub jobs: usize,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions { methods: Method::ALL.to_vec(), timeout: Duration::from_secs(60), count_paths: false, jobs: 1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub completed: usize,
    pub timeouts: usize,
    /// Sum over queries; INF if any query timed out.
    pub total_ms: Timing,
    /// Mean over completed queries.
    pub mean_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub queries: usize,
    pub methods: Vec<MethodSummary>,
    /// Mean upper-bound ratios over queries with a known tspG.
    pub mean_ratios: Option<Ratios>,
    pub mean_tspg_edges: Option<f64>,
    pub total_paths: Option<u64>,
    pub inconsistent: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub queries: Vec<QueryReport>,
    pub aggregate: Aggregate,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let clock = Instant::now();
    let out = f();
    (out, clock.elapsed())
}

fn run_query(g: &TemporalGraph, index: usize, q: &Query, options: &ExperimentOptions) -> QueryReport {
    let (project, t_project) = timed(|| dt_tsg(g, q));
    let (es, t_es) = timed(|| es_tsg(g, q));
    let (tg, t_tg) = timed(|| tg_tsg(g, q));

    let mut edges = EdgeCounts { project: project.edge_count(), es: es.edge_count(), tg: tg.edge_count(), ..Default::default() };
    let mut methods = Vec::new();
    let mut results: Vec<BTreeSet<_>> = Vec::new();
    let mut vug_stages = None;
    let mut vug_tspg: Option<ResultGraph> = None;

    // Gq and Gt sizes are reported even when VUG itself is not selected.
    let vug_run = run_vug(g, q, &VugOptions { keep_stages: true, deadline: Some(Instant::now() + options.timeout), ..Default::default() });
    let gt_for_paths = match &vug_run {
        Ok(out) => {
            edges.gq = out.gq_edges;
            edges.gt = out.gt_edges;
            vug_tspg = Some(out.tspg.clone());
            out.stages.as_ref().unwrap().gt.clone()
        }
        Err(_) => {
            let (gq, gt) = crate::vug::upper_bounds(g, q);
            edges.gq = gq.edge_count();
            edges.gt = gt.edge_count();
            gt
        }
    };

    for &method in &options.methods {
        let run = match method {
            Method::Vug => {
                let (tspg_edges, time_ms) = match &vug_run {
                    Ok(out) => {
                        vug_stages = Some(StageMillis {
                            quick: out.times.quick_total().as_secs_f64() * 1e3,
                            tcv_tight: out.times.tight_total().as_secs_f64() * 1e3,
                            eev: out.times.eev.as_secs_f64() * 1e3,
                        });
                        results.push(out.tspg.edge_set());
                        (Some(out.tspg.edge_count()), Timing::Done(out.times.total()))
                    }
                    Err(_) => (None, Timing::Inf),
                };
                MethodRun { method, ubg_edges: edges.gt, tspg_edges, time_ms }
            }
            _ => {
                let (ubg, build_time) = match method {
                    Method::EpDt => (&project, t_project),
                    Method::EpEs => (&es, t_es),
                    _ => (&tg, t_tg),
                };
                let limits = EnumerationLimits { max_paths: None, deadline: Some(Instant::now() + options.timeout.saturating_sub(build_time)) };
                let (out, enum_time) = timed(|| build_tspg_by_enumeration(ubg.graph(), q, limits));
                match out {
                    Ok((tspg, _)) => {
                        results.push(tspg.edge_set());
                        if vug_tspg.is_none() {
                            vug_tspg = Some(tspg.clone());
                        }
                        MethodRun {
                            method,
                            ubg_edges: ubg.edge_count(),
                            tspg_edges: Some(tspg.edge_count()),
                            time_ms: Timing::Done(build_time + enum_time),
                        }
                    }
                    Err(_) => MethodRun { method, ubg_edges: ubg.edge_count(), tspg_edges: None, time_ms: Timing::Inf },
                }
            }
        };
        methods.push(run);
    }

    edges.tspg = vug_tspg.as_ref().map(ResultGraph::edge_count);
    let paths = if options.count_paths {
        let run = count_tsp(gt_for_paths.graph(), q, EnumerationLimits { max_paths: None, deadline: Some(Instant::now() + options.timeout) });
        run.is_complete().then_some(run.paths)
    } else {
        None
    };
    let consistent = results.windows(2).all(|w| w[0] == w[1]);
    if !consistent {
        log::warn!("query {index}: methods disagree on the tspG");
    }

    QueryReport {
        index,
        source: g.external_id(q.source()),
        target: g.external_id(q.target()),
        tau_b: q.begin(),
        tau_e: q.end(),
        ratios: edges.ratios(),
        edges,
        paths,
        vug_stages,
        methods,
        consistent,
    }
}

fn aggregate(reports: &[QueryReport], methods: &[Method]) -> Aggregate {
    let summaries = methods
        .iter()
        .map(|&method| {
            let runs: Vec<&MethodRun> = reports.iter().flat_map(|r| r.methods.iter().filter(move |m| m.method == method)).collect();
            let done: Vec<f64> = runs.iter().filter_map(|r| r.time_ms.millis()).collect();
            let timeouts = runs.len() - done.len();
            let sum: f64 = done.iter().sum();
            MethodSummary {
                method,
                completed: done.len(),
                timeouts,
                total_ms: if timeouts > 0 { Timing::Inf } else { Timing::Done(Duration::from_secs_f64(sum / 1e3)) },
                mean_ms: (!done.is_empty()).then(|| sum / done.len() as f64),
            }
        })
        .collect();

    let ratios: Vec<Ratios> = reports.iter().filter_map(|r| r.ratios).collect();
    let mean_ratios = (!ratios.is_empty()).then(|| {
        let k = ratios.len() as f64;
        let mean = |f: fn(&Ratios) -> f64| ratios.iter().map(f).sum::<f64>() / k;
        Ratios { project: mean(|r| r.project), es: mean(|r| r.es), tg: mean(|r| r.tg), gq: mean(|r| r.gq), gt: mean(|r| r.gt) }
    });
    let tspg: Vec<usize> = reports.iter().filter_map(|r| r.edges.tspg).collect();
    let total_paths = reports.iter().map(|r| r.paths).sum::<Option<u64>>().filter(|_| !reports.is_empty());

    Aggregate {
        queries: reports.len(),
        methods: summaries,
        mean_ratios,
        mean_tspg_edges: (!tspg.is_empty()).then(|| tspg.iter().sum::<usize>() as f64 / tspg.len() as f64),
        total_paths,
        inconsistent: reports.iter().filter(|r| !r.consistent).count(),
    }
}

/// Runs every query with every selected method. Timeouts are recorded as
/// [`Timing::Inf`], never reported as failures.
pub fn run_experiment(g: &TemporalGraph, queries: &[Query], options: &ExperimentOptions) -> Result<ExperimentReport> {
    let reports: Vec<QueryReport> = if options.jobs <= 1 {
        queries.iter().enumerate().map(|(i, q)| run_query(g, i, q, options)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| Error::Workload(format!("cannot start worker pool: {e}")))?;
        pool.install(|| queries.par_iter().enumerate().map(|(i, q)| run_query(g, i, q, options)).collect())
    };
    let aggregate = aggregate(&reports, &options.methods);
    Ok(ExperimentReport { queries: reports, aggregate })
}

#[derive(Serialize)]
struct CsvRow {
    query: usize,
    source: u64,
    target: u64,
    tau_b: Timestamp,
    tau_e: Timestamp,
    method: Method,
    ubg_edges: usize,
    tspg_edges: Option<usize>,
    paths: Option<u64>,
    status: &'static str,
    time_ms: Option<String>,
    quick_ms: Option<String>,
    tcv_tight_ms: Option<String>,
    eev_ms: Option<String>,
}

/// One row per (query, method). Timing columns come last so runs can be
/// compared by cutting them off.
pub fn write_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let ms = |x: f64| format!("{x:.3}");
    for q in &report.queries {
        for run in &q.methods {
            let stages = if run.method == Method::Vug { q.vug_stages } else { None };
            w.serialize(CsvRow {
                query: q.index,
                source: q.source,
                target: q.target,
                tau_b: q.tau_b,
                tau_e: q.tau_e,
                method: run.method,
                ubg_edges: run.ubg_edges,
                tspg_edges: run.tspg_edges,
                paths: q.paths,
                status: if run.time_ms.is_inf() { "timeout" } else { "ok" },
                time_ms: Some(run.time_ms.to_string()),
                quick_ms: stages.map(|s| ms(s.quick)),
                tcv_tight_ms: stages.map(|s| ms(s.tcv_tight)),
                eev_ms: stages.map(|s| ms(s.eev)),
            })
            .map_err(|e| Error::Workload(format!("csv: {e}")))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(report: &ExperimentReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// Average upper-bound ratios, one row per upper-bound graph.
pub fn ratio_table(dataset: &str, aggregate: &Aggregate) -> String {
    let mut out = format!("{:<10} {:>10}\n", "ubg", dataset);
    let Some(r) = aggregate.mean_ratios else {
        out.push_str("(no completed queries)\n");
        return out;
    };
    for (name, value) in [("dtTSG", r.project), ("esTSG", r.es), ("tgTSG", r.tg), ("QuickUBG", r.gq), ("TightUBG", r.gt)] {
        out.push_str(&format!("{name:<10} {:>9.2}%\n", value * 100.0));
    }
    out
}
