//! Brute-force reference implementations shared by the integration tests.
//! They work on the raw edge list and share no code with the library's
//! algorithms.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tspg::{IdMap, Query, TemporalEdge, TemporalGraph, Timestamp, VertexId};

pub type EdgeSet = BTreeSet<(VertexId, VertexId, Timestamp)>;

pub fn graph(n: usize, edges: &[(u32, u32, i64)]) -> TemporalGraph {
    let edges = edges.iter().map(|&(u, v, t)| TemporalEdge::new(u, v, t)).collect();
    TemporalGraph::from_edges(Arc::new(IdMap::identity(n)), edges)
}

fn by_source(g: &TemporalGraph) -> Vec<Vec<TemporalEdge>> {
    let mut out = vec![Vec::new(); g.vertex_count()];
    for e in g.edges() {
        out[e.source as usize].push(*e);
    }
    out
}

fn by_target(g: &TemporalGraph) -> Vec<Vec<TemporalEdge>> {
    let mut out = vec![Vec::new(); g.vertex_count()];
    for e in g.edges() {
        out[e.target as usize].push(*e);
    }
    out
}

/// Calls `visit` with every simple path from `from` (vertex sequence and
/// edge list) whose timestamps are strictly ascending within `[lo, hi]`,
/// never entering `avoid`. Every prefix is visited, including the empty one.
pub fn for_each_simple_path(
    g: &TemporalGraph,
    from: VertexId,
    avoid: Option<VertexId>,
    lo: Timestamp,
    hi: Timestamp,
    visit: &mut dyn FnMut(&[VertexId], &[(VertexId, VertexId, Timestamp)]),
) {
    fn go(
        out: &[Vec<TemporalEdge>],
        avoid: Option<VertexId>,
        hi: Timestamp,
        last: Timestamp,
        verts: &mut Vec<VertexId>,
        path: &mut Vec<(VertexId, VertexId, Timestamp)>,
        visit: &mut dyn FnMut(&[VertexId], &[(VertexId, VertexId, Timestamp)]),
    ) {
        visit(verts, path);
        let u = *verts.last().unwrap();
        for e in &out[u as usize] {
            if e.time <= last || e.time > hi || Some(e.target) == avoid || verts.contains(&e.target) {
                continue;
            }
            verts.push(e.target);
            path.push((e.source, e.target, e.time));
            go(out, avoid, hi, e.time, verts, path, visit);
            verts.pop();
            path.pop();
        }
    }
    let mut verts = vec![from];
    let mut path = Vec::new();
    go(&by_source(g), avoid, hi, lo - 1, &mut verts, &mut path, visit);
}

/// Reverse of [`for_each_simple_path`]: simple paths ending at `to`, with
/// timestamps strictly ascending within `[lo, hi]`, never touching `avoid`.
/// `verts` lists the path from `to` backward; `first` is the departure time
/// of its earliest edge.
pub fn for_each_simple_path_into(
    g: &TemporalGraph,
    to: VertexId,
    avoid: Option<VertexId>,
    lo: Timestamp,
    hi: Timestamp,
    visit: &mut dyn FnMut(&[VertexId], Timestamp),
) {
    fn go(
        inc: &[Vec<TemporalEdge>],
        avoid: Option<VertexId>,
        lo: Timestamp,
        next: Timestamp,
        verts: &mut Vec<VertexId>,
        visit: &mut dyn FnMut(&[VertexId], Timestamp),
    ) {
        visit(verts, next);
        let v = *verts.last().unwrap();
        for e in &inc[v as usize] {
            if e.time >= next || e.time < lo || Some(e.source) == avoid || verts.contains(&e.source) {
                continue;
            }
            verts.push(e.source);
            go(inc, avoid, lo, e.time, verts, visit);
            verts.pop();
        }
    }
    let mut verts = vec![to];
    go(&by_target(g), avoid, lo, hi + 1, &mut verts, visit);
}

/// All temporal simple `s -> t` paths as edge lists.
pub fn oracle_paths(g: &TemporalGraph, q: &Query) -> Vec<Vec<(VertexId, VertexId, Timestamp)>> {
    let mut out = Vec::new();
    for_each_simple_path(g, q.source(), None, q.begin(), q.end(), &mut |verts, path| {
        if *verts.last().unwrap() == q.target() && !path.is_empty() {
            out.push(path.to_vec());
        }
    });
    out
}

/// The tspG edge and vertex sets by exhaustive enumeration.
pub fn oracle_tspg(g: &TemporalGraph, q: &Query) -> (EdgeSet, BTreeSet<VertexId>) {
    let mut edges = EdgeSet::new();
    let mut vertices = BTreeSet::new();
    for p in oracle_paths(g, q) {
        for &(u, v, t) in &p {
            edges.insert((u, v, t));
            vertices.insert(u);
            vertices.insert(v);
        }
    }
    (edges, vertices)
}

/// Edges on some strictly ascending walk `s -> t` inside the interval whose
/// interior vertices avoid both `s` and `t`.
pub fn oracle_walk_edges(g: &TemporalGraph, q: &Query) -> EdgeSet {
    let (s, t) = (q.source(), q.target());
    let edges: Vec<TemporalEdge> = g.edges().iter().copied().filter(|e| q.contains(e.time)).collect();
    let interior = |x: VertexId| x != s && x != t;

    // Fixpoint: edge reachable from s by such a walk prefix.
    let mut from_s: HashSet<TemporalEdge> = HashSet::new();
    loop {
        let before = from_s.len();
        for e in &edges {
            if from_s.contains(e) {
                continue;
            }
            let ok = e.source == s
                || (interior(e.source) && from_s.iter().any(|p| p.target == e.source && p.time < e.time));
            if ok {
                from_s.insert(*e);
            }
        }
        if from_s.len() == before {
            break;
        }
    }
    let mut to_t: HashSet<TemporalEdge> = HashSet::new();
    loop {
        let before = to_t.len();
        for e in &edges {
            if to_t.contains(e) {
                continue;
            }
            let ok = e.target == t || (interior(e.target) && to_t.iter().any(|n| n.source == e.target && n.time > e.time));
            if ok {
                to_t.insert(*e);
            }
        }
        if to_t.len() == before {
            break;
        }
    }
    from_s.intersection(&to_t).map(|e| e.triple()).collect()
}

/// Edges on some non-decreasing `s -> t` walk within the interval.
pub fn oracle_non_decreasing_walk_edges(g: &TemporalGraph, q: &Query) -> EdgeSet {
    let edges: Vec<TemporalEdge> = g.edges().iter().copied().filter(|e| q.contains(e.time)).collect();
    let mut from_s: HashSet<TemporalEdge> = HashSet::new();
    loop {
        let before = from_s.len();
        for e in &edges {
            if !from_s.contains(e)
                && (e.source == q.source() || from_s.iter().any(|p| p.target == e.source && p.time <= e.time))
            {
                from_s.insert(*e);
            }
        }
        if from_s.len() == before {
            break;
        }
    }
    let mut to_t: HashSet<TemporalEdge> = HashSet::new();
    loop {
        let before = to_t.len();
        for e in &edges {
            if !to_t.contains(e) && (e.target == q.target() || to_t.iter().any(|n| n.source == e.target && n.time >= e.time)) {
                to_t.insert(*e);
            }
        }
        if to_t.len() == before {
            break;
        }
    }
    from_s.intersection(&to_t).map(|e| e.triple()).collect()
}

/// Earliest arrival and latest departure implied by the walk oracle, for
/// vertices other than `s` and `t`.
pub fn oracle_polarity(g: &TemporalGraph, q: &Query, u: VertexId) -> (Option<Timestamp>, Option<Timestamp>) {
    let (s, t) = (q.source(), q.target());
    let edges: Vec<TemporalEdge> = g.edges().iter().copied().filter(|e| q.contains(e.time)).collect();
    // Earliest arrival: BFS in time order over walks avoiding t (and s as an
    // interior vertex).
    let mut arrival: Vec<Option<Timestamp>> = vec![None; g.vertex_count()];
    let mut sorted = edges.clone();
    sorted.sort_by_key(|e| e.time);
    for e in &sorted {
        let usable = e.source == s || (e.source != t && arrival[e.source as usize].is_some_and(|a| a < e.time));
        if usable && e.target != s && e.target != t && arrival[e.target as usize].is_none() {
            arrival[e.target as usize] = Some(e.time);
        }
    }
    let mut departure: Vec<Option<Timestamp>> = vec![None; g.vertex_count()];
    for e in sorted.iter().rev() {
        let usable = e.target == t || (e.target != s && departure[e.target as usize].is_some_and(|d| d > e.time));
        if usable && e.source != s && e.source != t && departure[e.source as usize].is_none() {
            departure[e.source as usize] = Some(e.time);
        }
    }
    (arrival[u as usize], departure[u as usize])
}

/// TCV entries by definition, keyed by vertex then timestamp.
pub type TcvOracle = std::collections::HashMap<VertexId, Vec<(Timestamp, BTreeSet<VertexId>)>>;

fn intersect_paths(paths: &[(Timestamp, BTreeSet<VertexId>)], admit: impl Fn(Timestamp) -> bool) -> Option<BTreeSet<VertexId>> {
    let mut common: Option<BTreeSet<VertexId>> = None;
    for (_, set) in paths.iter().filter(|(time, _)| admit(*time)) {
        common = Some(match common.take() {
            None => set.clone(),
            Some(c) => c.intersection(set).copied().collect(),
        });
    }
    common
}

/// Every temporal simple path `s -> u` avoiding `t`, as (arrival time,
/// vertices other than `s`), grouped by `u`.
pub fn forward_paths_by_end(g: &TemporalGraph, q: &Query) -> TcvOracle {
    let mut out = TcvOracle::new();
    for_each_simple_path(g, q.source(), Some(q.target()), q.begin(), q.end(), &mut |verts, path| {
        if let Some(last) = path.last() {
            out.entry(last.1).or_default().push((last.2, verts[1..].iter().copied().collect()));
        }
    });
    out
}

/// Every temporal simple path `u -> t` avoiding `s`, as (departure time,
/// vertices other than `t`), grouped by `u`.
pub fn backward_paths_by_start(g: &TemporalGraph, q: &Query) -> TcvOracle {
    let mut out = TcvOracle::new();
    for_each_simple_path_into(g, q.target(), Some(q.source()), q.begin(), q.end(), &mut |verts, first| {
        if verts.len() > 1 {
            out.entry(*verts.last().unwrap()).or_default().push((first, verts[1..].iter().copied().collect()));
        }
    });
    out
}

/// Forward TCV by definition: vertices other than `s` on every temporal
/// simple path `s -> u` within `[τb, tau]` avoiding `t`. `None` when no
/// such path exists.
pub fn oracle_tcv_forward(paths: &TcvOracle, u: VertexId, tau: Timestamp) -> Option<BTreeSet<VertexId>> {
    intersect_paths(paths.get(&u)?, |time| time <= tau)
}

/// Backward TCV by definition: vertices other than `t` on every temporal
/// simple path `u -> t` within `[tau, τe]` avoiding `s`.
pub fn oracle_tcv_backward(paths: &TcvOracle, u: VertexId, tau: Timestamp) -> Option<BTreeSet<VertexId>> {
    intersect_paths(paths.get(&u)?, |time| time >= tau)
}

/// Independent path check: starts at `s`, ends at `t`, consecutive,
/// strictly ascending inside the interval, no repeated vertex, all edges in
/// `g`.
pub fn is_temporal_simple_path(g: &TemporalGraph, q: &Query, path: &[TemporalEdge]) -> bool {
    if path.is_empty() || path[0].source != q.source() || path[path.len() - 1].target != q.target() {
        return false;
    }
    let mut seen = vec![path[0].source];
    let mut last = q.begin() - 1;
    let mut at = q.source();
    for e in path {
        if e.source != at || e.time <= last || e.time > q.end() || !g.edges().contains(e) || seen.contains(&e.target) {
            return false;
        }
        seen.push(e.target);
        last = e.time;
        at = e.target;
    }
    true
}

/// One random small instance: graph plus query. About half the queries pick
/// a target the source reaches.
pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, max_t: i64, max_theta: i64) -> (TemporalGraph, Query) {
    let n = rng.gen_range(3..=max_n);
    let t_count = rng.gen_range(2..=max_t);
    let m = rng.gen_range(1..=max_m);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let u = rng.gen_range(0..n as u32);
        let mut v = rng.gen_range(0..n as u32 - 1);
        if v >= u {
            v += 1;
        }
        edges.push((u, v, rng.gen_range(1..=t_count)));
    }
    let g = graph(n, &edges);
    let theta = rng.gen_range(1..=max_theta.min(t_count));
    let tau_b = rng.gen_range(1..=t_count - theta + 1);
    let tau_e = tau_b + theta - 1;
    let s = rng.gen_range(0..n as u32);
    let mut t = rng.gen_range(0..n as u32 - 1);
    if t >= s {
        t += 1;
    }
    if rng.gen_bool(0.5) {
        let mut reach = Vec::new();
        for_each_simple_path(&g, s, None, tau_b, tau_e, &mut |verts, _| {
            let last = *verts.last().unwrap();
            if last != s && !reach.contains(&last) {
                reach.push(last);
            }
        });
        if !reach.is_empty() {
            reach.sort_unstable();
            t = reach[rng.gen_range(0..reach.len())];
        }
    }
    (g, Query::new(s, t, tau_b, tau_e).unwrap())
}

pub fn instances(seed: u64, count: usize, max_n: usize, max_m: usize, max_t: i64, max_theta: i64) -> Vec<(TemporalGraph, Query)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, max_n, max_m, max_t, max_theta)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// tspG equals the enumeration oracle.
    Equivalence,
    /// Upper bounds nest as expected.
    Containment,
    /// Every Gt edge decided exactly once, paths valid, depth bounded.
    Coverage,
    /// Batch-confirmed edges substitute into valid paths.
    Batch,
}

/// Outcome of checking one instance against the oracles.
#[derive(Debug, Default)]
pub struct Checked {
    pub violations: Vec<(Check, String)>,
    pub batch_confirmed: usize,
    pub tspg_edges: usize,
}

/// Compares the pipeline with the enumeration oracles on one instance:
/// exact tspG, the containment chain, eev coverage, and batch soundness.
pub fn check_pipeline(g: &TemporalGraph, q: &Query) -> Checked {
    use tspg::baselines::{build_tspg_by_enumeration, es_tsg, tg_tsg};
    use tspg::eev::{eev_with, EevOptions};
    use tspg::vug::{run_vug, VugOptions};

    let mut out = Checked::default();
    let mut fail = |check: Check, msg: String| out.violations.push((check, format!("{q:?}: {msg}")));

    let (oracle_edges, oracle_vertices) = oracle_tspg(g, q);
    let run = run_vug(g, q, &VugOptions { keep_stages: true, ..Default::default() }).unwrap();
    let stages = run.stages.as_ref().unwrap();
    let tspg = &run.tspg;
    if tspg.edge_set() != oracle_edges {
        fail(Check::Equivalence, format!("tspG {:?} != oracle {:?}", tspg.edge_set(), oracle_edges));
    }
    if tspg.vertices().into_iter().collect::<BTreeSet<_>>() != oracle_vertices {
        fail(Check::Equivalence, "tspG vertex set differs from oracle".into());
    }
    let projected = tspg::project(g, q);
    match build_tspg_by_enumeration(projected.graph(), q, Default::default()) {
        Ok((ep, _)) if ep.edge_set() == tspg.edge_set() && ep.vertices() == tspg.vertices() && ep.edge_set() == oracle_edges => {}
        _ => fail(Check::Equivalence, "enumeration over the projection disagrees with VUG or the oracle".into()),
    }

    // Containment chain.
    let gt = stages.gt.edge_set();
    let gq = stages.gq.edge_set();
    let tg = tg_tsg(g, q).edge_set();
    let es = es_tsg(g, q).edge_set();
    let pr = projected.edge_set();
    let all = g.edge_set();
    if !oracle_edges.is_subset(&gt) {
        fail(Check::Containment, "tspG not contained in Gt".into());
    }
    if !gt.is_subset(&gq) {
        fail(Check::Containment, "Gt not contained in Gq".into());
    }
    if gq != tg {
        fail(Check::Containment, "Gq differs from tg_tsg".into());
    }
    if gq != oracle_walk_edges(g, q) {
        fail(Check::Containment, "Gq differs from the walk oracle".into());
    }
    if !tg.is_subset(&es) {
        fail(Check::Containment, "tg_tsg not contained in es_tsg".into());
    }
    if es != oracle_non_decreasing_walk_edges(g, q) {
        fail(Check::Containment, "es_tsg differs from the non-decreasing walk oracle".into());
    }
    if !es.is_subset(&pr) || !pr.is_subset(&all) {
        fail(Check::Containment, "es_tsg / projection containment broken".into());
    }

    // Verification bookkeeping.
    let gt_graph = stages.gt.graph();
    let (_, trace) = eev_with(gt_graph, q, &EevOptions { trace: true, deadline: None }).unwrap();
    let trace = trace.unwrap();
    let confirmed: BTreeSet<_> = trace.confirmations.iter().map(|c| c.edge.triple()).collect();
    let rejected: BTreeSet<_> = trace.rejected.iter().map(|e| e.triple()).collect();
    if confirmed.len() != trace.confirmations.len() || !confirmed.is_disjoint(&rejected) {
        fail(Check::Coverage, "an edge was decided twice".into());
    }
    if confirmed.union(&rejected).copied().collect::<EdgeSet>() != gt {
        fail(Check::Coverage, "some Gt edge was neither confirmed nor rejected".into());
    }
    let searched: BTreeSet<_> = trace.searched.iter().map(|e| e.triple()).collect();
    if searched.len() != trace.searched.len() {
        fail(Check::Coverage, "an edge was searched twice".into());
    }
    if trace.max_depth as u64 > q.span() {
        fail(Check::Coverage, format!("search depth {} exceeds span {}", trace.max_depth, q.span()));
    }
    for p in &trace.paths {
        if !is_temporal_simple_path(gt_graph, q, p) {
            fail(Check::Coverage, format!("search returned an invalid path {p:?}"));
        }
    }
    for b in &trace.batches {
        let mut path = b.path.clone();
        path[b.position] = b.replacement;
        if !is_temporal_simple_path(g, q, &path) {
            fail(Check::Batch, format!("batch substitution {:?} at {} is not a temporal simple path", b.replacement, b.position));
        }
    }
    out.batch_confirmed = trace.batches.len();
    out.tspg_edges = oracle_edges.len();
    out
}

/// Compares every stored TCV entry with the definition and checks
/// anti-monotonicity and completion.
pub fn check_tcv(g: &TemporalGraph, q: &Query) -> Vec<String> {
    use tspg::tcv::Entry;

    let mut violations = Vec::new();
    let gq = tspg::quick::quick_ubg(g, q, &tspg::reachability::compute_polarity(g, q)).into_graph();
    let tables = tspg::tcv::compute_tcv(&gq, q);
    let fwd_paths = forward_paths_by_end(g, q);
    let bwd_paths = backward_paths_by_start(g, q);
    for (table, paths, forward) in [(&tables.forward, &fwd_paths, true), (&tables.backward, &bwd_paths, false)] {
        for u in 0..g.vertex_count() as VertexId {
            let mut previous: Option<BTreeSet<VertexId>> = None;
            let mut seen_singleton = false;
            for (idx, (tau, entry)) in table.entries(u).enumerate() {
                if matches!(entry, Entry::Unset) {
                    violations.push(format!("{q:?}: unset entry u={u} τ={tau}"));
                    continue;
                }
                let got: BTreeSet<VertexId> = table.set_at(u, idx).iter().copied().collect();
                let want = if forward { oracle_tcv_forward(paths, u, tau) } else { oracle_tcv_backward(paths, u, tau) };
                if want.as_ref() != Some(&got) {
                    violations.push(format!("{q:?}: forward={forward} u={u} τ={tau}: got {got:?}, want {want:?}"));
                }
                if let Some(prev) = &previous {
                    if !got.is_subset(prev) {
                        violations.push(format!("{q:?}: entries of u={u} grow at τ={tau}"));
                    }
                }
                let singleton = got.len() == 1 && got.contains(&u);
                if seen_singleton && !singleton {
                    violations.push(format!("{q:?}: u={u} left the completed state at τ={tau}"));
                }
                seen_singleton |= singleton;
                previous = Some(got);
            }
            if seen_singleton != table.is_completed(u) {
                violations.push(format!("{q:?}: completion flag of u={u} is {}", table.is_completed(u)));
            }
        }
    }
    violations
}

/// A chain `0 -> 1 -> ... -> L` with up to three parallel edges per hop,
/// plus a few random extra edges. The query runs from `0` to `L`, so found
/// paths are long and their interior hops have parallel candidates.
pub fn chain_instance(rng: &mut ChaCha8Rng) -> (TemporalGraph, Query) {
    let hops = rng.gen_range(5..=8u32);
    let n = hops as usize + 1 + rng.gen_range(0..3);
    let t_count = rng.gen_range(2 * hops as i64..=3 * hops as i64);
    let mut edges = Vec::new();
    for i in 0..hops {
        // Keep the hops roughly in time order so paths exist.
        let base = i as i64 * t_count / hops as i64 + 1;
        let width = (t_count / hops as i64).max(1) + 1;
        for _ in 0..rng.gen_range(1..=3) {
            edges.push((i, i + 1, (base + rng.gen_range(0..width)).min(t_count)));
        }
    }
    for _ in 0..rng.gen_range(0..6) {
        let u = rng.gen_range(0..n as u32);
        let mut v = rng.gen_range(0..n as u32 - 1);
        if v >= u {
            v += 1;
        }
        edges.push((u, v, rng.gen_range(1..=t_count)));
    }
    (graph(n, &edges), Query::new(0, hops, 1, t_count).unwrap())
}

pub fn chain_instances(seed: u64, count: usize) -> Vec<(TemporalGraph, Query)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| chain_instance(&mut rng)).collect()
}
