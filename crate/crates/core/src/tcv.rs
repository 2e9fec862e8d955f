//! Time-stream common vertices.
//!
//! For every vertex `u` of `Gq` other than `s` and `t`, the forward table holds
//! one entry per distinct in-edge timestamp `τ` (ascending): the vertices other
//! than `s` lying on every temporal path `s -> u` that arrives by `τ` and
//! avoids `t`. The backward table mirrors this over out-edge timestamps
//! (descending) for paths `u -> t` that leave at or after `τ` and avoid `s`.
//!
//! Each table is filled by one pass over the time-sorted edges of `Gq`. An
//! entry is the running intersection of `TCV(tail) ∪ {head}` over the edges
//! into `head`, seeded from the previous entry. Once an entry shrinks to
//! `{head}` every later entry is `{head}` as well, so the vertex is marked
//! completed and skipped.
//!
//! Internally both directions run in "key" space: the key of a timestamp is
//! the timestamp itself going forward and its negation going backward, so the
//! same routine serves both.

use std::borrow::Cow;
use std::fmt::Write as _;

use crate::graph::{Query, TemporalGraph, Timestamp, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `TCV_τ(s, u)`, built from in-edges.
    Forward,
    /// `TCV_τ(u, t)`, built from out-edges.
    Backward,
}

impl Direction {
    #[inline]
    fn key(self, t: Timestamp) -> i64 {
        match self {
            Direction::Forward => t,
            Direction::Backward => -t,
        }
    }

    #[inline]
    fn time(self, key: i64) -> Timestamp {
        self.key(key)
    }
}

/// State of one table entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    /// Not computed yet. Never present in a finished table.
    Unset,
    /// Sorted vertex set.
    Value(Vec<VertexId>),
    /// Left untouched because the vertex completed earlier; denotes `{u}`.
    CompletedImplicit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TcvStats {
    pub edges_scanned: usize,
    pub edges_skipped_completed: usize,
    pub intersections: usize,
    /// Sum of operand sizes over all intersections.
    pub merge_work: usize,
    pub largest_set: usize,
}

/// One direction of time-stream common vertices.
#[derive(Debug, Clone)]
pub struct TcvTable {
    direction: Direction,
    offsets: Vec<usize>,
    keys: Vec<i64>,
    entries: Vec<Entry>,
    completed: Vec<bool>,
    stats: TcvStats,
}

impl TcvTable {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn stats(&self) -> TcvStats {
        self.stats
    }

    #[inline]
    fn range(&self, u: VertexId) -> std::ops::Range<usize> {
        self.offsets[u as usize]..self.offsets[u as usize + 1]
    }

    pub fn entry_count(&self, u: VertexId) -> usize {
        self.range(u).len()
    }

    pub fn is_completed(&self, u: VertexId) -> bool {
        self.completed[u as usize]
    }

    /// Stored entries of `u` in table order: ascending timestamps forward,
    /// descending backward.
    pub fn entries(&self, u: VertexId) -> impl Iterator<Item = (Timestamp, &Entry)> + '_ {
        let r = self.range(u);
        self.keys[r.clone()]
            .iter()
            .zip(&self.entries[r])
            .map(move |(&k, e)| (self.direction.time(k), e))
    }

    /// Timestamp of the `idx`-th entry of `u`.
    pub fn time_at(&self, u: VertexId, idx: usize) -> Timestamp {
        self.direction.time(self.keys[self.range(u).start + idx])
    }

    /// Decoded set of the `idx`-th entry of `u`.
    pub fn set_at(&self, u: VertexId, idx: usize) -> Cow<'_, [VertexId]> {
        decode(&self.entries[self.range(u).start + idx], u, self.completed[u as usize])
    }

    /// The set stored for exactly timestamp `t`, if `u` has an entry there.
    pub fn get(&self, u: VertexId, t: Timestamp) -> Option<Cow<'_, [VertexId]>> {
        let r = self.range(u);
        let key = self.direction.key(t);
        let idx = self.keys[r].binary_search(&key).ok()?;
        Some(self.set_at(u, idx))
    }

    /// `TCV_t` for an arbitrary `t`, read from the nearest stored entry at or
    /// before `t` (forward) or at or after `t` (backward). `None` when no
    /// path reaches that far.
    pub fn lookup(&self, u: VertexId, t: Timestamp) -> Option<Cow<'_, [VertexId]>> {
        let r = self.range(u);
        let key = self.direction.key(t);
        let n = self.keys[r].partition_point(|&k| k <= key);
        if n == 0 {
            None
        } else {
            Some(self.set_at(u, n - 1))
        }
    }

    /// Index of the last entry of `u` whose key is strictly below that of
    /// `t`: the largest in-timestamp `< t` forward, the smallest
    /// out-timestamp `> t` backward.
    pub fn strictly_before(&self, u: VertexId, t: Timestamp) -> Option<usize> {
        let r = self.range(u);
        let key = self.direction.key(t);
        self.keys[r].partition_point(|&k| k < key).checked_sub(1)
    }

    /// `u : [τ → {set}] ...`, external ids; implicit completed entries carry
    /// a trailing `*`.
    pub fn dump(&self, g: &TemporalGraph) -> String {
        let mut out = String::new();
        for u in 0..self.completed.len() as VertexId {
            if self.entry_count(u) == 0 {
                continue;
            }
            let _ = write!(out, "{} :", g.external_id(u));
            for (t, e) in self.entries(u) {
                let set = decode(e, u, self.completed[u as usize]);
                let names: Vec<String> = set.iter().map(|&w| g.external_id(w).to_string()).collect();
                let mark = if matches!(e, Entry::CompletedImplicit) { "*" } else { "" };
                let _ = write!(out, " [{} → {{{}}}{}]", t, names.join(","), mark);
            }
            out.push('\n');
        }
        out
    }
}

fn decode(entry: &Entry, u: VertexId, completed: bool) -> Cow<'_, [VertexId]> {
    match entry {
        Entry::Value(v) => Cow::Borrowed(v.as_slice()),
        Entry::CompletedImplicit => Cow::Owned(vec![u]),
        Entry::Unset => {
            assert!(completed, "read of an unfinalized entry of vertex {u}");
            Cow::Owned(vec![u])
        }
    }
}

/// Forward and backward tables for one query.
#[derive(Debug, Clone)]
pub struct TcvTables {
    pub forward: TcvTable,
    pub backward: TcvTable,
}

impl TcvTables {
    pub fn dump(&self, g: &TemporalGraph) -> String {
        format!("# forward TCV(s,u)\n{}# backward TCV(u,t)\n{}", self.forward.dump(g), self.backward.dump(g))
    }
}

/// Computes both tables over `gq`, whose edge list must be time-sorted.
pub fn compute_tcv(gq: &TemporalGraph, q: &Query) -> TcvTables {
    TcvTables {
        forward: build(gq, q, Direction::Forward),
        backward: build(gq, q, Direction::Backward),
    }
}

/// Sorted-set intersection into `out`.
fn intersect_into(a: &[VertexId], b: &[VertexId], out: &mut Vec<VertexId>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

fn insert_sorted(set: &mut Vec<VertexId>, u: VertexId) {
    if let Err(pos) = set.binary_search(&u) {
        set.insert(pos, u);
    }
}

fn build(gq: &TemporalGraph, q: &Query, direction: Direction) -> TcvTable {
    let n = gq.vertex_count();
    let (anchor, other) = match direction {
        Direction::Forward => (q.source(), q.target()),
        Direction::Backward => (q.target(), q.source()),
    };
    let edges = gq.edges();
    // (tail, head, key) in scan order: heads receive entries, tails are read.
    let scan = |i: usize| {
        let e = match direction {
            Direction::Forward => edges[i],
            Direction::Backward => edges[edges.len() - 1 - i],
        };
        match direction {
            Direction::Forward => (e.source, e.target, e.time),
            Direction::Backward => (e.target, e.source, -e.time),
        }
    };
    let has_table = |u: VertexId| u != anchor && u != other;

    // Distinct keys per head, ascending.
    let mut last = vec![i64::MIN; n];
    let mut counts = vec![0usize; n + 1];
    for i in 0..edges.len() {
        let (_, head, key) = scan(i);
        if has_table(head) && last[head as usize] != key {
            last[head as usize] = key;
            counts[head as usize + 1] += 1;
        }
    }
    for u in 0..n {
        counts[u + 1] += counts[u];
    }
    let offsets = counts;
    let total = offsets[n];
    let mut keys = vec![0i64; total];
    let mut fill = offsets.clone();
    last.iter_mut().for_each(|k| *k = i64::MIN);
    for i in 0..edges.len() {
        let (_, head, key) = scan(i);
        if has_table(head) && last[head as usize] != key {
            last[head as usize] = key;
            keys[fill[head as usize]] = key;
            fill[head as usize] += 1;
        }
    }

    let mut entries = vec![Entry::Unset; total];
    let mut completed = vec![false; n];
    let mut cursor = vec![0usize; n];
    let mut stats = TcvStats::default();
    let mut dep: Vec<VertexId> = Vec::new();
    let mut merged: Vec<VertexId> = Vec::new();

    for i in 0..edges.len() {
        let (tail, head, key) = scan(i);
        if !has_table(head) {
            continue;
        }
        if completed[head as usize] {
            stats.edges_skipped_completed += 1;
            continue;
        }
        stats.edges_scanned += 1;

        // TCV of the tail just before `key`: the tail's current entry, or
        // the one before it when the current entry is being built at `key`.
        dep.clear();
        if tail != anchor {
            let base = offsets[tail as usize];
            let mut j = cursor[tail as usize];
            debug_assert!(offsets[tail as usize + 1] > base, "tail {tail} has no entries");
            if keys[base + j] == key {
                assert!(j > 0, "tail {tail} has no entry before key {key}");
                j -= 1;
            }
            debug_assert!(keys[base + j] < key, "dependency read ahead of the scan");
            match &entries[base + j] {
                Entry::Value(v) => dep.extend_from_slice(v),
                Entry::Unset | Entry::CompletedImplicit => {
                    assert!(completed[tail as usize], "read of an unfinalized entry of vertex {tail}");
                    dep.push(tail);
                }
            }
        }
        insert_sorted(&mut dep, head);

        let base = offsets[head as usize];
        let mut idx = cursor[head as usize];
        match &entries[base + idx] {
            Entry::Unset => {
                debug_assert_eq!(keys[base + idx], key);
                entries[base + idx] = Entry::Value(dep.clone());
            }
            Entry::Value(current) => {
                intersect_into(current, &dep, &mut merged);
                stats.intersections += 1;
                stats.merge_work += current.len() + dep.len();
                if key > keys[base + idx] {
                    idx += 1;
                    cursor[head as usize] = idx;
                }
                debug_assert_eq!(keys[base + idx], key, "cursor out of step with the scan");
                entries[base + idx] = Entry::Value(merged.clone());
            }
            Entry::CompletedImplicit => unreachable!("implicit entries are only written after the scan"),
        }
        if let Entry::Value(v) = &entries[base + idx] {
            stats.largest_set = stats.largest_set.max(v.len());
            if v.len() == 1 {
                debug_assert_eq!(v[0], head);
                completed[head as usize] = true;
            }
        }
    }

    for u in 0..n {
        for e in &mut entries[offsets[u]..offsets[u + 1]] {
            if *e == Entry::Unset {
                assert!(completed[u], "entry of vertex {u} never computed");
                *e = Entry::CompletedImplicit;
            }
        }
    }

    TcvTable { direction, offsets, keys, entries, completed, stats }
}
