//! Edge-list ingestion and result export.
//!
//! Input is whitespace-separated `u v t` lines (SNAP/KONECT style). Lines
//! starting with `#` or `%` are comments, except `#!alias <name> <id>`, which
//! binds a symbolic vertex name to an external id.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{timestamp_in_range, IdMap, ResultGraph, TemporalEdge, TemporalGraph, Timestamp};

const ALIAS_DIRECTIVE: &str = "#!alias";

#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Zero-based column holding the timestamp; KONECT files with a weight
    /// column use 3.
    pub time_column: usize,
    /// Accept a file with no edges.
    pub allow_empty: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { time_column: 2, allow_empty: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines: usize,
    pub edges: usize,
    pub duplicates_dropped: usize,
    pub self_loops_dropped: usize,
    /// Symbolic names declared with `#!alias`.
    pub aliases: HashMap<String, u64>,
}

impl LoadReport {
    /// Resolves a CLI vertex argument: an alias name or a numeric external id.
    pub fn resolve(&self, name: &str) -> Option<u64> {
        self.aliases.get(name).copied().or_else(|| name.parse().ok())
    }
}

pub fn load_edge_list<R: BufRead>(reader: R, options: &LoadOptions) -> Result<(TemporalGraph, LoadReport)> {
    let mut report = LoadReport::default();
    let mut raw: Vec<(u64, u64, Timestamp)> = Vec::new();
    let needed = options.time_column.max(1) + 1;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        report.lines = lineno;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix(ALIAS_DIRECTIVE) {
            let mut parts = rest.split_whitespace();
            match (parts.next(), parts.next().map(str::parse::<u64>)) {
                (Some(name), Some(Ok(id))) => {
                    report.aliases.insert(name.to_string(), id);
                }
                _ => {
                    return Err(Error::Parse { line: lineno, message: "malformed alias directive".into() });
                }
            }
            continue;
        }
        if trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < needed {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected at least {needed} fields, found {}", fields.len()),
            });
        }
        let vertex = |i: usize| {
            fields[i].parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid vertex id {:?}", fields[i]),
            })
        };
        let u = vertex(0)?;
        let v = vertex(1)?;
        let time_field = fields[options.time_column];
        let t: Timestamp = time_field.parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("invalid timestamp {time_field:?}"),
        })?;
        if !timestamp_in_range(t) {
            return Err(Error::Parse { line: lineno, message: format!("timestamp {t} too close to the integer limits") });
        }
        if u == v {
            report.self_loops_dropped += 1;
            continue;
        }
        raw.push((u, v, t));
    }

    if raw.is_empty() && !options.allow_empty {
        return Err(Error::EmptyGraph);
    }

    let ids = IdMap::new(raw.iter().flat_map(|&(u, v, _)| [u, v]).collect());
    let edges: Vec<TemporalEdge> = raw
        .iter()
        .map(|&(u, v, t)| TemporalEdge::new(ids.internal(u).unwrap(), ids.internal(v).unwrap(), t))
        .collect();
    let before = edges.len();
    let g = TemporalGraph::from_edges(Arc::new(ids), edges);
    report.duplicates_dropped = before - g.edge_count();
    report.edges = g.edge_count();
    Ok((g, report))
}

/// Parses an in-memory edge list with default options.
pub fn parse_edge_list(text: &str) -> Result<(TemporalGraph, LoadReport)> {
    load_edge_list(text.as_bytes(), &LoadOptions::default())
}

/// Writes one `u v t` line per edge in `(t, u, v)` order, external ids.
pub fn write_edge_list<W: Write>(g: &TemporalGraph, mut out: W) -> std::io::Result<()> {
    for e in g.edges() {
        writeln!(out, "{} {} {}", g.external_id(e.source), g.external_id(e.target), e.time)?;
    }
    Ok(())
}

/// Graphviz rendering; edge labels carry timestamps.
pub fn write_dot<W: Write>(result: &ResultGraph, name: &str, mut out: W) -> std::io::Result<()> {
    let g = result.graph();
    writeln!(out, "digraph {name} {{")?;
    for u in result.vertices() {
        writeln!(out, "  {};", g.external_id(u))?;
    }
    for e in g.edges() {
        writeln!(out, "  {} -> {} [label=\"{}\"];", g.external_id(e.source), g.external_id(e.target), e.time)?;
    }
    writeln!(out, "}}")
}

#[derive(Serialize)]
struct JsonEdge {
    u: u64,
    v: u64,
    t: Timestamp,
}

#[derive(Serialize)]
struct JsonGraph {
    nodes: Vec<u64>,
    edges: Vec<JsonEdge>,
}

/// `{"nodes":[ids],"edges":[{"u":..,"v":..,"t":..}]}` with external ids.
pub fn to_json(result: &ResultGraph) -> String {
    let g = result.graph();
    let doc = JsonGraph {
        nodes: result.vertices().into_iter().map(|u| g.external_id(u)).collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| JsonEdge { u: g.external_id(e.source), v: g.external_id(e.target), t: e.time })
            .collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn drops_duplicates_and_self_loops() {
        let (g, report) = parse_edge_list("0 1 2\n0 1 2\n1 1 5\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].triple(), (0, 1, 2));
        assert_eq!(report.duplicates_dropped, 1);
        assert_eq!(report.self_loops_dropped, 1);
    }

    #[test]
    fn reports_line_of_bad_token() {
        match parse_edge_list("a b 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list("# header\n0 1 2\n0 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_edge_list("% only a comment\n"), Err(Error::EmptyGraph)));
        assert!(matches!(parse_edge_list("3 3 1\n"), Err(Error::EmptyGraph)));
        let opts = LoadOptions { allow_empty: true, ..Default::default() };
        assert!(load_edge_list("".as_bytes(), &opts).is_ok());
    }

    #[test]
    fn rejects_extreme_timestamps() {
        let line = format!("0 1 {}\n", i64::MAX);
        assert!(matches!(parse_edge_list(&line), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn sparse_ids_are_remapped() {
        let (g, _) = parse_edge_list("100 7 1\n7 5000 2\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.internal_id(7), Some(0));
        assert_eq!(g.external_id(2), 5000);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "100 7 1\n7 5000 2\n");
    }

    #[test]
    fn alias_directives_and_konect_columns() {
        let (_, report) = parse_edge_list("#!alias s 4\n4 9 1\n").unwrap();
        assert_eq!(report.resolve("s"), Some(4));
        assert_eq!(report.resolve("9"), Some(9));
        assert_eq!(report.resolve("zz"), None);
        let opts = LoadOptions { time_column: 3, ..Default::default() };
        let (g, _) = load_edge_list("1 2 1 1700000000\n".as_bytes(), &opts).unwrap();
        assert_eq!(g.edges()[0].time, 1_700_000_000);
    }

    #[test]
    fn dot_and_json_use_external_ids() {
        let (g, _) = parse_edge_list("10 20 3\n20 30 4\n").unwrap();
        let r = ResultGraph::new(g);
        assert_eq!(to_json(&r), r#"{"nodes":[10,20,30],"edges":[{"u":10,"v":20,"t":3},{"u":20,"v":30,"t":4}]}"#);
        let mut buf = Vec::new();
        write_dot(&r, "tspg", &mut buf).unwrap();
        let dot = String::from_utf8(buf).unwrap();
        assert!(dot.contains("10 -> 20 [label=\"3\"];"));
    }

    proptest! {
        #[test]
        fn export_then_load_is_canonical(edges in prop::collection::vec((0u64..12, 0u64..12, -50i64..50), 1..60)) {
            let text: String = edges.iter().map(|(u, v, t)| format!("{u} {v} {t}\n")).collect();
            match parse_edge_list(&text) {
                Ok((g, _)) => {
                    let mut buf = Vec::new();
                    write_edge_list(&g, &mut buf).unwrap();
                    let (h, report) = parse_edge_list(std::str::from_utf8(&buf).unwrap()).unwrap();
                    prop_assert_eq!(report.duplicates_dropped, 0);
                    let ext = |g: &TemporalGraph| g.edges().iter()
                        .map(|e| (g.external_id(e.source), g.external_id(e.target), e.time))
                        .collect::<Vec<_>>();
                    prop_assert_eq!(ext(&g), ext(&h));
                    let mut expected: Vec<_> = edges.iter().filter(|(u, v, _)| u != v).map(|&(u, v, t)| (t, u, v)).collect();
                    expected.sort();
                    expected.dedup();
                    let got: Vec<_> = ext(&h).into_iter().map(|(u, v, t)| (t, u, v)).collect();
                    prop_assert_eq!(got, expected);
                }
                Err(Error::EmptyGraph) => prop_assert!(edges.iter().all(|(u, v, _)| u == v)),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
