//! SteinLib / PACE `.stp` files and PACE-style solution output.
//!
//! Only the `Graph` and `Terminals` sections are interpreted. `Comment`,
//! `Coordinates` and any other section are skipped up to their `END`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Instance, SolutionTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Graph,
    Terminals,
    Other,
}

/// Parses an STP document. Vertices are 1-based in the file and 0-based in
/// the returned instance. Self-loops are dropped; duplicate edges keep the
/// smaller weight.
pub fn parse_stp(text: &str) -> Result<Instance> {
    let mut section = Section::None;
    let mut nodes: Option<(usize, usize)> = None;
    let mut declared_edges: Option<(usize, usize)> = None;
    let mut declared_terminals: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    let mut edge_records = 0usize;
    let mut terminals: Vec<usize> = Vec::new();
    let mut saw_graph = false;
    let mut saw_terminals = false;
    let mut saw_eof = false;

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap_or_default();
        let rest: Vec<&str> = tokens.collect();
        let keyword = head.to_ascii_lowercase();

        if section == Section::None {
            match keyword.as_str() {
                "section" => {
                    let name = rest
                        .first()
                        .map(|s| s.to_ascii_lowercase())
                        .unwrap_or_default();
                    section = match name.as_str() {
                        "graph" => {
                            saw_graph = true;
                            Section::Graph
                        }
                        "terminals" => {
                            saw_terminals = true;
                            Section::Terminals
                        }
                        _ => Section::Other,
                    };
                }
                "eof" => {
                    saw_eof = true;
                    break;
                }
                // magic header line, e.g. `33D32945 STP File, STP Format Version 1.0`
                _ if index == 0 || line.to_ascii_lowercase().contains("stp file") => {}
                _ => {
                    return Err(Error::parse(
                        line_no,
                        format!("unexpected `{head}` outside a section"),
                    ))
                }
            }
            continue;
        }
        if keyword == "end" {
            section = Section::None;
            continue;
        }
        match section {
            Section::Graph => match keyword.as_str() {
                "nodes" => nodes = Some((count(&rest, line_no)?, line_no)),
                "edges" => declared_edges = Some((count(&rest, line_no)?, line_no)),
                "e" => {
                    let n = nodes
                        .ok_or_else(|| Error::parse(line_no, "edge before `Nodes`"))?
                        .0;
                    if rest.len() != 3 {
                        return Err(Error::parse(line_no, "expected `E u v w`"));
                    }
                    let u = vertex(rest[0], n, line_no)?;
                    let v = vertex(rest[1], n, line_no)?;
                    let w: i128 = rest[2]
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("bad weight `{}`", rest[2])))?;
                    if w < 0 {
                        return Err(Error::parse(line_no, format!("negative weight {w}")));
                    }
                    let w = u64::try_from(w)
                        .map_err(|_| Error::parse(line_no, format!("weight {w} too large")))?;
                    edge_records += 1;
                    if u != v {
                        edges.push((u, v, w));
                    }
                }
                "a" => return Err(Error::parse(line_no, "directed arcs are not supported")),
                _ => {}
            },
            Section::Terminals => match keyword.as_str() {
                "terminals" => declared_terminals = Some((count(&rest, line_no)?, line_no)),
                "t" => {
                    let n = nodes
                        .ok_or_else(|| Error::parse(line_no, "terminal before `Nodes`"))?
                        .0;
                    let t = rest
                        .first()
                        .ok_or_else(|| Error::parse(line_no, "expected `T v`"))?;
                    terminals.push(vertex(t, n, line_no)?);
                }
                _ => {}
            },
            Section::Other | Section::None => {}
        }
    }

    let last = text.lines().count().max(1);
    if !saw_graph {
        return Err(Error::parse(last, "missing `SECTION Graph`"));
    }
    if !saw_terminals {
        return Err(Error::parse(last, "missing `SECTION Terminals`"));
    }
    if !saw_eof {
        return Err(Error::parse(last, "missing `EOF`"));
    }
    let (n, _) = nodes.ok_or_else(|| Error::parse(last, "missing `Nodes`"))?;
    if let Some((m, at)) = declared_edges {
        if m != edge_records {
            return Err(Error::parse(
                at,
                format!("declared {m} edges, found {edge_records}"),
            ));
        }
    }
    if let Some((t, at)) = declared_terminals {
        if t != terminals.len() {
            return Err(Error::parse(
                at,
                format!("declared {t} terminals, found {}", terminals.len()),
            ));
        }
    }
    Instance::new(n, edges, terminals).map_err(|e| Error::parse(last, e.to_string()))
}

fn count(rest: &[&str], line: usize) -> Result<usize> {
    rest.first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(line, "expected a count"))
}

fn vertex(token: &str, n: usize, line: usize) -> Result<usize> {
    let v: usize = token
        .parse()
        .map_err(|_| Error::parse(line, format!("bad vertex `{token}`")))?;
    if v == 0 || v > n {
        return Err(Error::parse(
            line,
            format!("vertex {v} out of range 1..={n}"),
        ));
    }
    Ok(v - 1)
}

/// Serializes an instance back into STP text.
pub fn write_stp(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str("33D32945 STP File, STP Format Version 1.0\n\n");
    out.push_str("SECTION Graph\n");
    let _ = writeln!(out, "Nodes {}", inst.vertex_count());
    let _ = writeln!(out, "Edges {}", inst.edge_count());
    for e in inst.edges() {
        let _ = writeln!(out, "E {} {} {}", e.u + 1, e.v + 1, e.weight);
    }
    out.push_str("END\n\nSECTION Terminals\n");
    let _ = writeln!(out, "Terminals {}", inst.terminals().len());
    for &t in inst.terminals() {
        let _ = writeln!(out, "T {}", t + 1);
    }
    out.push_str("END\n\nEOF\n");
    out
}

/// `VALUE <weight>` followed by one 1-based `u v` line per edge.
pub fn write_solution(inst: &Instance, sol: &SolutionTree) -> String {
    let mut out = format!("VALUE {}\n", sol.weight);
    for &e in &sol.edges {
        let edge = inst.edge(e);
        let _ = writeln!(out, "{} {}", edge.u + 1, edge.v + 1);
    }
    out
}

/// Builds the Hanan grid of a point set: every crossing of a vertical line
/// through some point with a horizontal line through some point becomes a
/// vertex, grid neighbours are joined by their axis distance, and the input
/// points are the terminals. Duplicate points collapse.
///
/// Vertex `(i, j)` (i-th distinct x, j-th distinct y) gets id `i * ny + j`.
pub fn hanan_grid_instance(points: &[(i64, i64)]) -> Result<Instance> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no points".into()));
    }
    let xs: Vec<i64> = points
        .iter()
        .map(|p| p.0)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ys: Vec<i64> = points
        .iter()
        .map(|p| p.1)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ny = ys.len();
    let id = |i: usize, j: usize| i * ny + j;
    let gap = |a: i64, b: i64| (b as i128 - a as i128) as u64;
    let mut edges = Vec::new();
    for i in 0..xs.len() {
        for j in 0..ny {
            if i + 1 < xs.len() {
                edges.push((id(i, j), id(i + 1, j), gap(xs[i], xs[i + 1])));
            }
            if j + 1 < ny {
                edges.push((id(i, j), id(i, j + 1), gap(ys[j], ys[j + 1])));
            }
        }
    }
    let terminals = points.iter().map(|&(x, y)| {
        let i = xs.binary_search(&x).expect("x present");
        let j = ys.binary_search(&y).expect("y present");
        id(i, j)
    });
    Instance::new(xs.len() * ny, edges, terminals)
}

/// Reads whitespace-separated integer coordinate pairs, one point per line.
/// Blank lines, `#` comments and lines with a single token (a point count
/// header) are ignored. `DD <id> <x> <y>` coordinate records are accepted too.
pub fn parse_points(text: &str) -> Result<Vec<(i64, i64)>> {
    let mut points = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.first().is_some_and(|t| t.eq_ignore_ascii_case("dd")) {
            tokens.drain(..2.min(tokens.len()));
        }
        match tokens.as_slice() {
            [_] => continue,
            [x, y] => {
                let parse = |s: &str| {
                    s.parse::<i64>()
                        .map_err(|_| Error::parse(index + 1, format!("bad coordinate `{s}`")))
                };
                points.push((parse(x)?, parse(y)?));
            }
            _ => return Err(Error::parse(index + 1, "expected `x y`")),
        }
    }
    Ok(points)
}
