//! Edge-list text format.
//!
//! ```text
//! # comment
//! N 3
//! V 0 0.1 0.2
//! V 1 0.5 0.5
//! V 2 0.9 0.3
//! E 0 1 1.0
//! E 1 2 0.5
//! ```
//!
//! Indices are 0-based. Coordinate lines are optional but must cover every
//! vertex when present.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_graph(g))?;
    Ok(())
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "N {}", g.n_vertices()).unwrap();
    if let Some(coords) = g.coordinates() {
        for (v, [x, y]) in coords.iter().enumerate() {
            writeln!(out, "V {v} {x:?} {y:?}").unwrap();
        }
    }
    for e in g.edges() {
        writeln!(out, "E {} {} {:?}", e.i, e.j, e.weight).unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut coords: Vec<Option<[f64; 2]>> = Vec::new();
    let mut any_coord = false;
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let perr = |message: String| Error::Parse { line, message };
        match fields[0] {
            "N" => {
                if n.is_some() {
                    return Err(perr("duplicate N header".into()));
                }
                let [_, count] = fields[..] else {
                    return Err(perr("expected `N <n>`".into()));
                };
                let count: usize = count.parse().map_err(|e| perr(format!("bad vertex count: {e}")))?;
                n = Some(count);
                coords = vec![None; count];
            }
            "V" | "E" if n.is_none() => return Err(perr("`N <n>` header must come first".into())),
            "V" => {
                let [_, v, x, y] = fields[..] else {
                    return Err(perr("expected `V <idx> <x> <y>`".into()));
                };
                let v: usize = v.parse().map_err(|e| perr(format!("bad vertex index: {e}")))?;
                let x: f64 = x.parse().map_err(|e| perr(format!("bad coordinate: {e}")))?;
                let y: f64 = y.parse().map_err(|e| perr(format!("bad coordinate: {e}")))?;
                let slot = coords.get_mut(v).ok_or_else(|| {
                    Error::InvariantViolation(format!("coordinate for vertex {v} out of range"))
                })?;
                if slot.replace([x, y]).is_some() {
                    return Err(Error::InvariantViolation(format!("duplicate coordinates for vertex {v}")));
                }
                any_coord = true;
            }
            "E" => {
                let [_, i, j, w] = fields[..] else {
                    return Err(perr("expected `E <i> <j> <weight>`".into()));
                };
                let i: usize = i.parse().map_err(|e| perr(format!("bad vertex index: {e}")))?;
                let j: usize = j.parse().map_err(|e| perr(format!("bad vertex index: {e}")))?;
                let w: f64 = w.parse().map_err(|e| perr(format!("bad weight: {e}")))?;
                edges.push((i, j, w));
            }
            other => return Err(perr(format!("unknown record type `{other}`"))),
        }
    }

    let n = n.ok_or(Error::Parse { line: 0, message: "missing `N <n>` header".into() })?;
    let coordinates = if any_coord {
        let filled: Option<Vec<_>> = coords.into_iter().collect();
        Some(filled.ok_or_else(|| {
            Error::InvariantViolation("coordinates given for some vertices but not all".into())
        })?)
    } else {
        None
    };
    Graph::new(n, edges, coordinates)
}
