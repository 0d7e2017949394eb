//! Instance files.
//!
//! ```text
//! c optional comments
//! p mwss <n> <m>
//! v <id> <weight>     ids 1..n, nodes without a line weigh 1
//! e <u> <v>           u < v, each edge once
//! ```

use std::collections::HashSet;

use mwss_core::{Weight, WeightedGraph};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

pub fn parse(text: &str) -> Result<WeightedGraph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut weights = Vec::new();
    let mut weighted = Vec::new();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut it = raw.split_whitespace();
        let Some(kind) = it.next() else { continue };
        let fields: Vec<&str> = it.collect();
        let num = |s: &str| s.parse::<i64>().or_else(|_| err(line, format!("bad number {s:?}")));
        match kind {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return err(line, "second header");
                }
                if fields.len() != 3 || fields[0] != "mwss" {
                    return err(line, "expected `p mwss <n> <m>`");
                }
                let (n, m) = (num(fields[1])?, num(fields[2])?);
                if n < 0 || m < 0 {
                    return err(line, "negative count");
                }
                header = Some((n as usize, m as usize));
                weights = vec![1; n as usize];
                weighted = vec![false; n as usize];
            }
            "v" | "e" => {
                let Some((n, _)) = header else {
                    return err(line, "data before the header");
                };
                if fields.len() != 2 {
                    return err(line, format!("expected `{kind} <a> <b>`"));
                }
                let (a, b) = (num(fields[0])?, num(fields[1])?);
                let id = |x: i64| {
                    if x < 1 || x as usize > n {
                        err(line, format!("id {x} out of range 1..{n}"))
                    } else {
                        Ok(x as usize - 1)
                    }
                };
                if kind == "v" {
                    let v = id(a)?;
                    if b < 0 {
                        return err(line, format!("negative weight {b}"));
                    }
                    if weighted[v] {
                        return err(line, format!("second weight for node {a}"));
                    }
                    weighted[v] = true;
                    weights[v] = b as Weight;
                } else {
                    let (u, v) = (id(a)?, id(b)?);
                    if u == v {
                        return err(line, format!("loop at {a}"));
                    }
                    let key = (u.min(v), u.max(v));
                    if !seen.insert(key) {
                        return err(line, format!("duplicate edge {a} {b}"));
                    }
                    edges.push(key);
                }
            }
            other => return err(line, format!("unknown line type {other:?}")),
        }
    }
    let Some((_, m)) = header else {
        return err(0, "missing header");
    };
    if edges.len() != m {
        return err(0, format!("header says {m} edges, found {}", edges.len()));
    }
    Ok(WeightedGraph::from_edges(weights, &edges))
}

/// Canonical text: every weight listed, edges sorted.
pub fn render(g: &WeightedGraph) -> String {
    let mut edges: Vec<(usize, usize)> = g.edges().map(|(u, v)| (u.min(v), u.max(v))).collect();
    edges.sort_unstable();
    let mut out = format!("p mwss {} {}\n", g.node_count(), edges.len());
    for v in g.nodes() {
        out += &format!("v {} {}\n", v + 1, g.weight(v));
    }
    for (u, v) in edges {
        out += &format!("e {} {}\n", u + 1, v + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_unit() {
        let g = parse("p mwss 2 1\ne 1 2\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert!(g.has_edge(0, 1));
        assert_eq!(g.weight(0), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(parse("c x\np mwss 1 0\nv 1 -3\n").unwrap_err().line, 3);
        assert_eq!(parse("p mwss 2 2\ne 1 2\ne 2 1\n").unwrap_err().line, 3);
        assert_eq!(parse("p mwss 2 1\ne 1 3\n").unwrap_err().line, 2);
        assert!(parse("e 1 2\n").is_err());
    }
}
