//! Plain-text edge lists.
//!
//! One edge per line, `u v` or `u v w`. Lines starting with `#` are comments.
//! A comment of the form `# nodes: N` is honoured as a lower bound on the
//! node count so that trailing isolated nodes survive a round trip.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

const NODES_DIRECTIVE: &str = "nodes:";

pub fn load_edge_list<R: BufRead>(source: R) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut declared = 0usize;
    let mut max_id: Option<usize> = None;

    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix(NODES_DIRECTIVE) {
                declared = n.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad node-count directive {:?}", n.trim()),
                })?;
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `u v [w]`, found {} fields", fields.len()),
            });
        }
        let node = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node id {s:?}"),
            })
        };
        let (u, v) = (node(fields[0])?, node(fields[1])?);
        let w = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid weight {s:?}"),
            })?,
            None => 1.0,
        };
        if u == v {
            return Err(Error::validation(format!("line {lineno}: self-loop on node {u}")));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::validation(format!(
                "line {lineno}: weight must be positive and finite, got {w}"
            )));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::validation(format!("line {lineno}: duplicate edge ({u}, {v})")));
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v, w));
    }

    let n = max_id.map_or(0, |m| m + 1).max(declared);
    Graph::new(n, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    load_edge_list(BufReader::new(File::open(path)?))
}

/// Writes `g` in the format accepted by [`load_edge_list`]. Unit weights are
/// omitted.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# {NODES_DIRECTIVE} {}", g.num_nodes())?;
    for (u, v, w) in g.edges() {
        if w == 1.0 {
            writeln!(out, "{u} {v}")?;
        } else {
            writeln!(out, "{u} {v} {w}")?;
        }
    }
    Ok(())
}
