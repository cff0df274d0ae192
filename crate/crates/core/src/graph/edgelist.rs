//! Tab-separated edge lists.
//!
//! ```text
//! # variant	folksonomy
//! user-document	u1	d1	3
//! user-tag	u1	t3	2
//! ```
//!
//! Each undirected edge appears once. Isolated nodes are not represented.

use std::io::{BufRead, Write};

use super::{GraphBuilder, GraphModel, GraphVariant, NodeKind};
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(graph: &GraphModel, mut out: W) -> Result<()> {
    writeln!(out, "# variant\t{}", graph.variant())?;
    for (a, b, w) in graph.edges() {
        writeln!(
            out,
            "{}-{}\t{}\t{}\t{}",
            graph.kind(a),
            graph.kind(b),
            graph.label(a),
            graph.label(b),
            w
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<GraphModel> {
    let mut variant = None;
    let mut b = GraphBuilder::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let bad = |message: String| Error::Parse { line: lineno, message };
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("variant") {
                variant = Some(v.trim().parse::<GraphVariant>()?);
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [kinds, la, lb, w] = fields[..] else {
            return Err(bad(format!("expected 4 fields, found {}", fields.len())));
        };
        let (ka, kb) = kinds
            .split_once('-')
            .ok_or_else(|| bad(format!("bad edge kind `{kinds}`")))?;
        let (ka, kb): (NodeKind, NodeKind) = (ka.parse()?, kb.parse()?);
        let w: f64 = w.parse().map_err(|_| bad(format!("bad weight `{w}`")))?;
        let (a, bn) = (b.node(ka, la), b.node(kb, lb));
        if a == bn {
            return Err(bad("self-loop".into()));
        }
        b.set_edge(a, bn, w);
    }
    let variant = variant.ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing `# variant` header".into(),
    })?;
    let graph = b.finish(variant);
    graph.validate()?;
    Ok(graph)
}
