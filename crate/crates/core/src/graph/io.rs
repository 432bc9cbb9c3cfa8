use super::{Hypothesis, HypothesisClass, ManipulationGraph};
use crate::error::{Error, Result};
use std::fmt::Write as _;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn header_value(line_no: usize, token: &str, key: &str) -> Result<usize> {
    let Some(v) = token.strip_prefix(key).and_then(|t| t.strip_prefix('=')) else {
        return Err(parse_err(line_no, format!("expected `{key}=<int>`, found {token:?}")));
    };
    v.parse()
        .map_err(|_| parse_err(line_no, format!("bad integer in {token:?}")))
}

fn parse_graph_header(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut tokens = line.split_whitespace();
    let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
        return Err(parse_err(line_no, "graph header must be `n=<int> k=<int>`"));
    };
    Ok((header_value(line_no, a, "n")?, header_value(line_no, b, "k")?))
}

fn parse_block<'a>(
    lines: &mut std::iter::Peekable<impl Iterator<Item = (usize, &'a str)>>,
    header_line: usize,
    n: usize,
    k: usize,
) -> Result<ManipulationGraph> {
    let mut adj = Vec::with_capacity(n);
    for x in 0..n {
        // A file may end before the trailing arcless vertices.
        let (line_no, text) = lines.next().unwrap_or((header_line, ""));
        let list = text
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(line_no + 1, format!("bad vertex index {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(&bad) = list.iter().find(|&&y| y >= n || y == x) {
            return Err(parse_err(line_no + 1, format!("vertex {x} has invalid out-neighbor {bad}")));
        }
        adj.push(list);
    }
    ManipulationGraph::new(k, adj).map_err(|e| parse_err(header_line + 1, e.to_string()))
}

pub fn parse_graph(text: &str) -> Result<ManipulationGraph> {
    let graphs = parse_graph_class(text)?;
    match graphs.len() {
        1 => Ok(graphs.into_iter().next().expect("one graph")),
        0 => Err(parse_err(1, "no graph header found")),
        m => Err(parse_err(1, format!("expected one graph, found {m}"))),
    }
}

/// A graph-class file is a concatenation of graph blocks.
pub fn parse_graph_class(text: &str) -> Result<Vec<ManipulationGraph>> {
    let mut lines = text.lines().enumerate().peekable();
    let mut out = Vec::new();
    while let Some((line_no, line)) = lines.next() {
        if line.trim().is_empty() {
            continue;
        }
        let (n, k) = parse_graph_header(line_no + 1, line)?;
        out.push(parse_block(&mut lines, line_no, n, k)?);
    }
    Ok(out)
}

pub fn format_graph(g: &ManipulationGraph) -> String {
    let mut s = format!("n={} k={}\n", g.n(), g.declared_k());
    for x in 0..g.n() {
        let line: Vec<String> = g
            .neighbors(super::VertexId(x))
            .iter()
            .map(|v| v.0.to_string())
            .collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

pub fn format_graph_class(graphs: &[ManipulationGraph]) -> String {
    graphs.iter().map(format_graph).collect()
}

pub fn parse_class(text: &str) -> Result<HypothesisClass> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| parse_err(1, "missing `n=<int>` header"))?;
    let n = header_value(1, header.trim(), "n")?;
    let mut members = Vec::new();
    for (line_no, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let h = Hypothesis::parse(line).map_err(|e| parse_err(line_no + 1, e.to_string()))?;
        if h.n() != n {
            return Err(parse_err(
                line_no + 1,
                format!("bit string has length {}, header says {n}", h.n()),
            ));
        }
        members.push(h);
    }
    HypothesisClass::new(n, members).map_err(|e| parse_err(1, e.to_string()))
}

pub fn format_class(cls: &HypothesisClass) -> String {
    let mut s = format!("n={}\n", cls.n());
    for h in cls.iter() {
        s.push_str(&h.to_bit_string());
        s.push('\n');
    }
    s
}
