use super::{empirical_degree, graph_consistent, LabeledObservation};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::{GraphClass, VertexId};
use crate::Error;
use serde::{Deserialize, Serialize};

/// One recommendation round: user x was shown a set and clicked one item,
/// or clicked nothing (`clicked == x`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Click {
    pub x: VertexId,
    pub shown: Vec<VertexId>,
    pub clicked: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum NeighborhoodMode {
    /// Least empirical degree among graphs containing every click.
    Realizable,
    /// Empirical proxy-loss minimizer; needs full probes.
    Agnostic { k: usize },
}

impl NeighborhoodMode {
    pub fn parse(s: &str, k: usize) -> Result<Self> {
        match s {
            "realizable" => Ok(Self::Realizable),
            "agnostic" => Ok(Self::Agnostic { k }),
            _ => Err(invalid(format!("unknown neighborhood mode `{s}`"))),
        }
    }
}

/// Index of the selected graph; ties to the smallest index.
pub fn learn_neighborhoods(
    graphs: &GraphClass,
    clicks: &[Click],
    mode: NeighborhoodMode,
    exec: Exec,
) -> Result<usize> {
    if graphs.is_empty() {
        return Err(invalid("empty graph class"));
    }
    if clicks.is_empty() {
        return Err(Error::Domain("empty click stream".into()));
    }
    let n = graphs.n();
    for (t, c) in clicks.iter().enumerate() {
        if c.x.index() >= n || c.clicked.index() >= n || c.shown.iter().any(|s| s.index() >= n) {
            return Err(invalid(format!("click {t} leaves the universe of size {n}")));
        }
        if c.clicked != c.x && !c.shown.contains(&c.clicked) {
            return Err(invalid(format!("click {t}: clicked item was not shown")));
        }
    }
    let obs: Vec<LabeledObservation> = clicks
        .iter()
        .map(|c| LabeledObservation { x: c.x, v: c.clicked, y: true })
        .collect();
    match mode {
        NeighborhoodMode::Realizable => exec
            .argmin_by_key(graphs.len(), |g| {
                let graph = graphs.get(g);
                graph_consistent(graph, &obs).then(|| empirical_degree(graph, &obs))
            })
            .map(|(g, _)| g)
            .ok_or_else(|| Error::Realizability("no graph contains every click".into())),
        NeighborhoodMode::Agnostic { k } => {
            if k == 0 {
                return Err(invalid("proxy loss needs k ≥ 1"));
            }
            for (t, c) in clicks.iter().enumerate() {
                let full = c.shown.len() + 1 == n && !c.shown.contains(&c.x);
                if !full {
                    return Err(invalid(format!("click {t}: agnostic mode needs the all-but-x probe")));
                }
            }
            exec.argmin_by_key(graphs.len(), |g| {
                super::empirical_proxy_loss(graphs.get(g), &obs, k).ok()
            })
            .map(|(g, _)| g)
            .ok_or_else(|| invalid("empty graph class"))
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ClickRow {
    x: usize,
    shown: String,
    clicked: usize,
}

/// Click CSV: columns x,shown,clicked with `shown` space-separated.
pub fn format_clicks(clicks: &[Click]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in clicks {
        let shown = c.shown.iter().map(|v| v.0.to_string()).collect::<Vec<_>>().join(" ");
        w.serialize(ClickRow { x: c.x.0, shown, clicked: c.clicked.0 })?;
    }
    if clicks.is_empty() {
        w.write_record(["x", "shown", "clicked"])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_clicks(text: &str) -> Result<Vec<Click>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in r.deserialize::<ClickRow>().enumerate() {
        let row = row?;
        let shown = row
            .shown
            .split_whitespace()
            .map(|s| {
                s.parse().map(VertexId).map_err(|_| Error::Parse {
                    line: i + 2,
                    msg: format!("bad shown item `{s}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(Click { x: VertexId(row.x), shown, clicked: VertexId(row.clicked) });
    }
    Ok(out)
}
