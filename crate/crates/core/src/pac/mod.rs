//! Batch learners for the strategic PAC settings.

mod neighborhoods;
mod proxy;

pub use neighborhoods::{
    format_clicks, learn_neighborhoods, parse_clicks, Click, NeighborhoodMode,
};
pub use proxy::{
    empirical_proxy_loss, exact_neighborhood_loss, exact_proxy_loss, split_sizes, ug_agnostic,
};

use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::{induced, Agent, GraphClass, HypothesisClass, ManipulationGraph, VertexId};
use crate::Error;
use serde::{Deserialize, Serialize};

/// An agent together with the feature it was observed at after the probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledObservation {
    pub x: VertexId,
    pub v: VertexId,
    pub y: bool,
}

impl LabeledObservation {
    pub fn agent(&self) -> Agent {
        Agent { x: self.x, y: self.y }
    }
}

/// Indices of a selected (Ĝ, ĥ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphHypothesisPair {
    pub graph: usize,
    pub hypothesis: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct ObsRow {
    x: usize,
    v: usize,
    y: u8,
}

/// Observation CSV with columns x,v,y.
pub fn format_observations(obs: &[LabeledObservation]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for o in obs {
        w.serialize(ObsRow { x: o.x.index(), v: o.v.index(), y: o.y as u8 })?;
    }
    if obs.is_empty() {
        w.write_record(["x", "v", "y"])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_observations(text: &str) -> Result<Vec<LabeledObservation>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in r.deserialize::<ObsRow>().enumerate() {
        let row = row?;
        if row.y > 1 {
            return Err(Error::Parse { line: i + 2, msg: format!("label {} is not a bit", row.y) });
        }
        out.push(LabeledObservation { x: VertexId(row.x), v: VertexId(row.v), y: row.y == 1 });
    }
    Ok(out)
}

fn check_universe(n: usize, obs: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<()> {
    for (x, v) in obs {
        if x.index() >= n || v.index() >= n {
            return Err(invalid(format!("observation ({}, {}) leaves the universe of size {n}", x.0, v.0)));
        }
    }
    Ok(())
}

fn errors(graph: &ManipulationGraph, h: &crate::graph::Hypothesis, agents: &[Agent]) -> usize {
    agents.iter().filter(|a| induced(graph, h, a.x) != a.y).count()
}

/// Index of the member with least empirical strategic loss (ties to the
/// smallest index) and its error count.
pub fn erm_strategic(
    graph: &ManipulationGraph,
    cls: &HypothesisClass,
    sample: &[Agent],
    exec: Exec,
) -> Result<(usize, usize)> {
    if sample.is_empty() {
        return Err(Error::Domain("empty sample".into()));
    }
    if cls.is_empty() {
        return Err(invalid("empty hypothesis class"));
    }
    if cls.n() != graph.n() {
        return Err(invalid("class and graph universes differ"));
    }
    check_universe(graph.n(), sample.iter().map(|a| (a.x, a.x)))?;
    exec.argmin_by_key(cls.len(), |i| Some(errors(graph, cls.get(i), sample)))
        .ok_or_else(|| invalid("empty hypothesis class"))
}

/// Observed features lie in N_G(x) (rounds with v = x are not constraints).
pub fn graph_consistent(graph: &ManipulationGraph, obs: &[LabeledObservation]) -> bool {
    obs.iter().all(|o| o.v == o.x || graph.has_arc(o.x, o.v))
}

/// Σ_t |N_G(x_t)|.
pub fn empirical_degree(graph: &ManipulationGraph, obs: &[LabeledObservation]) -> usize {
    obs.iter().map(|o| graph.neighbors(o.x).len()).sum()
}

/// Least empirical degree among graphs consistent with every observation
/// that also admit a zero-loss hypothesis; ties to the smallest pair.
pub fn ug_realizable(
    graphs: &GraphClass,
    cls: &HypothesisClass,
    obs: &[LabeledObservation],
    exec: Exec,
) -> Result<GraphHypothesisPair> {
    if obs.is_empty() {
        return Err(Error::Domain("empty observations".into()));
    }
    if graphs.is_empty() || cls.is_empty() {
        return Err(invalid("empty graph or hypothesis class"));
    }
    if graphs.n() != cls.n() {
        return Err(invalid("class and graph universes differ"));
    }
    check_universe(cls.n(), obs.iter().map(|o| (o.x, o.v)))?;
    let agents: Vec<Agent> = obs.iter().map(|o| o.agent()).collect();
    let scored = exec.map(graphs.len(), |g| {
        let graph = graphs.get(g);
        if !graph_consistent(graph, obs) {
            return None;
        }
        let h = (0..cls.len()).find(|&i| errors(graph, cls.get(i), &agents) == 0)?;
        Some((empirical_degree(graph, obs), h))
    });
    let mut best: Option<(usize, usize, usize)> = None;
    for (g, s) in scored.into_iter().enumerate() {
        if let Some((deg, h)) = s {
            if best.is_none_or(|(d, _, _)| deg < d) {
                best = Some((deg, g, h));
            }
        }
    }
    best.map(|(_, graph, hypothesis)| GraphHypothesisPair { graph, hypothesis })
        .ok_or_else(|| Error::Realizability("no consistent (graph, hypothesis) pair".into()))
}
