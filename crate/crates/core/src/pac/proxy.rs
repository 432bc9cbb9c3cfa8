use super::{empirical_degree, erm_strategic, GraphHypothesisPair, LabeledObservation};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::{Agent, AgentDistribution, GraphClass, HypothesisClass, ManipulationGraph, Rational};
use crate::Error;
use num_traits::Zero;

fn misses(graph: &ManipulationGraph, obs: &[LabeledObservation]) -> usize {
    obs.iter().filter(|o| o.v != o.x && !graph.has_arc(o.x, o.v)).count()
}

/// (2/T)·Σ 1{v_t ∉ N_G(x_t)} + (1/(kT))·Σ |N_G(x_t)|, rounds with v = x
/// skipped in the first sum.
pub fn empirical_proxy_loss(graph: &ManipulationGraph, obs: &[LabeledObservation], k: usize) -> Result<Rational> {
    if obs.is_empty() {
        return Err(Error::Domain("empty observations".into()));
    }
    if k == 0 {
        return Err(invalid("proxy loss needs k ≥ 1"));
    }
    let num = 2 * k * misses(graph, obs) + empirical_degree(graph, obs);
    Ok(Rational::new(num.into(), (k * obs.len()).into()))
}

/// Pr_x[N_G(x) ≠ N_{G⋆}(x)].
pub fn exact_neighborhood_loss(
    graph: &ManipulationGraph,
    star: &ManipulationGraph,
    dist: &AgentDistribution,
) -> Result<Rational> {
    if graph.n() != star.n() || dist.min_universe() > graph.n() {
        return Err(invalid("graph, true graph and distribution universes differ"));
    }
    let mut out = Rational::zero();
    for (x, p) in dist.marginal(graph.n()).into_iter().enumerate() {
        let x = crate::graph::VertexId(x);
        if graph.neighbors(x) != star.neighbors(x) {
            out += p;
        }
    }
    Ok(out)
}

/// E_x[2·Pr_{v∼U(N⋆(x))}(v ∉ N_G(x)) + |N_G(x)|/k − |N⋆(x)|/k]; vertices
/// isolated in G⋆ contribute no miss term.
pub fn exact_proxy_loss(
    graph: &ManipulationGraph,
    star: &ManipulationGraph,
    dist: &AgentDistribution,
    k: usize,
) -> Result<Rational> {
    if k == 0 {
        return Err(invalid("proxy loss needs k ≥ 1"));
    }
    if graph.n() != star.n() || dist.min_universe() > graph.n() {
        return Err(invalid("graph, true graph and distribution universes differ"));
    }
    let mut out = Rational::zero();
    for (x, p) in dist.marginal(graph.n()).into_iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let x = crate::graph::VertexId(x);
        let ns = star.neighbors(x);
        let mut term = Rational::zero();
        if !ns.is_empty() {
            let miss = ns.iter().filter(|&&v| !graph.has_arc(x, v)).count();
            term += Rational::new((2 * miss).into(), ns.len().into());
        }
        let diff = graph.neighbors(x).len() as i64 - ns.len() as i64;
        term += Rational::new(diff.into(), k.into());
        out += p * term;
    }
    Ok(out)
}

/// Split T observations k² : 1 (capped at 9 : 1) into graph and hypothesis
/// fitting parts.
pub fn split_sizes(total: usize, k: usize) -> (usize, usize) {
    let r = (k * k).clamp(1, 9);
    let t1 = total * r / (r + 1);
    (t1, total - t1)
}

/// Ĝ minimizes the empirical proxy loss on S1; ĥ is the strategic ERM
/// under Ĝ on S2.
pub fn ug_agnostic(
    graphs: &GraphClass,
    cls: &HypothesisClass,
    s1: &[LabeledObservation],
    s2: &[LabeledObservation],
    k: usize,
    exec: Exec,
) -> Result<GraphHypothesisPair> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::Domain("empty observations".into()));
    }
    if graphs.is_empty() {
        return Err(invalid("empty graph class"));
    }
    if k == 0 {
        return Err(invalid("proxy loss needs k ≥ 1"));
    }
    // Compare 2k·misses + degree: the proxy loss scaled by kT.
    let (graph, _) = exec
        .argmin_by_key(graphs.len(), |g| {
            let graph = graphs.get(g);
            Some(2 * k * misses(graph, s1) + empirical_degree(graph, s1))
        })
        .ok_or_else(|| invalid("empty graph class"))?;
    let agents: Vec<Agent> = s2.iter().map(|o| o.agent()).collect();
    let (hypothesis, _) = erm_strategic(graphs.get(graph), cls, &agents, exec)?;
    Ok(GraphHypothesisPair { graph, hypothesis })
}
