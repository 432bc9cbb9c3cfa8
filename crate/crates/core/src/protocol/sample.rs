use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::{
    best_response, induced, Agent, AgentDistribution, Hypothesis, HypothesisClass,
    ManipulationGraph, TieBreakRule, TieBreaker,
};
use crate::pac::LabeledObservation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Data-collection hypothesis for PAC sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Probe {
    /// 1{x ≠ x_t}: the agent reveals a uniform out-neighbor.
    #[default]
    AllButX,
    /// Everything positive: nobody moves.
    AllPositive,
}

/// Tie seed derived from the sample seed, shared by train and test.
pub fn tie_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// T i.i.d. agents with the manipulated feature they reveal under the probe.
pub fn collect_pac_sample(
    graph: &ManipulationGraph,
    dist: &AgentDistribution,
    rounds: usize,
    probe: Probe,
    seed: u64,
) -> Result<Vec<LabeledObservation>> {
    if dist.min_universe() > graph.n() {
        return Err(invalid("distribution support leaves the graph's universe"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tie = TieBreaker::new(TieBreakRule::UniformRandom { seed: tie_seed(seed) });
    let n = graph.n();
    (0..rounds)
        .map(|_| {
            let a = dist.sample(&mut rng);
            let h = match probe {
                Probe::AllButX => Hypothesis::all_but(n, a.x),
                Probe::AllPositive => Hypothesis::all_positive(n),
            };
            let v = best_response(graph, &h, a.x, &mut tie)?;
            Ok(LabeledObservation { x: a.x, v, y: a.y })
        })
        .collect()
}

/// Exhaustive minimizer of cumulative strategic loss; smallest index wins.
pub fn best_in_hindsight(
    cls: &HypothesisClass,
    graph: &ManipulationGraph,
    agents: &[Agent],
    exec: Exec,
) -> Result<(usize, usize)> {
    if cls.is_empty() {
        return Err(invalid("empty hypothesis class"));
    }
    exec.argmin_by_key(cls.len(), |i| {
        let h = cls.get(i);
        Some(agents.iter().filter(|a| induced(graph, h, a.x) != a.y).count())
    })
    .ok_or_else(|| invalid("empty hypothesis class"))
}
