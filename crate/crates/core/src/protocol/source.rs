use crate::dims::induced_labeling;
use crate::error::{invalid, Result};
use crate::graph::{Agent, AgentDistribution, Hypothesis, HypothesisClass, ManipulationGraph, VertexId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The final (G⋆, h⋆) a run was played against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truth {
    pub graph: ManipulationGraph,
    pub target: Option<Hypothesis>,
}

/// Where agents come from: an i.i.d. stream or an adaptive adversary.
pub trait AgentSource: Send {
    fn name(&self) -> String;

    /// x_t committed before the learner proposes; `None` if the source
    /// picks the agent only after seeing h_t.
    fn feature(&mut self, t: usize) -> Result<Option<VertexId>>;

    /// The round's agent, chosen after seeing h_t.
    fn agent(&mut self, t: usize, committed: Option<VertexId>, h: &Hypothesis) -> Result<Agent>;

    /// G⋆ as it stands for the current round.
    fn graph(&self) -> &ManipulationGraph;

    /// Bookkeeping after the round, given the realized v_t.
    fn record(&mut self, _agent: Agent, _h: &Hypothesis, _v: VertexId) -> Result<()> {
        Ok(())
    }

    /// Size of the surviving consistent target set, if tracked.
    fn survivors(&self) -> Option<usize> {
        None
    }

    /// Whether the run is declared realizable.
    fn realizable(&self) -> bool;

    fn final_truth(&self) -> Truth;
}

/// Agents drawn i.i.d. from a finite-support distribution.
#[derive(Debug, Clone)]
pub struct IidSource {
    graph: ManipulationGraph,
    dist: AgentDistribution,
    rng: ChaCha8Rng,
    next: Option<Agent>,
    target: Option<Hypothesis>,
}

impl IidSource {
    /// `target`, when given, declares the stream realizable by it.
    pub fn new(
        graph: ManipulationGraph,
        dist: AgentDistribution,
        seed: u64,
        target: Option<Hypothesis>,
    ) -> Result<Self> {
        if dist.min_universe() > graph.n() {
            return Err(invalid("distribution support leaves the graph's universe"));
        }
        Ok(Self {
            graph,
            dist,
            rng: ChaCha8Rng::seed_from_u64(seed),
            next: None,
            target,
        })
    }
}

impl AgentSource for IidSource {
    fn name(&self) -> String {
        "iid".to_string()
    }

    fn feature(&mut self, _t: usize) -> Result<Option<VertexId>> {
        let a = self.dist.sample(&mut self.rng);
        self.next = Some(a);
        Ok(Some(a.x))
    }

    fn agent(&mut self, _t: usize, _committed: Option<VertexId>, _h: &Hypothesis) -> Result<Agent> {
        Ok(match self.next.take() {
            Some(a) => a,
            None => self.dist.sample(&mut self.rng),
        })
    }

    fn graph(&self) -> &ManipulationGraph {
        &self.graph
    }

    fn realizable(&self) -> bool {
        self.target.is_some()
    }

    fn final_truth(&self) -> Truth {
        Truth {
            graph: self.graph.clone(),
            target: self.target.clone(),
        }
    }
}

/// Class members whose induced labeling agrees with every agent so far.
#[derive(Debug, Clone)]
pub struct SurvivorTracker {
    bars: Vec<Hypothesis>,
    members: Vec<Hypothesis>,
    alive: Vec<usize>,
}

impl SurvivorTracker {
    pub fn new(graph: &ManipulationGraph, cls: &HypothesisClass) -> Self {
        Self {
            bars: cls.iter().map(|h| induced_labeling(graph, h)).collect(),
            members: cls.members().to_vec(),
            alive: (0..cls.len()).collect(),
        }
    }

    pub fn alive(&self) -> &[usize] {
        &self.alive
    }

    /// Some survivor labels x with y.
    pub fn supports(&self, agent: Agent) -> bool {
        self.alive.iter().any(|&i| self.bars[i].label(agent.x) == agent.y)
    }

    pub fn observe(&mut self, agent: Agent) {
        let bars = &self.bars;
        self.alive.retain(|&i| bars[i].label(agent.x) == agent.y);
    }

    /// A consistent label for x: the first survivor's.
    pub fn label_of_first(&self, x: VertexId) -> Option<bool> {
        self.alive.first().map(|&i| self.bars[i].label(x))
    }

    pub fn first(&self) -> Option<&Hypothesis> {
        self.alive.first().map(|&i| &self.members[i])
    }
}
