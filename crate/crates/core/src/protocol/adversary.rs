use super::source::{AgentSource, SurvivorTracker, Truth};
use super::FeedbackSetting;
use crate::constructions::{
    binrep_hubs, grid_index, ug_online_index, Fixture, FixtureKind, CHAIN_A, CHAIN_B,
};
use crate::error::{invalid, protocol, Result};
use crate::graph::{induced, Agent, Hypothesis, HypothesisClass, ManipulationGraph, VertexId};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Named adversarial strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    Greedy,
    FiBinrep,
    PmfStar,
    UgOnlineLb,
    UgChain,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 5] = [
        Self::Greedy,
        Self::FiBinrep,
        Self::PmfStar,
        Self::UgOnlineLb,
        Self::UgChain,
    ];

    /// Settings whose disclosure order the strategy can play.
    pub fn compatible(self, setting: FeedbackSetting) -> bool {
        match self {
            Self::Greedy => true,
            Self::FiBinrep => setting.graph_known(),
            Self::PmfStar => setting.graph_known() && !setting.discloses_x_before(),
            Self::UgOnlineLb => !setting.graph_known(),
            Self::UgChain => setting == FeedbackSetting::UgPairAfter,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Greedy => "greedy",
            Self::FiBinrep => "fi-binrep",
            Self::PmfStar => "pmf-star",
            Self::UgOnlineLb => "ug-online-lb",
            Self::UgChain => "ug-chain",
        }
    }
}

impl std::fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdversaryKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown adversary `{s}`")))
    }
}

/// Build the named adversary against a fixture. `commit` asks greedy-style
/// adversaries to disclose x_t before h_t.
pub fn adversary(kind: AdversaryKind, fixture: &Fixture, commit: bool) -> Result<Box<dyn AgentSource>> {
    let mismatch = || invalid(format!("adversary `{kind}` does not match fixture `{}`", fixture.name()));
    Ok(match (kind, &fixture.kind) {
        (AdversaryKind::Greedy, _) => {
            if fixture.graphs.is_some() && fixture.target.is_none() {
                return Err(mismatch());
            }
            Box::new(Greedy::new(fixture.graph.clone(), &fixture.class, None, commit))
        }
        (AdversaryKind::FiBinrep, FixtureKind::Binrep { d, k }) => Box::new(Greedy::new(
            fixture.graph.clone(),
            &fixture.class,
            Some(binrep_hubs(*d, *k)),
            true,
        )),
        (AdversaryKind::PmfStar, FixtureKind::Star { d, k }) => {
            Box::new(PmfStar::new(fixture.graph.clone(), &fixture.class, *d, *k))
        }
        (AdversaryKind::UgOnlineLb, FixtureKind::UgOnlineLb { n }) => Box::new(UgOnlineLb::new(*n)?),
        (AdversaryKind::UgChain, FixtureKind::Chain { n }) => Box::new(UgChain::new(*n)?),
        _ => return Err(mismatch()),
    })
}

/// Forces a mistake whenever some surviving target allows it.
#[derive(Debug, Clone)]
pub struct Greedy {
    graph: ManipulationGraph,
    tracker: SurvivorTracker,
    schedule: Option<Vec<VertexId>>,
    commit: bool,
}

impl Greedy {
    pub fn new(
        graph: ManipulationGraph,
        cls: &HypothesisClass,
        schedule: Option<Vec<VertexId>>,
        commit: bool,
    ) -> Self {
        Self {
            tracker: SurvivorTracker::new(&graph, cls),
            graph,
            schedule,
            commit,
        }
    }

    fn scheduled(&self, t: usize) -> VertexId {
        match &self.schedule {
            Some(s) if !s.is_empty() => s[t % s.len()],
            _ => VertexId(t % self.graph.n()),
        }
    }
}

fn forcing_label(graph: &ManipulationGraph, tracker: &SurvivorTracker, h: &Hypothesis, x: VertexId) -> Option<bool> {
    let wrong = !induced(graph, h, x);
    tracker.supports(Agent { x, y: wrong }).then_some(wrong)
}

fn concede(graph: &ManipulationGraph, tracker: &SurvivorTracker, x: VertexId) -> Result<Agent> {
    let y = tracker
        .label_of_first(x)
        .ok_or_else(|| protocol("no surviving target"))?;
    let _ = graph;
    Ok(Agent { x, y })
}

impl AgentSource for Greedy {
    fn name(&self) -> String {
        if self.schedule.is_some() { "fi-binrep" } else { "greedy" }.to_string()
    }

    fn feature(&mut self, t: usize) -> Result<Option<VertexId>> {
        Ok(self.commit.then(|| self.scheduled(t)))
    }

    fn agent(&mut self, t: usize, committed: Option<VertexId>, h: &Hypothesis) -> Result<Agent> {
        if let Some(x) = committed {
            if let Some(y) = forcing_label(&self.graph, &self.tracker, h, x) {
                return Ok(Agent { x, y });
            }
            return concede(&self.graph, &self.tracker, x);
        }
        let first = self.scheduled(t);
        let order = std::iter::once(first).chain((0..self.graph.n()).map(VertexId));
        for x in order {
            if let Some(y) = forcing_label(&self.graph, &self.tracker, h, x) {
                return Ok(Agent { x, y });
            }
        }
        concede(&self.graph, &self.tracker, first)
    }

    fn graph(&self) -> &ManipulationGraph {
        &self.graph
    }

    fn record(&mut self, agent: Agent, _h: &Hypothesis, _v: VertexId) -> Result<()> {
        self.tracker.observe(agent);
        Ok(())
    }

    fn survivors(&self) -> Option<usize> {
        Some(self.tracker.alive().len())
    }

    fn realizable(&self) -> bool {
        true
    }

    fn final_truth(&self) -> Truth {
        Truth {
            graph: self.graph.clone(),
            target: self.tracker.first().cloned(),
        }
    }
}

/// Star adversary, one copy at a time: an all-negative star is hit at its
/// hub with label 1, otherwise a positive leaf that some survivor rejects
/// is played with label 0.
#[derive(Debug, Clone)]
pub struct PmfStar {
    graph: ManipulationGraph,
    tracker: SurvivorTracker,
    members: Vec<Hypothesis>,
    d: usize,
    k: usize,
}

impl PmfStar {
    pub fn new(graph: ManipulationGraph, cls: &HypothesisClass, d: usize, k: usize) -> Self {
        Self {
            tracker: SurvivorTracker::new(&graph, cls),
            members: cls.members().to_vec(),
            graph,
            d,
            k,
        }
    }

    /// Leaves of copy c still positive under some survivor.
    fn live_leaves(&self, c: usize) -> Vec<usize> {
        (1..=self.k)
            .filter(|&j| {
                let v = VertexId(grid_index(c, j, self.k));
                self.tracker.alive().iter().any(|&i| self.members[i].label(v))
            })
            .collect()
    }

    fn case_analysis(&self, c: usize, h: &Hypothesis) -> Option<Agent> {
        let hub = VertexId(grid_index(c, 0, self.k));
        let leaf = |j| VertexId(grid_index(c, j, self.k));
        let live = self.live_leaves(c);
        let star: Vec<VertexId> = self.graph.closed_neighborhood(hub);
        let supported = |a: Agent| self.tracker.supports(a).then_some(a);
        if star.iter().all(|&v| !h.label(v)) {
            return supported(Agent { x: hub, y: true });
        }
        if h.label(hub) {
            // The hub induces 1 under every target, so label 0 survives only
            // on classes that leave a star empty.
            if let Some(a) = supported(Agent { x: hub, y: false }) {
                return Some(a);
            }
        }
        let positive: Vec<usize> = (1..=self.k).filter(|&j| h.label(leaf(j))).collect();
        positive
            .iter()
            .filter(|j| live.len() >= 2 && live.contains(j))
            .chain(positive.iter().filter(|j| !live.contains(j)))
            .find_map(|&j| supported(Agent { x: leaf(j), y: false }))
    }
}

impl AgentSource for PmfStar {
    fn name(&self) -> String {
        "pmf-star".to_string()
    }

    fn feature(&mut self, _t: usize) -> Result<Option<VertexId>> {
        Ok(None)
    }

    fn agent(&mut self, _t: usize, _committed: Option<VertexId>, h: &Hypothesis) -> Result<Agent> {
        let active = (0..self.d).find(|&c| self.live_leaves(c).len() >= 2);
        if let Some(c) = active {
            if let Some(a) = self.case_analysis(c, h) {
                return Ok(a);
            }
        }
        for c in 0..self.d {
            if let Some(a) = self.case_analysis(c, h) {
                return Ok(a);
            }
        }
        for x in (0..self.graph.n()).map(VertexId) {
            if let Some(y) = forcing_label(&self.graph, &self.tracker, h, x) {
                return Ok(Agent { x, y });
            }
        }
        let hub = VertexId(grid_index(active.unwrap_or(0), 0, self.k));
        concede(&self.graph, &self.tracker, hub)
    }

    fn graph(&self) -> &ManipulationGraph {
        &self.graph
    }

    fn record(&mut self, agent: Agent, _h: &Hypothesis, _v: VertexId) -> Result<()> {
        self.tracker.observe(agent);
        Ok(())
    }

    fn survivors(&self) -> Option<usize> {
        Some(self.tracker.alive().len())
    }

    fn realizable(&self) -> bool {
        true
    }

    fn final_truth(&self) -> Truth {
        Truth {
            graph: self.graph.clone(),
            target: self.tracker.first().cloned(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Fresh,
    /// Arc to the final target block, fixed at the end.
    Deferred,
    NoArc,
    ArcTo(usize),
}

/// Fresh-column adversary on blocks X_0..X_n: x_{0,t} is committed, the arc
/// out of it is chosen after seeing h_t, and a block is eliminated whenever
/// the learner's positive block in the column can be refuted.
#[derive(Debug, Clone)]
pub struct UgOnlineLb {
    n: usize,
    columns: Vec<Column>,
    alive: Vec<usize>,
    graph: ManipulationGraph,
}

impl UgOnlineLb {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n must be at least 2"));
        }
        let mut s = Self {
            n,
            columns: vec![Column::Fresh; n],
            alive: (1..=n).collect(),
            graph: ManipulationGraph::arcless(n * (n + 1)),
        };
        s.rebuild()?;
        Ok(s)
    }

    fn target_block(&self) -> usize {
        self.alive[0]
    }

    fn rebuild(&mut self) -> Result<()> {
        let n = self.n;
        let star = self.target_block();
        let arcs: Vec<(usize, usize)> = self
            .columns
            .iter()
            .enumerate()
            .filter_map(|(c, col)| {
                let j = c + 1;
                let to = match *col {
                    Column::Deferred => star,
                    Column::ArcTo(i) => i,
                    Column::Fresh | Column::NoArc => return None,
                };
                Some((ug_online_index(n, 0, j), ug_online_index(n, to, j)))
            })
            .collect();
        self.graph = ManipulationGraph::from_arcs(n * (n + 1), 1, &arcs)?;
        Ok(())
    }

    fn column_of(&self, t: usize) -> usize {
        t % self.n
    }
}

impl AgentSource for UgOnlineLb {
    fn name(&self) -> String {
        "ug-online-lb".to_string()
    }

    fn feature(&mut self, t: usize) -> Result<Option<VertexId>> {
        if t >= self.n && self.alive.len() > 1 {
            self.alive.truncate(1);
            self.rebuild()?;
        }
        Ok(Some(VertexId(ug_online_index(self.n, 0, self.column_of(t) + 1))))
    }

    fn agent(&mut self, t: usize, _committed: Option<VertexId>, h: &Hypothesis) -> Result<Agent> {
        let n = self.n;
        let c = self.column_of(t);
        let j = c + 1;
        let x = VertexId(ug_online_index(n, 0, j));
        let y = match self.columns[c] {
            Column::Fresh => {
                let positive: Vec<usize> = (1..=n)
                    .filter(|&i| h.label(VertexId(ug_online_index(n, i, j))))
                    .collect();
                if !h.label(x) && positive.is_empty() {
                    self.columns[c] = Column::Deferred;
                    true
                } else if h.label(x) {
                    self.columns[c] = Column::NoArc;
                    false
                } else if self.alive.len() >= 2 {
                    let i = positive
                        .iter()
                        .copied()
                        .find(|i| self.alive.contains(i))
                        .unwrap_or(positive[0]);
                    self.alive.retain(|&a| a != i);
                    self.columns[c] = Column::ArcTo(i);
                    false
                } else {
                    let star = self.target_block();
                    match positive.iter().copied().find(|&i| i != star) {
                        Some(i) => {
                            self.columns[c] = Column::ArcTo(i);
                            false
                        }
                        None => {
                            self.columns[c] = Column::ArcTo(star);
                            true
                        }
                    }
                }
            }
            Column::Deferred => true,
            Column::NoArc => false,
            Column::ArcTo(i) => i == self.target_block(),
        };
        self.rebuild()?;
        Ok(Agent { x, y })
    }

    fn graph(&self) -> &ManipulationGraph {
        &self.graph
    }

    fn survivors(&self) -> Option<usize> {
        Some(self.alive.len())
    }

    fn realizable(&self) -> bool {
        true
    }

    fn final_truth(&self) -> Truth {
        let n = self.n;
        let i = self.target_block();
        let target = Hypothesis::from_positive(n * (n + 1), (1..=n).map(|j| ug_online_index(n, i, j)))
            .expect("block indices lie in the universe");
        Truth {
            graph: self.graph.clone(),
            target: Some(target),
        }
    }
}

/// Chain adversary on A→B→C_i: the surviving index set shrinks only when
/// the learner marks a refutable C_i positive.
#[derive(Debug, Clone)]
pub struct UgChain {
    n: usize,
    alive: Vec<usize>,
    graph: ManipulationGraph,
}

impl UgChain {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n must be at least 2"));
        }
        Ok(Self {
            n,
            alive: (1..=n).collect(),
            graph: Self::chain(n, 1)?,
        })
    }

    fn chain(n: usize, i: usize) -> Result<ManipulationGraph> {
        ManipulationGraph::from_arcs(n + 2, 1, &[(0, 1), (1, 1 + i)])
    }

    fn c(i: usize) -> VertexId {
        VertexId(1 + i)
    }
}

impl AgentSource for UgChain {
    fn name(&self) -> String {
        "ug-chain".to_string()
    }

    fn feature(&mut self, _t: usize) -> Result<Option<VertexId>> {
        Ok(None)
    }

    fn agent(&mut self, _t: usize, _committed: Option<VertexId>, h: &Hypothesis) -> Result<Agent> {
        let positive: Vec<usize> = (1..=self.n).filter(|&i| h.label(Self::c(i))).collect();
        if !h.label(CHAIN_A) && !h.label(CHAIN_B) && positive.is_empty() {
            return Ok(Agent { x: CHAIN_B, y: true });
        }
        if h.label(CHAIN_A) || h.label(CHAIN_B) {
            return Ok(Agent { x: CHAIN_A, y: false });
        }
        let pick = if self.alive.len() >= 2 {
            positive.iter().copied().find(|i| self.alive.contains(i)).or(positive.first().copied())
        } else {
            positive.iter().copied().find(|&i| i != self.alive[0])
        };
        match pick {
            Some(i) => {
                if self.alive.len() >= 2 {
                    self.alive.retain(|&a| a != i);
                    self.graph = Self::chain(self.n, self.alive[0])?;
                }
                Ok(Agent { x: Self::c(i), y: false })
            }
            None => Ok(Agent { x: CHAIN_B, y: true }),
        }
    }

    fn graph(&self) -> &ManipulationGraph {
        &self.graph
    }

    fn survivors(&self) -> Option<usize> {
        Some(self.alive.len())
    }

    fn realizable(&self) -> bool {
        true
    }

    fn final_truth(&self) -> Truth {
        let i = self.alive[0];
        Truth {
            graph: self.graph.clone(),
            target: Some(
                Hypothesis::from_positive(self.n + 2, [1 + i]).expect("C_i lies in the universe"),
            ),
        }
    }
}
