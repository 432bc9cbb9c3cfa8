use super::experts::{at_least, ExpertPool};
use super::{ExpertStats, StandardLearner, StrategicLearner};
use crate::error::{protocol, Result};
use crate::graph::{Hypothesis, ManipulationGraph, VertexId};
use crate::protocol::{Feedback, FeedbackSetting};
use std::sync::Arc;

/// Weighted-expert reduction for the fully informative setting.
#[derive(Debug, Clone)]
pub struct Red2OnlineFi<L> {
    graph: Arc<ManipulationGraph>,
    pool: ExpertPool<L>,
    pending: Option<Vec<VertexId>>,
}

pub fn red2online_fi<L: StandardLearner>(base: L, graph: &ManipulationGraph) -> Red2OnlineFi<L> {
    Red2OnlineFi::new(base, Arc::new(graph.clone()))
}

impl<L: StandardLearner> Red2OnlineFi<L> {
    pub fn new(base: L, graph: Arc<ManipulationGraph>) -> Self {
        Self {
            graph,
            pool: ExpertPool::new(base),
            pending: None,
        }
    }

    pub fn pool(&self) -> &ExpertPool<L> {
        &self.pool
    }

    pub fn set_prune_floor(&mut self, floor: Option<f64>) {
        self.pool.set_prune_floor(floor);
    }

    pub fn graph(&self) -> &ManipulationGraph {
        &self.graph
    }
}

impl<L: StandardLearner> StrategicLearner for Red2OnlineFi<L> {
    fn name(&self) -> String {
        let base = self.pool.experts().first().map_or("?", |e| e.learner.name());
        format!("red2fi({base})")
    }

    fn supports(&self, setting: FeedbackSetting) -> bool {
        setting == FeedbackSetting::FullyInformative
    }

    fn propose(&mut self, x: Option<VertexId>) -> Result<Hypothesis> {
        if self.pending.is_some() {
            return Err(protocol("propose called twice in one round"));
        }
        let x = x.ok_or_else(|| protocol("red2fi needs x_t before proposing"))?;
        let closed = self.graph.closed_neighborhood(x);
        let positive: f64 = self
            .pool
            .experts()
            .iter()
            .filter(|e| closed.iter().any(|&z| e.learner.predict(z)))
            .map(|e| e.weight)
            .sum();
        let n = self.graph.n();
        let h = if at_least(positive, self.pool.total_weight() / 2.0) {
            Hypothesis::from_positive(n, [x.0])?
        } else {
            Hypothesis::all_negative(n)
        };
        self.pending = Some(closed);
        Ok(h)
    }

    fn observe(&mut self, fb: &Feedback) -> Result<()> {
        let closed = self
            .pending
            .take()
            .ok_or_else(|| protocol("observe called before propose"))?;
        match fb.x {
            Some(x) if x == closed[0] => {}
            Some(_) => return Err(protocol("feedback x_t differs from the disclosed x_t")),
            None => return Err(protocol("red2fi feedback is missing x_t")),
        }
        if !fb.mistake() {
            return Ok(());
        }
        if fb.y {
            self.pool
                .split(|l| closed.iter().all(|&z| !l.predict(z)), &closed);
        } else {
            self.pool
                .halve_and_feed(|l| closed.iter().copied().find(|&z| l.predict(z)));
        }
        Ok(())
    }

    fn expert_stats(&self) -> Option<ExpertStats> {
        Some(ExpertStats {
            count: self.pool.len(),
            total_weight: self.pool.total_weight(),
        })
    }
}
