use super::pmf::Red2OnlinePmf;
use super::{ExpertStats, StandardLearner, StrategicLearner};
use crate::error::{invalid, protocol, Error, Result};
use crate::graph::{GraphClass, Hypothesis, ManipulationGraph, VertexId};
use crate::protocol::{Feedback, FeedbackSetting};
use std::sync::Arc;

/// Online learner for an unknown graph drawn from a finite class.
///
/// Vertices other than x_t whose arc from x_t lies in at most half of the
/// consistent graphs are labeled 1; everything else follows an inner PMF
/// reduction with degree bound 2k. In pair-after mode x_t is unknown when
/// proposing, so only the inner learner is used.
#[derive(Debug, Clone)]
pub struct UgOnline<L> {
    graphs: Arc<Vec<ManipulationGraph>>,
    alive: Vec<usize>,
    inner: Red2OnlinePmf<L>,
    pending: Option<Option<VertexId>>,
    minority_mistakes: usize,
    majority_mistakes: usize,
}

pub fn ug_online<L: StandardLearner>(
    base: L,
    graph_class: &GraphClass,
    k_bound: usize,
) -> Result<UgOnline<L>> {
    if graph_class.is_empty() {
        return Err(invalid("unknown-graph learner needs a nonempty graph class"));
    }
    if graph_class.n() != base.n() {
        return Err(invalid("graph class and hypothesis class universes differ"));
    }
    Ok(UgOnline {
        graphs: Arc::new(graph_class.members().to_vec()),
        alive: (0..graph_class.len()).collect(),
        inner: Red2OnlinePmf::new(base, 2 * k_bound),
        pending: None,
        minority_mistakes: 0,
        majority_mistakes: 0,
    })
}

impl<L: StandardLearner> UgOnline<L> {
    /// Indices of graphs still consistent with the observed arcs.
    pub fn consistent(&self) -> &[usize] {
        &self.alive
    }

    pub fn inner(&self) -> &Red2OnlinePmf<L> {
        &self.inner
    }

    /// (minority-arc mistakes, inner-learner mistakes).
    pub fn mistake_split(&self) -> (usize, usize) {
        (self.minority_mistakes, self.majority_mistakes)
    }

    fn arc_counts(&self, x: VertexId) -> Vec<usize> {
        let mut counts = vec![0usize; self.inner_n()];
        for &g in &self.alive {
            for z in self.graphs[g].neighbors(x) {
                counts[z.0] += 1;
            }
        }
        counts
    }

    fn inner_n(&self) -> usize {
        self.graphs.first().map_or(0, ManipulationGraph::n)
    }
}

impl<L: StandardLearner> StrategicLearner for UgOnline<L> {
    fn name(&self) -> String {
        "ug-online".to_string()
    }

    fn supports(&self, setting: FeedbackSetting) -> bool {
        matches!(setting, FeedbackSetting::UgXThenV | FeedbackSetting::UgPairAfter)
    }

    fn propose(&mut self, x: Option<VertexId>) -> Result<Hypothesis> {
        if self.pending.is_some() {
            return Err(protocol("propose called twice in one round"));
        }
        let mut h = self.inner.hypothesis();
        if let Some(x) = x {
            let counts = self.arc_counts(x);
            let half = self.alive.len();
            for (z, &c) in counts.iter().enumerate() {
                if z != x.0 && 2 * c <= half {
                    h.set(VertexId(z), true);
                }
            }
        }
        self.pending = Some(x);
        Ok(h)
    }

    fn observe(&mut self, fb: &Feedback) -> Result<()> {
        let disclosed = self
            .pending
            .take()
            .ok_or_else(|| protocol("observe called before propose"))?;
        let x = disclosed
            .or(fb.x)
            .ok_or_else(|| protocol("unknown-graph feedback is missing x_t"))?;
        let v = fb.v.ok_or_else(|| protocol("unknown-graph feedback is missing v_t"))?;
        if !fb.mistake() {
            return Ok(());
        }
        let count = self
            .alive
            .iter()
            .filter(|&&g| self.graphs[g].has_arc(x, v))
            .count();
        let minority = disclosed.is_some() && v != x && 2 * count <= self.alive.len();
        if minority || (disclosed.is_none() && v != x) {
            let graphs = Arc::clone(&self.graphs);
            self.alive.retain(|&g| graphs[g].has_arc(x, v));
            if self.alive.is_empty() {
                return Err(Error::Realizability(
                    "no graph in the class contains the observed arc".into(),
                ));
            }
        }
        if minority {
            self.minority_mistakes += 1;
            return Ok(());
        }
        self.majority_mistakes += 1;
        if fb.y {
            let counts = self.arc_counts(v);
            let half = self.alive.len();
            let mut closed = vec![v];
            closed.extend(
                counts
                    .iter()
                    .enumerate()
                    .filter(|&(z, &c)| z != v.0 && 2 * c > half)
                    .map(|(z, _)| VertexId(z)),
            );
            self.inner.update_false_negative(&closed);
        } else {
            self.inner.update_false_positive(v);
        }
        Ok(())
    }

    fn expert_stats(&self) -> Option<ExpertStats> {
        Some(ExpertStats {
            count: self.inner.pool().len(),
            total_weight: self.inner.pool().total_weight(),
        })
    }
}
