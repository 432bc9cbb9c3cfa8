use super::experts::{at_least, ExpertPool};
use super::{ExpertStats, StandardLearner, StrategicLearner};
use crate::error::{protocol, Result};
use crate::graph::{Hypothesis, VertexId};
use crate::protocol::{Feedback, FeedbackSetting};

/// Weighted-expert reduction for post-manipulation feedback.
#[derive(Debug, Clone)]
pub struct Red2OnlinePmf<L> {
    n: usize,
    k_bound: usize,
    pool: ExpertPool<L>,
    pending: bool,
}

pub fn red2online_pmf<L: StandardLearner>(base: L, k_bound: usize) -> Red2OnlinePmf<L> {
    Red2OnlinePmf::new(base, k_bound)
}

impl<L: StandardLearner> Red2OnlinePmf<L> {
    pub fn new(base: L, k_bound: usize) -> Self {
        Self {
            n: base.n(),
            k_bound,
            pool: ExpertPool::new(base),
            pending: false,
        }
    }

    pub fn pool(&self) -> &ExpertPool<L> {
        &self.pool
    }

    pub fn k_bound(&self) -> usize {
        self.k_bound
    }

    pub fn set_prune_floor(&mut self, floor: Option<f64>) {
        self.pool.set_prune_floor(floor);
    }

    /// Vertex-wise vote: positive where experts positive there hold at least
    /// 1/(2(k+1)) of the total weight.
    pub fn hypothesis(&self) -> Hypothesis {
        let mut mass = vec![0.0f64; self.n];
        for e in self.pool.experts() {
            for (z, m) in mass.iter_mut().enumerate() {
                if e.learner.predict(VertexId(z)) {
                    *m += e.weight;
                }
            }
        }
        let threshold = self.pool.total_weight() / (2.0 * (self.k_bound as f64 + 1.0));
        let labels: Vec<bool> = mass.iter().map(|&m| at_least(m, threshold)).collect();
        Hypothesis::from_bits(&labels)
    }

    /// False positive at v: feed (v, 0) to and halve experts positive at v.
    pub fn update_false_positive(&mut self, v: VertexId) {
        self.pool
            .halve_and_feed(|l| if l.predict(v) { Some(v) } else { None });
    }

    /// False negative: split experts all-negative on `closed`, which is N[v].
    pub fn update_false_negative(&mut self, closed: &[VertexId]) {
        self.pool
            .split(|l| closed.iter().all(|&z| !l.predict(z)), closed);
    }
}

impl<L: StandardLearner> StrategicLearner for Red2OnlinePmf<L> {
    fn name(&self) -> String {
        let base = self.pool.experts().first().map_or("?", |e| e.learner.name());
        format!("red2pmf({base})")
    }

    fn supports(&self, setting: FeedbackSetting) -> bool {
        setting.graph_known()
    }

    fn propose(&mut self, _x: Option<VertexId>) -> Result<Hypothesis> {
        if self.pending {
            return Err(protocol("propose called twice in one round"));
        }
        self.pending = true;
        Ok(self.hypothesis())
    }

    fn observe(&mut self, fb: &Feedback) -> Result<()> {
        if !std::mem::replace(&mut self.pending, false) {
            return Err(protocol("observe called before propose"));
        }
        if !fb.mistake() {
            return Ok(());
        }
        let v = fb.v.ok_or_else(|| protocol("red2pmf feedback is missing v_t"))?;
        if fb.y {
            let nv = fb
                .nv
                .as_ref()
                .ok_or_else(|| protocol("false negative without N(v_t)"))?;
            let mut closed = vec![v];
            closed.extend_from_slice(nv);
            self.update_false_negative(&closed);
        } else {
            self.update_false_positive(v);
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
