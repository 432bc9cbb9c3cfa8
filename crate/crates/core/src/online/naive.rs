use super::{StandardLearner, StrategicLearner, UpdatePolicy};
use crate::error::{protocol, Error, Result};
use crate::graph::{Hypothesis, VertexId};
use crate::protocol::{Feedback, FeedbackSetting};

/// Baseline that ignores manipulation: plays the standard learner's labeling
/// and feeds it (x_t, y_t), or (v_t, y_t) when x_t is never revealed.
/// Examples that would empty its version space are skipped.
#[derive(Debug, Clone)]
pub struct NaiveStrategic<L> {
    learner: L,
    policy: UpdatePolicy,
    pending: bool,
    skipped: usize,
}

pub fn naive<L: StandardLearner>(learner: L, policy: UpdatePolicy) -> NaiveStrategic<L> {
    NaiveStrategic {
        learner,
        policy,
        pending: false,
        skipped: 0,
    }
}

impl<L: StandardLearner> NaiveStrategic<L> {
    pub fn learner(&self) -> &L {
        &self.learner
    }

    /// Examples dropped because no hypothesis fit them.
    pub fn skipped(&self) -> usize {
        self.skipped
    }
}

impl<L: StandardLearner> StrategicLearner for NaiveStrategic<L> {
    fn name(&self) -> String {
        self.learner.name().to_string()
    }

    fn supports(&self, _setting: FeedbackSetting) -> bool {
        true
    }

    fn propose(&mut self, _x: Option<VertexId>) -> Result<Hypothesis> {
        if std::mem::replace(&mut self.pending, true) {
            return Err(protocol("propose called twice in one round"));
        }
        Ok(self.learner.hypothesis())
    }

    fn observe(&mut self, fb: &Feedback) -> Result<()> {
        if !std::mem::replace(&mut self.pending, false) {
            return Err(protocol("observe called before propose"));
        }
        let z = fb
            .x
            .or(fb.v)
            .ok_or_else(|| protocol("feedback carries neither x_t nor v_t"))?;
        if self.policy == UpdatePolicy::EveryRound || fb.mistake() {
            match self.learner.update(z, fb.y) {
                Ok(()) => {}
                Err(Error::Realizability(_)) => self.skipped += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}
