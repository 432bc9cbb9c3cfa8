//! Standard and strategic online learners.

pub mod bounds;
pub mod certify;
mod cover;
mod experts;
mod fi;
mod naive;
mod pmf;
mod registry;
mod standard;
mod ug;

pub use cover::{cover_size, expert_cover, CoverExpert, HedgeCover, DEFAULT_MAX_EXPERTS};
pub use experts::{Expert, ExpertPool};
pub use fi::{red2online_fi, Red2OnlineFi};
pub use naive::{naive, NaiveStrategic};
pub use pmf::{red2online_pmf, Red2OnlinePmf};
pub use registry::{
    agnostic_online_fi, build_learner, AgnosticOptions, LearnerKind, LearnerOptions,
};
pub use standard::{
    halving, run_standard, soa, AnyStandard, BaseKind, Halving, Soa, StandardLearner, UpdatePolicy,
};
pub use ug::{ug_online, UgOnline};

use crate::error::Result;
use crate::graph::{Hypothesis, VertexId};
use crate::protocol::{Feedback, FeedbackSetting};

/// Expert-set size and total weight after a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpertStats {
    pub count: usize,
    pub total_weight: f64,
}

/// A learner in the strategic protocol. Rounds strictly alternate
/// `propose` then `observe`; anything else is a protocol error.
pub trait StrategicLearner: Send {
    fn name(&self) -> String;
    fn supports(&self, setting: FeedbackSetting) -> bool;
    /// `x` is the disclosed x_t in settings that reveal it beforehand.
    fn propose(&mut self, x: Option<VertexId>) -> Result<Hypothesis>;
    fn observe(&mut self, fb: &Feedback) -> Result<()>;
    fn expert_stats(&self) -> Option<ExpertStats> {
        None
    }
}

impl StrategicLearner for Box<dyn StrategicLearner> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn supports(&self, setting: FeedbackSetting) -> bool {
        (**self).supports(setting)
    }

    fn propose(&mut self, x: Option<VertexId>) -> Result<Hypothesis> {
        (**self).propose(x)
    }

    fn observe(&mut self, fb: &Feedback) -> Result<()> {
        (**self).observe(fb)
    }

    fn expert_stats(&self) -> Option<ExpertStats> {
        (**self).expert_stats()
    }
}
