//! The learner-agent interaction engine.

mod adversary;
mod engine;
mod feedback;
mod sample;
mod source;
mod transcript;

pub use adversary::{adversary, AdversaryKind, Greedy, PmfStar, UgChain, UgOnlineLb};
pub use engine::{run_online, RunSpec};
pub use feedback::{Feedback, FeedbackSetting};
pub use sample::{best_in_hindsight, collect_pac_sample, tie_seed, Probe};
pub use source::{AgentSource, IidSource, SurvivorTracker, Truth};
pub use transcript::{parse_transcript_csv, RoundRecord, Transcript};
