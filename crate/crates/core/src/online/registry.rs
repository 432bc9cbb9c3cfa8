use super::bounds::fi_ceiling;
use super::certify::max_mistakes_fi;
use super::{
    expert_cover, naive, red2online_fi, red2online_pmf, soa, ug_online, AnyStandard, BaseKind,
    HedgeCover, Red2OnlineFi, Soa, StrategicLearner, UpdatePolicy, DEFAULT_MAX_EXPERTS,
};
use crate::constructions::Fixture;
use crate::dims::littlestone_dimension;
use crate::error::{invalid, Error, Result};
use crate::graph::{HypothesisClass, ManipulationGraph};
use crate::protocol::FeedbackSetting;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Every learner name the harness accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    Soa,
    Halving,
    Red2fi,
    Red2pmf,
    UgOnline,
    MwAgnosticFi,
    Erm,
    UgRel,
    UgAgn,
    Neighborlearn,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 10] = [
        LearnerKind::Soa,
        LearnerKind::Halving,
        LearnerKind::Red2fi,
        LearnerKind::Red2pmf,
        LearnerKind::UgOnline,
        LearnerKind::MwAgnosticFi,
        LearnerKind::Erm,
        LearnerKind::UgRel,
        LearnerKind::UgAgn,
        LearnerKind::Neighborlearn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::Soa => "soa",
            LearnerKind::Halving => "halving",
            LearnerKind::Red2fi => "red2fi",
            LearnerKind::Red2pmf => "red2pmf",
            LearnerKind::UgOnline => "ug-online",
            LearnerKind::MwAgnosticFi => "mw-agnostic-fi",
            LearnerKind::Erm => "erm",
            LearnerKind::UgRel => "ug-rel",
            LearnerKind::UgAgn => "ug-agn",
            LearnerKind::Neighborlearn => "neighborlearn",
        }
    }

    pub fn is_online(self) -> bool {
        !self.is_pac()
    }

    pub fn is_pac(self) -> bool {
        matches!(
            self,
            LearnerKind::Erm | LearnerKind::UgRel | LearnerKind::UgAgn | LearnerKind::Neighborlearn
        )
    }

    /// Settings a learner can run in.
    pub fn supports(self, setting: FeedbackSetting) -> bool {
        use FeedbackSetting::*;
        match self {
            LearnerKind::Soa | LearnerKind::Halving => true,
            LearnerKind::Red2fi | LearnerKind::MwAgnosticFi => setting == FullyInformative,
            LearnerKind::Red2pmf => setting.graph_known(),
            LearnerKind::UgOnline => matches!(setting, UgXThenV | UgPairAfter),
            LearnerKind::Erm => setting.graph_known(),
            LearnerKind::UgRel | LearnerKind::UgAgn | LearnerKind::Neighborlearn => {
                !setting.graph_known()
            }
        }
    }

    pub fn default_setting(self) -> FeedbackSetting {
        match self {
            LearnerKind::Red2fi | LearnerKind::MwAgnosticFi | LearnerKind::Erm => {
                FeedbackSetting::FullyInformative
            }
            LearnerKind::Soa | LearnerKind::Halving | LearnerKind::Red2pmf => FeedbackSetting::PmfV,
            _ => FeedbackSetting::UgXThenV,
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown learner {s:?}")))
    }
}

/// Knobs for building online learners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerOptions {
    /// Standard learner inside the reductions and naive wrappers.
    pub base: BaseKind,
    /// Feeding rule for the naive wrappers.
    pub policy: UpdatePolicy,
    pub prune_floor: Option<f64>,
    /// Degree bound; defaults to the graph's (or graph class's) bound.
    pub k_bound: Option<usize>,
    pub max_experts: usize,
    /// Tighten the cover's mistake budget by exhaustive search.
    pub certify_budget: bool,
}

impl Default for LearnerOptions {
    fn default() -> Self {
        Self {
            base: BaseKind::Soa,
            policy: UpdatePolicy::EveryRound,
            prune_floor: None,
            k_bound: None,
            max_experts: DEFAULT_MAX_EXPERTS,
            certify_budget: true,
        }
    }
}

/// Build an online learner for `fixture` under `setting`.
pub fn build_learner(
    kind: LearnerKind,
    fixture: &Fixture,
    setting: FeedbackSetting,
    horizon: usize,
    seed: u64,
    opts: &LearnerOptions,
) -> Result<Box<dyn StrategicLearner>> {
    if !kind.supports(setting) {
        return Err(invalid(format!("learner {kind} does not run under setting {setting}")));
    }
    let base = || AnyStandard::build(opts.base, &fixture.class);
    let learner: Box<dyn StrategicLearner> = match kind {
        LearnerKind::Soa => Box::new(naive(AnyStandard::build(BaseKind::Soa, &fixture.class)?, opts.policy)),
        LearnerKind::Halving => {
            Box::new(naive(AnyStandard::build(BaseKind::Halving, &fixture.class)?, opts.policy))
        }
        LearnerKind::Red2fi => {
            let mut l = red2online_fi(base()?, &fixture.graph);
            l.set_prune_floor(opts.prune_floor);
            Box::new(l)
        }
        LearnerKind::Red2pmf => {
            let k = opts.k_bound.unwrap_or_else(|| fixture.graph.max_out_degree());
            let mut l = red2online_pmf(base()?, k);
            l.set_prune_floor(opts.prune_floor);
            Box::new(l)
        }
        LearnerKind::UgOnline => {
            let graphs = fixture
                .graphs
                .as_ref()
                .ok_or_else(|| invalid("ug-online needs a fixture with a graph class"))?
                .as_family();
            let class = graphs.materialize(1 << 16)?;
            let k = opts.k_bound.unwrap_or_else(|| graphs.declared_k());
            Box::new(ug_online(base()?, &class, k)?)
        }
        LearnerKind::MwAgnosticFi => Box::new(agnostic_online_fi(
            &fixture.class,
            &fixture.graph,
            horizon,
            &AgnosticOptions {
                seed,
                max_experts: opts.max_experts,
                certify: opts.certify_budget,
                certify_nodes: 2_000_000,
            },
        )?),
        LearnerKind::Erm | LearnerKind::UgRel | LearnerKind::UgAgn | LearnerKind::Neighborlearn => {
            return Err(invalid(format!("{kind} is a batch learner, not an online one")));
        }
    };
    Ok(learner)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgnosticOptions {
    pub seed: u64,
    pub max_experts: usize,
    /// Replace the ceiling by the exhaustively certified worst case when smaller.
    pub certify: bool,
    pub certify_nodes: usize,
}

impl Default for AgnosticOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_experts: DEFAULT_MAX_EXPERTS,
            certify: true,
            certify_nodes: 2_000_000,
        }
    }
}

/// Hedge over the expert cover of red2online_fi(soa).
pub fn agnostic_online_fi(
    cls: &HypothesisClass,
    graph: &ManipulationGraph,
    horizon: usize,
    opts: &AgnosticOptions,
) -> Result<HedgeCover<Red2OnlineFi<Soa>>> {
    let a_rel = red2online_fi(soa(cls)?, graph);
    let ldim = littlestone_dimension(cls.members())?;
    let mut budget = fi_ceiling(ldim, graph.max_out_degree());
    if opts.certify {
        match max_mistakes_fi(&a_rel, graph, cls, opts.certify_nodes) {
            Ok(m) => budget = budget.min(m),
            Err(Error::Budget { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let budget = budget.min(horizon);
    let cover = expert_cover(&a_rel, graph, horizon, budget, opts.max_experts)?;
    HedgeCover::new(cover, graph, horizon, budget, opts.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in LearnerKind::ALL {
            assert_eq!(k.as_str().parse::<LearnerKind>().unwrap(), k);
            assert!(k.supports(k.default_setting()));
        }
        assert!("nope".parse::<LearnerKind>().is_err());
    }
}
