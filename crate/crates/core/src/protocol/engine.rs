use super::source::AgentSource;
use super::transcript::{RoundRecord, Transcript};
use super::{best_in_hindsight, Feedback, FeedbackSetting};
use crate::error::{protocol, Result};
use crate::exec::Exec;
use crate::graph::{best_response, induced, HypothesisClass, TieBreakRule, TieBreaker};
use crate::online::StrategicLearner;
use crate::Error;
use std::time::Instant;

/// Engine knobs for one run.
#[derive(Debug, Clone)]
pub struct RunSpec<'a> {
    pub setting: FeedbackSetting,
    pub rounds: usize,
    pub rule: TieBreakRule,
    /// When given, regret is computed against the best member in hindsight.
    pub regret_class: Option<&'a HypothesisClass>,
    pub exec: Exec,
}

impl<'a> RunSpec<'a> {
    pub fn new(setting: FeedbackSetting, rounds: usize) -> Self {
        Self {
            setting,
            rounds,
            rule: TieBreakRule::LexMin,
            regret_class: None,
            exec: Exec::default(),
        }
    }

    pub fn with_rule(mut self, rule: TieBreakRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_regret(mut self, cls: &'a HypothesisClass) -> Self {
        self.regret_class = Some(cls);
        self
    }
}

/// Play `spec.rounds` rounds of the learner against the source.
pub fn run_online(
    learner: &mut dyn StrategicLearner,
    source: &mut dyn AgentSource,
    spec: &RunSpec<'_>,
) -> Result<Transcript> {
    let setting = spec.setting;
    if !learner.supports(setting) {
        return Err(protocol(format!(
            "learner `{}` does not support setting `{setting}`",
            learner.name()
        )));
    }
    let start = Instant::now();
    let mut tie = TieBreaker::new(spec.rule.clone());
    let mut rounds = Vec::with_capacity(spec.rounds);
    let mut hypotheses = Vec::with_capacity(spec.rounds);
    let mut mistakes = 0;
    for t in 0..spec.rounds {
        let committed = source.feature(t)?;
        let disclosed = if setting.discloses_x_before() {
            Some(committed.ok_or_else(|| {
                protocol(format!("source `{}` cannot disclose x_t before h_t", source.name()))
            })?)
        } else {
            None
        };
        let h = learner.propose(disclosed)?;
        let agent = source.agent(t, committed, &h)?;
        if let Some(x) = committed {
            if agent.x != x {
                return Err(protocol(format!("round {t}: agent differs from committed x_t")));
            }
        }
        let graph = source.graph();
        if h.n() != graph.n() || agent.x.index() >= graph.n() {
            return Err(protocol(format!("round {t}: universe mismatch")));
        }
        let v = best_response(graph, &h, agent.x, &mut tie)?;
        let yhat = h.label(v);
        let mistake = yhat != agent.y;
        if mistake != (induced(graph, &h, agent.x) != agent.y) {
            return Err(protocol(format!("round {t}: mistake differs from strategic loss")));
        }
        let fb = Feedback::build(setting, graph, agent.x, v, yhat, agent.y);
        learner.observe(&fb)?;
        source.record(agent, &h, v)?;
        if source.realizable() && source.survivors() == Some(0) {
            return Err(Error::Realizability(format!("round {t}: no surviving target")));
        }
        mistakes += mistake as usize;
        let stats = learner.expert_stats();
        rounds.push(RoundRecord {
            t,
            x: agent.x,
            v,
            yhat,
            y: agent.y,
            mistake,
            experts: stats.map(|s| s.count),
            total_weight: stats.map(|s| s.total_weight),
            h_digest: h.digest(),
            h_positive: h.positive_count(),
        });
        hypotheses.push(h);
    }
    let truth = source.final_truth();
    for (r, h) in rounds.iter().zip(&hypotheses) {
        if r.mistake != (induced(&truth.graph, h, r.x) != r.y) {
            return Err(protocol(format!("round {}: replay under the final graph disagrees", r.t)));
        }
    }
    if source.realizable() {
        let target = truth
            .target
            .as_ref()
            .ok_or_else(|| Error::Realizability("realizable source reported no target".into()))?;
        if let Some(r) = rounds.iter().find(|r| induced(&truth.graph, target, r.x) != r.y) {
            return Err(Error::Realizability(format!("round {}: target misclassifies the agent", r.t)));
        }
    }
    let agents: Vec<_> = rounds.iter().map(|r| crate::graph::Agent { x: r.x, y: r.y }).collect();
    let best_loss = match spec.regret_class {
        Some(cls) => Some(best_in_hindsight(cls, &truth.graph, &agents, spec.exec)?.1),
        None => None,
    };
    Ok(Transcript {
        learner: learner.name(),
        source: source.name(),
        rounds,
        hypotheses,
        mistakes,
        best_loss,
        final_graph: truth.graph,
        target: truth.target,
        survivors: source.survivors(),
        wall_time: start.elapsed(),
    })
}
