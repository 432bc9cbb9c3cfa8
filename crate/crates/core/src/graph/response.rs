use super::{Agent, AgentDistribution, Hypothesis, ManipulationGraph, Rational, VertexId};
use crate::error::{invalid, Error, Result};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How an agent picks among several positive neighbors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreakRule {
    LexMin,
    UniformRandom { seed: u64 },
    Scripted { choices: Vec<usize> },
}

impl Default for TieBreakRule {
    fn default() -> Self {
        TieBreakRule::LexMin
    }
}

/// Per-run tie-breaking state built from a [`TieBreakRule`].
#[derive(Debug, Clone)]
pub struct TieBreaker {
    rule: TieBreakRule,
    rng: Option<ChaCha8Rng>,
    cursor: usize,
}

impl TieBreaker {
    pub fn new(rule: TieBreakRule) -> Self {
        let rng = match &rule {
            TieBreakRule::UniformRandom { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
            _ => None,
        };
        Self {
            rule,
            rng,
            cursor: 0,
        }
    }

    pub fn lex_min() -> Self {
        Self::new(TieBreakRule::LexMin)
    }

    pub fn rule(&self) -> &TieBreakRule {
        &self.rule
    }

    /// Pick one of `candidates`, which must be nonempty and sorted.
    pub fn choose(&mut self, candidates: &[VertexId]) -> Result<VertexId> {
        debug_assert!(!candidates.is_empty());
        match &self.rule {
            TieBreakRule::LexMin => Ok(candidates[0]),
            TieBreakRule::UniformRandom { .. } => {
                let rng = self.rng.as_mut().expect("rng present for UniformRandom");
                Ok(candidates[rng.random_range(0..candidates.len())])
            }
            TieBreakRule::Scripted { choices } => {
                let Some(&c) = choices.get(self.cursor) else {
                    return Err(Error::TieBreak(format!(
                        "script exhausted after {} choices",
                        self.cursor
                    )));
                };
                self.cursor += 1;
                candidates.get(c).copied().ok_or_else(|| {
                    Error::TieBreak(format!(
                        "scripted index {c} out of range for {} candidates",
                        candidates.len()
                    ))
                })
            }
        }
    }
}

fn check_vertex(graph: &ManipulationGraph, h: &Hypothesis, x: VertexId) -> Result<()> {
    if h.n() != graph.n() {
        return Err(invalid(format!(
            "hypothesis length {} differs from universe size {}",
            h.n(),
            graph.n()
        )));
    }
    if x.0 >= graph.n() {
        return Err(invalid(format!("vertex {x} outside universe of size {}", graph.n())));
    }
    Ok(())
}

/// The manipulated feature π_{G,h}(x).
pub fn best_response(
    graph: &ManipulationGraph,
    h: &Hypothesis,
    x: VertexId,
    tie: &mut TieBreaker,
) -> Result<VertexId> {
    check_vertex(graph, h, x)?;
    if h.label(x) {
        return Ok(x);
    }
    let candidates: Vec<VertexId> = graph
        .neighbors(x)
        .iter()
        .copied()
        .filter(|&v| h.label(v))
        .collect();
    if candidates.is_empty() {
        Ok(x)
    } else {
        tie.choose(&candidates)
    }
}

/// h̄_G(x) = h(π_{G,h}(x)).
pub fn induced_label(
    graph: &ManipulationGraph,
    h: &Hypothesis,
    x: VertexId,
    tie: &mut TieBreaker,
) -> Result<bool> {
    let v = best_response(graph, h, x, tie)?;
    Ok(h.label(v))
}

/// Tie-free form of the induced label: h(x) or some neighbor positive.
/// Callers must have validated `x` and `h` against `graph`.
pub fn induced(graph: &ManipulationGraph, h: &Hypothesis, x: VertexId) -> bool {
    h.label(x) || graph.neighbors(x).iter().any(|&v| h.label(v))
}

pub fn strategic_loss(
    graph: &ManipulationGraph,
    h: &Hypothesis,
    agent: Agent,
    tie: &mut TieBreaker,
) -> Result<u8> {
    Ok(u8::from(induced_label(graph, h, agent.x, tie)? != agent.y))
}

pub fn empirical_strategic_loss(
    graph: &ManipulationGraph,
    h: &Hypothesis,
    sample: &[Agent],
    tie: &mut TieBreaker,
) -> Result<Rational> {
    if sample.is_empty() {
        return Err(Error::Domain("empirical loss of an empty sample".into()));
    }
    let mut errors = 0usize;
    for &a in sample {
        errors += usize::from(strategic_loss(graph, h, a, tie)?);
    }
    Ok(super::ratio(errors as i64, sample.len() as i64))
}

/// Exact population loss. Every rule is evaluated without consuming state:
/// the per-agent term is averaged over the whole tie set, which is exact for
/// UniformRandom and coincides with every deterministic choice.
pub fn population_strategic_loss(
    graph: &ManipulationGraph,
    h: &Hypothesis,
    dist: &AgentDistribution,
    _rule: &TieBreakRule,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for (agent, p) in dist.support() {
        check_vertex(graph, h, agent.x)?;
        let term = if h.label(agent.x) {
            super::ratio(i64::from(!agent.y), 1)
        } else {
            let ties: Vec<VertexId> = graph
                .neighbors(agent.x)
                .iter()
                .copied()
                .filter(|&v| h.label(v))
                .collect();
            if ties.is_empty() {
                super::ratio(i64::from(agent.y), 1)
            } else {
                let wrong = ties.iter().filter(|&&v| h.label(v) != agent.y).count();
                super::ratio(wrong as i64, ties.len() as i64)
            }
        };
        total += term * p;
    }
    Ok(total)
}
