//! Exhaustive adversary search for worst-case realizable mistake counts.

use super::{StandardLearner, StrategicLearner, UpdatePolicy};
use crate::dims::induced_labeling;
use crate::error::{Error, Result};
use crate::graph::{best_response, induced, HypothesisClass, ManipulationGraph, TieBreaker, VertexId};
use crate::protocol::{Feedback, FeedbackSetting};

struct Counter {
    nodes: usize,
    limit: usize,
}

impl Counter {
    fn tick(&mut self, best: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::Budget {
                what: "adversary search nodes",
                reached: best,
                limit: self.limit,
            });
        }
        Ok(())
    }
}

/// Largest number of mistakes an adversary can force on `learner` with
/// labels realizable by `cls`, in the standard protocol.
pub fn max_mistakes_standard<L: StandardLearner>(
    learner: &L,
    cls: &HypothesisClass,
    policy: UpdatePolicy,
    max_nodes: usize,
) -> Result<usize> {
    let version: Vec<usize> = (0..cls.len()).collect();
    let mut counter = Counter {
        nodes: 0,
        limit: max_nodes,
    };
    standard_dfs(learner, cls, policy, &version, &mut counter)
}

fn standard_dfs<L: StandardLearner>(
    learner: &L,
    cls: &HypothesisClass,
    policy: UpdatePolicy,
    version: &[usize],
    counter: &mut Counter,
) -> Result<usize> {
    counter.tick(0)?;
    let mut best = 0;
    for x in 0..cls.n() {
        let x = VertexId(x);
        let p = learner.predict(x);
        for y in [false, true] {
            let next: Vec<usize> = version
                .iter()
                .copied()
                .filter(|&h| cls.get(h).label(x) == y)
                .collect();
            if next.is_empty() {
                continue;
            }
            let mistake = y != p;
            let feeds = mistake || policy == UpdatePolicy::EveryRound;
            // Correct rounds matter only if they move the learner's state.
            if !mistake && (!feeds || next.len() == version.len()) {
                continue;
            }
            let mut l = learner.clone();
            if feeds {
                l.update(x, y)?;
            }
            let value = usize::from(mistake) + standard_dfs(&l, cls, policy, &next, counter)?;
            best = best.max(value);
        }
    }
    Ok(best)
}

/// Largest number of mistakes an adversary can force on a conservative
/// strategic learner in the fully informative setting, with labels realizable
/// by `cls` under `graph`. Rounds without a mistake are skipped, which is
/// exact for learners whose state changes only on mistakes.
pub fn max_mistakes_fi<L: StrategicLearner + Clone>(
    learner: &L,
    graph: &ManipulationGraph,
    cls: &HypothesisClass,
    max_nodes: usize,
) -> Result<usize> {
    let bars: Vec<_> = cls.iter().map(|h| induced_labeling(graph, h)).collect();
    let survivors: Vec<usize> = (0..cls.len()).collect();
    let mut counter = Counter {
        nodes: 0,
        limit: max_nodes,
    };
    fi_dfs(learner, graph, &bars, &survivors, &mut counter)
}

fn fi_dfs<L: StrategicLearner + Clone>(
    learner: &L,
    graph: &ManipulationGraph,
    bars: &[crate::graph::Hypothesis],
    survivors: &[usize],
    counter: &mut Counter,
) -> Result<usize> {
    counter.tick(0)?;
    let mut best = 0;
    for x in 0..graph.n() {
        let x = VertexId(x);
        let mut l = learner.clone();
        let h = l.propose(Some(x))?;
        let yhat = induced(graph, &h, x);
        let y = !yhat;
        let next: Vec<usize> = survivors
            .iter()
            .copied()
            .filter(|&i| bars[i].label(x) == y)
            .collect();
        if next.is_empty() {
            continue;
        }
        let v = best_response(graph, &h, x, &mut TieBreaker::lex_min())?;
        l.observe(&Feedback::build(
            FeedbackSetting::FullyInformative,
            graph,
            x,
            v,
            yhat,
            y,
        ))?;
        best = best.max(1 + fi_dfs(&l, graph, bars, &next, counter)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::{halving, soa};

    #[test]
    fn power_set_forces_three() {
        let cls = HypothesisClass::power_set(3).unwrap();
        let m = max_mistakes_standard(&soa(&cls).unwrap(), &cls, UpdatePolicy::EveryRound, 1 << 20);
        assert_eq!(m.unwrap(), 3);
    }

    #[test]
    fn singletons_force_one_on_soa() {
        let cls = HypothesisClass::singletons(3, 0..3).unwrap();
        let m = max_mistakes_standard(&soa(&cls).unwrap(), &cls, UpdatePolicy::EveryRound, 1 << 20);
        assert_eq!(m.unwrap(), 1);
        let h = max_mistakes_standard(&halving(&cls).unwrap(), &cls, UpdatePolicy::EveryRound, 1 << 20);
        assert_eq!(h.unwrap(), 1);
    }
}
