use super::{ExpertStats, StrategicLearner};
use crate::error::{invalid, protocol, Error, Result};
use crate::graph::{best_response, induced, Hypothesis, ManipulationGraph, TieBreaker, VertexId};
use crate::protocol::{Feedback, FeedbackSetting};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Largest expert cover built unless the caller raises it.
pub const DEFAULT_MAX_EXPERTS: usize = 200_000;

#[derive(Debug, Clone)]
struct CoverPending {
    x: VertexId,
    inner_h: Hypothesis,
    inner_yhat: bool,
    self_label: bool,
}

/// One expert of the cover: runs the realizable learner on its own labels,
/// flipping the induced prediction at the flagged rounds.
#[derive(Debug, Clone)]
pub struct CoverExpert<L> {
    inner: L,
    flagged: Vec<usize>,
    graph: Arc<ManipulationGraph>,
    t: usize,
    pending: Option<CoverPending>,
}

impl<L: StrategicLearner + Clone> CoverExpert<L> {
    pub fn new(inner: L, graph: Arc<ManipulationGraph>, mut flagged: Vec<usize>) -> Self {
        flagged.sort_unstable();
        Self {
            inner,
            flagged,
            graph,
            t: 0,
            pending: None,
        }
    }

    pub fn flagged(&self) -> &[usize] {
        &self.flagged
    }
}

impl<L: StrategicLearner + Clone> StrategicLearner for CoverExpert<L> {
    fn name(&self) -> String {
        format!("cover{:?}", self.flagged)
    }

    fn supports(&self, setting: FeedbackSetting) -> bool {
        setting == FeedbackSetting::FullyInformative
    }

    fn propose(&mut self, x: Option<VertexId>) -> Result<Hypothesis> {
        if self.pending.is_some() {
            return Err(protocol("propose called twice in one round"));
        }
        let x = x.ok_or_else(|| protocol("cover experts need x_t before proposing"))?;
        let inner_h = self.inner.propose(Some(x))?;
        let inner_yhat = induced(&self.graph, &inner_h, x);
        let mut h = inner_h.clone();
        let self_label = if self.flagged.binary_search(&self.t).is_ok() {
            if inner_yhat {
                for z in self.graph.closed_neighborhood(x) {
                    h.set(z, false);
                }
                false
            } else {
                h.set(x, true);
                true
            }
        } else {
            inner_yhat
        };
        self.pending = Some(CoverPending {
            x,
            inner_h,
            inner_yhat,
            self_label,
        });
        Ok(h)
    }

    fn observe(&mut self, _fb: &Feedback) -> Result<()> {
        let p = self
            .pending
            .take()
            .ok_or_else(|| protocol("observe called before propose"))?;
        let v = best_response(&self.graph, &p.inner_h, p.x, &mut TieBreaker::lex_min())?;
        let inner_fb = Feedback::build(
            FeedbackSetting::FullyInformative,
            &self.graph,
            p.x,
            v,
            p.inner_yhat,
            p.self_label,
        );
        self.inner.observe(&inner_fb)?;
        self.t += 1;
        Ok(())
    }
}

/// Σ_{L ≤ M} C(T, L), or `None` on overflow.
pub fn cover_size(horizon: usize, budget: usize) -> Option<usize> {
    let mut total: usize = 0;
    let mut c: usize = 1;
    for l in 0..=budget.min(horizon) {
        if l > 0 {
            c = c.checked_mul(horizon - l + 1)? / l;
        }
        total = total.checked_add(c)?;
    }
    Some(total)
}

/// One expert per subset of rounds {i_1 < … < i_L}, L ≤ M, ordered by size
/// and then lexicographically.
pub fn expert_cover<L: StrategicLearner + Clone>(
    a_rel: &L,
    graph: &ManipulationGraph,
    horizon: usize,
    budget: usize,
    max_experts: usize,
) -> Result<Vec<CoverExpert<L>>> {
    let size = cover_size(horizon, budget).unwrap_or(usize::MAX);
    if size > max_experts {
        return Err(Error::Budget {
            what: "expert cover",
            reached: size,
            limit: max_experts,
        });
    }
    let graph = Arc::new(graph.clone());
    let mut out = Vec::with_capacity(size);
    for l in 0..=budget.min(horizon) {
        let mut idx: Vec<usize> = (0..l).collect();
        loop {
            out.push(CoverExpert::new(a_rel.clone(), Arc::clone(&graph), idx.clone()));
            // Advance to the next l-combination of 0..horizon.
            let mut i = l;
            while i > 0 && idx[i - 1] == horizon - l + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..l {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct HedgePending {
    x: VertexId,
    proposals: Vec<Hypothesis>,
    probs: Vec<f64>,
}

/// Multiplicative weights over an expert cover with η = sqrt(8 ln N / T).
/// The implemented hypothesis is drawn from the weights with a seeded RNG;
/// the expected loss under the mixture is tracked exactly.
#[derive(Debug, Clone)]
pub struct HedgeCover<L> {
    experts: Vec<CoverExpert<L>>,
    log_w: Vec<f64>,
    eta: f64,
    horizon: usize,
    graph: Arc<ManipulationGraph>,
    rng: ChaCha8Rng,
    pending: Option<HedgePending>,
    expected_loss: f64,
    expert_losses: Vec<u64>,
    mistake_budget: usize,
}

impl<L: StrategicLearner + Clone> HedgeCover<L> {
    pub fn new(
        experts: Vec<CoverExpert<L>>,
        graph: &ManipulationGraph,
        horizon: usize,
        mistake_budget: usize,
        seed: u64,
    ) -> Result<Self> {
        if experts.is_empty() || horizon == 0 {
            return Err(invalid("hedge needs at least one expert and a positive horizon"));
        }
        let n = experts.len();
        Ok(Self {
            eta: (8.0 * (n as f64).ln() / horizon as f64).sqrt(),
            log_w: vec![0.0; n],
            expert_losses: vec![0; n],
            experts,
            horizon,
            graph: Arc::new(graph.clone()),
            rng: ChaCha8Rng::seed_from_u64(seed),
            pending: None,
            expected_loss: 0.0,
            mistake_budget,
        })
    }

    pub fn expert_count(&self) -> usize {
        self.experts.len()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// The M used to build the cover.
    pub fn mistake_budget(&self) -> usize {
        self.mistake_budget
    }

    /// Σ_t E_{i∼p_t}[ℓ_t(i)].
    pub fn expected_loss(&self) -> f64 {
        self.expected_loss
    }

    pub fn expert_losses(&self) -> &[u64] {
        &self.expert_losses
    }

    pub fn experts(&self) -> &[CoverExpert<L>] {
        &self.experts
    }

    pub fn regret_bound(&self) -> f64 {
        super::bounds::hedge_regret_bound(self.horizon, self.experts.len())
    }

    fn probabilities(&self) -> Vec<f64> {
        let max = self.log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_w.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }
}

impl<L: StrategicLearner + Clone> StrategicLearner for HedgeCover<L> {
    fn name(&self) -> String {
        "mw-agnostic-fi".to_string()
    }

    fn supports(&self, setting: FeedbackSetting) -> bool {
        setting == FeedbackSetting::FullyInformative
    }

    fn propose(&mut self, x: Option<VertexId>) -> Result<Hypothesis> {
        if self.pending.is_some() {
            return Err(protocol("propose called twice in one round"));
        }
        let x = x.ok_or_else(|| protocol("hedge needs x_t before proposing"))?;
        let proposals = self
            .experts
            .iter_mut()
            .map(|e| e.propose(Some(x)))
            .collect::<Result<Vec<_>>>()?;
        let probs = self.probabilities();
        let r: f64 = self.rng.random();
        let mut acc = 0.0;
        let mut chosen = probs.len() - 1;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                chosen = i;
                break;
            }
        }
        let h = proposals[chosen].clone();
        self.pending = Some(HedgePending { x, proposals, probs });
        Ok(h)
    }

    fn observe(&mut self, fb: &Feedback) -> Result<()> {
        let p = self
            .pending
            .take()
            .ok_or_else(|| protocol("observe called before propose"))?;
        if fb.x.is_some_and(|x| x != p.x) {
            return Err(protocol("feedback x_t differs from the disclosed x_t"));
        }
        for (i, h) in p.proposals.iter().enumerate() {
            let loss = induced(&self.graph, h, p.x) != fb.y;
            if loss {
                self.expected_loss += p.probs[i];
                self.log_w[i] -= self.eta;
                self.expert_losses[i] += 1;
            }
        }
        for e in &mut self.experts {
            e.observe(fb)?;
        }
        Ok(())
    }

    fn expert_stats(&self) -> Option<ExpertStats> {
        Some(ExpertStats {
            count: self.experts.len(),
            total_weight: self.probabilities().iter().sum(),
        })
    }
}
