use super::{induced, Agent, Hypothesis, ManipulationGraph};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Finite-support distribution over agents with exact rational weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentDistribution {
    support: Vec<(Agent, Rational)>,
    sampler: WeightedIndex<f64>,
}

impl AgentDistribution {
    /// Weights must be nonnegative and sum to exactly one. Zero-weight entries are dropped.
    pub fn new(support: Vec<(Agent, Rational)>) -> Result<Self> {
        let mut total = Rational::zero();
        for (a, p) in &support {
            if p.is_negative() {
                return Err(invalid(format!("negative weight {p} on agent {a:?}")));
            }
            total += p;
        }
        if total != Rational::one() {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        let support: Vec<_> = support.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let weights: Vec<f64> = support
            .iter()
            .map(|(_, p)| p.to_f64().unwrap_or(0.0))
            .collect();
        let sampler = WeightedIndex::new(&weights)
            .map_err(|e| invalid(format!("cannot sample from weights: {e}")))?;
        Ok(Self { support, sampler })
    }

    /// Normalize integer weights.
    pub fn from_counts(entries: &[(Agent, u64)]) -> Result<Self> {
        let total: u64 = entries.iter().map(|(_, w)| *w).sum();
        if total == 0 {
            return Err(invalid("all weights are zero"));
        }
        Self::new(
            entries
                .iter()
                .map(|(a, w)| (*a, ratio(*w as i64, total as i64)))
                .collect(),
        )
    }

    pub fn uniform(agents: &[Agent]) -> Result<Self> {
        Self::from_counts(&agents.iter().map(|a| (*a, 1)).collect::<Vec<_>>())
    }

    pub fn point_mass(agent: Agent) -> Self {
        Self::new(vec![(agent, Rational::one())]).expect("point mass is valid")
    }

    pub fn support(&self) -> &[(Agent, Rational)] {
        &self.support
    }

    /// Largest vertex index in the support plus one.
    pub fn min_universe(&self) -> usize {
        self.support.iter().map(|(a, _)| a.x.0 + 1).max().unwrap_or(0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Agent {
        self.support[self.sampler.sample(rng)].0
    }

    /// Exact marginal mass of each vertex in `0..n`.
    pub fn marginal(&self, n: usize) -> Vec<Rational> {
        let mut m = vec![Rational::zero(); n];
        for (a, p) in &self.support {
            m[a.x.0] += p;
        }
        m
    }
}

const MC_CHUNK: usize = 8192;

/// Sampled strategic loss. Chunks use independent ChaCha streams, so the
/// value does not depend on the execution strategy.
pub fn monte_carlo_strategic_loss(
    graph: &ManipulationGraph,
    h: &Hypothesis,
    dist: &AgentDistribution,
    draws: usize,
    seed: u64,
    exec: Exec,
) -> Result<f64> {
    if draws == 0 {
        return Err(invalid("zero Monte Carlo draws"));
    }
    if dist.min_universe() > graph.n() || h.n() != graph.n() {
        return Err(invalid("distribution or hypothesis does not fit the graph"));
    }
    let errors: usize = exec
        .map_chunks(draws, MC_CHUNK, |range| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((range.start / MC_CHUNK) as u64);
            range
                .map(|_| {
                    let a = dist.sample(&mut rng);
                    usize::from(induced(graph, h, a.x) != a.y)
                })
                .sum::<usize>()
        })
        .into_iter()
        .sum();
    Ok(errors as f64 / draws as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_weights() {
        let a = Agent::new(0, true);
        assert!(AgentDistribution::new(vec![(a, ratio(1, 2))]).is_err());
        assert!(AgentDistribution::new(vec![(a, ratio(3, 2)), (a, ratio(-1, 2))]).is_err());
        assert!(AgentDistribution::new(vec![(a, ratio(1, 2)), (a, ratio(1, 2))]).is_ok());
    }

    #[test]
    fn marginal_sums_weights() {
        let d = AgentDistribution::from_counts(&[
            (Agent::new(0, true), 1),
            (Agent::new(0, false), 1),
            (Agent::new(2, true), 2),
        ])
        .unwrap();
        let m = d.marginal(3);
        assert_eq!(m[0], ratio(1, 2));
        assert_eq!(m[1], ratio(0, 1));
        assert_eq!(m[2], ratio(1, 2));
    }
}
