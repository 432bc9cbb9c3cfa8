use crate::dims::{ClassIndex, DimBudget, LdimOracle};
use crate::error::{Error, Result};
use crate::graph::{Hypothesis, HypothesisClass, VertexId};
use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A standard (non-strategic) online learner over a finite class.
pub trait StandardLearner: Clone + Send + Sync {
    fn name(&self) -> &'static str;
    fn n(&self) -> usize;
    fn predict(&self, x: VertexId) -> bool;
    /// Filter by a labeled example; an emptied version space is a
    /// realizability error and leaves the learner unchanged.
    fn update(&mut self, x: VertexId, label: bool) -> Result<()>;
    fn version_size(&self) -> usize;

    fn clone_with_example(&self, x: VertexId, label: bool) -> Result<Self> {
        let mut c = self.clone();
        c.update(x, label)?;
        Ok(c)
    }

    fn hypothesis(&self) -> Hypothesis {
        let labels: Vec<bool> = (0..self.n()).map(|x| self.predict(VertexId(x))).collect();
        Hypothesis::from_bits(&labels)
    }
}

fn filtered(idx: &ClassIndex, version: &FixedBitSet, x: VertexId, label: bool) -> Result<FixedBitSet> {
    let next = idx.restrict(version, x.0, label);
    if next.is_clear() {
        return Err(Error::Realizability(format!(
            "no hypothesis in the version space labels vertex {x} as {}",
            u8::from(label)
        )));
    }
    Ok(next)
}

/// Standard optimal algorithm: predict the label whose restriction has the
/// larger Littlestone dimension, ties toward 1.
#[derive(Debug, Clone)]
pub struct Soa {
    oracle: Arc<LdimOracle>,
    version: FixedBitSet,
    labels: FixedBitSet,
}

pub fn soa(cls: &HypothesisClass) -> Result<Soa> {
    Soa::new(cls, &DimBudget::default())
}

impl Soa {
    pub fn new(cls: &HypothesisClass, budget: &DimBudget) -> Result<Self> {
        let oracle = Arc::new(LdimOracle::new(cls.members(), budget)?);
        let version = oracle.index().full();
        let mut s = Self {
            labels: FixedBitSet::with_capacity(cls.n()),
            oracle,
            version,
        };
        s.labels = s.compute_labels(&s.version)?;
        Ok(s)
    }

    fn compute_labels(&self, version: &FixedBitSet) -> Result<FixedBitSet> {
        let idx = self.oracle.index();
        let mut labels = FixedBitSet::with_capacity(idx.n());
        for x in 0..idx.n() {
            let one = self.oracle.ldim(&idx.restrict(version, x, true))?;
            let zero = self.oracle.ldim(&idx.restrict(version, x, false))?;
            labels.set(x, one >= zero);
        }
        Ok(labels)
    }

    /// Class indices still consistent with every update.
    pub fn version_members(&self) -> Vec<usize> {
        self.version.ones().collect()
    }
}

impl StandardLearner for Soa {
    fn name(&self) -> &'static str {
        "soa"
    }

    fn n(&self) -> usize {
        self.oracle.index().n()
    }

    fn predict(&self, x: VertexId) -> bool {
        self.labels.contains(x.0)
    }

    fn update(&mut self, x: VertexId, label: bool) -> Result<()> {
        let version = filtered(self.oracle.index(), &self.version, x, label)?;
        if version != self.version {
            self.labels = self.compute_labels(&version)?;
            self.version = version;
        }
        Ok(())
    }

    fn version_size(&self) -> usize {
        self.version.count_ones(..)
    }
}

/// Majority vote over the version space, ties toward 1.
#[derive(Debug, Clone)]
pub struct Halving {
    idx: Arc<ClassIndex>,
    version: FixedBitSet,
    labels: FixedBitSet,
}

pub fn halving(cls: &HypothesisClass) -> Result<Halving> {
    let budget = DimBudget {
        max_vertices: usize::MAX,
        max_class: usize::MAX,
        ..DimBudget::default()
    };
    let idx = Arc::new(ClassIndex::new(cls.members(), &budget)?);
    let version = idx.full();
    let labels = Halving::compute_labels(&idx, &version);
    Ok(Halving { idx, version, labels })
}

impl Halving {
    fn compute_labels(idx: &ClassIndex, version: &FixedBitSet) -> FixedBitSet {
        let total = version.count_ones(..);
        let mut labels = FixedBitSet::with_capacity(idx.n());
        for x in 0..idx.n() {
            labels.set(x, 2 * version.intersection_count(idx.positive_at(x)) >= total);
        }
        labels
    }

    pub fn version_members(&self) -> Vec<usize> {
        self.version.ones().collect()
    }
}

impl StandardLearner for Halving {
    fn name(&self) -> &'static str {
        "halving"
    }

    fn n(&self) -> usize {
        self.idx.n()
    }

    fn predict(&self, x: VertexId) -> bool {
        self.labels.contains(x.0)
    }

    fn update(&mut self, x: VertexId, label: bool) -> Result<()> {
        let version = filtered(&self.idx, &self.version, x, label)?;
        if version != self.version {
            self.labels = Self::compute_labels(&self.idx, &version);
            self.version = version;
        }
        Ok(())
    }

    fn version_size(&self) -> usize {
        self.version.count_ones(..)
    }
}

/// Which standard learner to run, chosen at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    #[default]
    Soa,
    Halving,
}

impl BaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BaseKind::Soa => "soa",
            BaseKind::Halving => "halving",
        }
    }
}

#[derive(Debug, Clone)]
pub enum AnyStandard {
    Soa(Soa),
    Halving(Halving),
}

impl AnyStandard {
    pub fn build(kind: BaseKind, cls: &HypothesisClass) -> Result<Self> {
        Ok(match kind {
            BaseKind::Soa => AnyStandard::Soa(soa(cls)?),
            BaseKind::Halving => AnyStandard::Halving(halving(cls)?),
        })
    }
}

impl StandardLearner for AnyStandard {
    fn name(&self) -> &'static str {
        match self {
            AnyStandard::Soa(l) => l.name(),
            AnyStandard::Halving(l) => l.name(),
        }
    }

    fn n(&self) -> usize {
        match self {
            AnyStandard::Soa(l) => l.n(),
            AnyStandard::Halving(l) => l.n(),
        }
    }

    fn predict(&self, x: VertexId) -> bool {
        match self {
            AnyStandard::Soa(l) => l.predict(x),
            AnyStandard::Halving(l) => l.predict(x),
        }
    }

    fn update(&mut self, x: VertexId, label: bool) -> Result<()> {
        match self {
            AnyStandard::Soa(l) => l.update(x, label),
            AnyStandard::Halving(l) => l.update(x, label),
        }
    }

    fn version_size(&self) -> usize {
        match self {
            AnyStandard::Soa(l) => l.version_size(),
            AnyStandard::Halving(l) => l.version_size(),
        }
    }
}

/// When a standard learner is fed in the standard protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UpdatePolicy {
    #[default]
    EveryRound,
    OnMistake,
}

/// Run the standard online protocol; returns the mistake count.
pub fn run_standard<L: StandardLearner>(
    learner: &mut L,
    stream: &[(VertexId, bool)],
    policy: UpdatePolicy,
) -> Result<usize> {
    let mut mistakes = 0;
    for &(x, y) in stream {
        let p = learner.predict(x);
        if p != y {
            mistakes += 1;
        }
        if p != y || policy == UpdatePolicy::EveryRound {
            learner.update(x, y)?;
        }
    }
    Ok(mistakes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_hypothesis_never_errs() {
        let cls = HypothesisClass::new(3, vec![Hypothesis::parse("101").unwrap()]).unwrap();
        let stream: Vec<_> = (0..3).map(|x| (VertexId(x), x != 1)).collect();
        assert_eq!(run_standard(&mut soa(&cls).unwrap(), &stream, UpdatePolicy::EveryRound).unwrap(), 0);
        assert_eq!(run_standard(&mut halving(&cls).unwrap(), &stream, UpdatePolicy::EveryRound).unwrap(), 0);
    }

    #[test]
    fn inconsistent_feed_is_rejected_without_change() {
        let cls = HypothesisClass::singletons(3, 0..3).unwrap();
        let mut s = soa(&cls).unwrap();
        s.update(VertexId(0), true).unwrap();
        let before = s.version_members();
        assert!(matches!(s.update(VertexId(1), true), Err(Error::Realizability(_))));
        assert_eq!(s.version_members(), before);
    }

    #[test]
    fn clone_with_example_leaves_original() {
        let cls = HypothesisClass::singletons(3, 0..3).unwrap();
        let s = soa(&cls).unwrap();
        let c = s.clone_with_example(VertexId(2), true).unwrap();
        assert_eq!(s.version_size(), 3);
        assert_eq!(c.version_size(), 1);
    }

    #[test]
    fn soa_ties_go_to_one() {
        // Two hypotheses differing at vertex 0: both restrictions have Ldim 0.
        let cls = HypothesisClass::new(
            2,
            vec![Hypothesis::parse("00").unwrap(), Hypothesis::parse("10").unwrap()],
        )
        .unwrap();
        assert!(soa(&cls).unwrap().predict(VertexId(0)));
        assert!(halving(&cls).unwrap().predict(VertexId(0)));
    }
}
