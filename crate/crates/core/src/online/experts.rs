use super::StandardLearner;
use crate::graph::VertexId;

/// A copy of the base learner with its weight and the examples it was fed.
#[derive(Debug, Clone)]
pub struct Expert<L> {
    pub learner: L,
    pub weight: f64,
    pub history: Vec<(VertexId, bool)>,
}

/// Weighted expert set shared by the two reductions.
#[derive(Debug, Clone)]
pub struct ExpertPool<L> {
    experts: Vec<Expert<L>>,
    prune_below: Option<f64>,
    pruned: usize,
    pruned_mass: f64,
    dropped_inconsistent: usize,
}

/// `a ≥ b` up to relative rounding in the weight sums.
pub(crate) fn at_least(a: f64, b: f64) -> bool {
    a >= b - 1e-12 * b.abs()
}

impl<L: StandardLearner> ExpertPool<L> {
    pub fn new(base: L) -> Self {
        Self {
            experts: vec![Expert {
                learner: base,
                weight: 1.0,
                history: Vec::new(),
            }],
            prune_below: None,
            pruned: 0,
            pruned_mass: 0.0,
            dropped_inconsistent: 0,
        }
    }

    /// Drop experts whose weight falls below `floor` after an update.
    pub fn set_prune_floor(&mut self, floor: Option<f64>) {
        self.prune_below = floor;
    }

    pub fn experts(&self) -> &[Expert<L>] {
        &self.experts
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.experts.iter().map(|e| e.weight).sum()
    }

    pub fn pruned(&self) -> (usize, f64) {
        (self.pruned, self.pruned_mass)
    }

    /// Children whose feed emptied their version space; they were discarded.
    pub fn dropped_inconsistent(&self) -> usize {
        self.dropped_inconsistent
    }

    /// Feed (z, 0) and halve each expert for which `select` names a vertex z.
    pub fn halve_and_feed<F>(&mut self, select: F)
    where
        F: Fn(&L) -> Option<VertexId>,
    {
        let mut kept = Vec::with_capacity(self.experts.len());
        for mut e in std::mem::take(&mut self.experts) {
            match select(&e.learner) {
                None => kept.push(e),
                Some(z) => {
                    if e.learner.update(z, false).is_ok() {
                        e.weight /= 2.0;
                        e.history.push((z, false));
                        kept.push(e);
                    } else {
                        self.dropped_inconsistent += 1;
                    }
                }
            }
        }
        self.experts = kept;
        self.prune();
    }

    /// Replace each selected expert by |targets| children, child z fed (z, 1)
    /// with weight w / (2 |targets|).
    pub fn split<F>(&mut self, select: F, targets: &[VertexId])
    where
        F: Fn(&L) -> bool,
    {
        let share = 1.0 / (2.0 * targets.len() as f64);
        let mut next = Vec::with_capacity(self.experts.len());
        for e in std::mem::take(&mut self.experts) {
            if !select(&e.learner) {
                next.push(e);
                continue;
            }
            for &z in targets {
                match e.learner.clone_with_example(z, true) {
                    Ok(child) => {
                        let mut history = e.history.clone();
                        history.push((z, true));
                        next.push(Expert {
                            learner: child,
                            weight: e.weight * share,
                            history,
                        });
                    }
                    Err(_) => self.dropped_inconsistent += 1,
                }
            }
        }
        self.experts = next;
        self.prune();
    }

    fn prune(&mut self) {
        let Some(floor) = self.prune_below else {
            return;
        };
        let before = self.experts.len();
        let mut mass = 0.0;
        self.experts.retain(|e| {
            let keep = e.weight >= floor;
            if !keep {
                mass += e.weight;
            }
            keep
        });
        self.pruned += before - self.experts.len();
        self.pruned_mass += mass;
    }
}
