#![allow(dead_code)]

use proptest::prelude::*;
use stratlearn::graph::{Agent, AgentDistribution, Hypothesis, HypothesisClass, ManipulationGraph};

/// Graph on n vertices with out-degree at most k.
pub fn graph_strategy(max_n: usize, max_k: usize) -> impl Strategy<Value = ManipulationGraph> {
    (2..=max_n, 0..=max_k).prop_flat_map(|(n, k)| {
        let k = k.min(n - 1);
        proptest::collection::vec(proptest::collection::btree_set(0..n, 0..=k), n).prop_map(move |rows| {
            let adj: Vec<Vec<usize>> = rows
                .into_iter()
                .enumerate()
                .map(|(x, s)| s.into_iter().filter(|&y| y != x).collect())
                .collect();
            ManipulationGraph::new(k, adj).expect("strategy builds valid graphs")
        })
    })
}

pub fn hypothesis_strategy(n: usize) -> impl Strategy<Value = Hypothesis> {
    proptest::collection::vec(any::<bool>(), n).prop_map(|b| Hypothesis::from_bits(&b))
}

pub fn graph_and_hypothesis(max_n: usize, max_k: usize) -> impl Strategy<Value = (ManipulationGraph, Hypothesis)> {
    graph_strategy(max_n, max_k).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), hypothesis_strategy(n))
    })
}

/// A class of up to `max_size` distinct labelings.
pub fn class_strategy(n: usize, max_size: usize) -> impl Strategy<Value = HypothesisClass> {
    proptest::collection::btree_set(proptest::collection::vec(any::<bool>(), n), 1..=max_size).prop_map(
        move |set| {
            HypothesisClass::new(n, set.into_iter().map(|b| Hypothesis::from_bits(&b)).collect())
                .expect("distinct members")
        },
    )
}

pub fn graph_and_class(max_n: usize, max_k: usize, max_size: usize) -> impl Strategy<Value = (ManipulationGraph, HypothesisClass)> {
    graph_strategy(max_n, max_k).prop_flat_map(move |g| {
        let n = g.n();
        (Just(g), class_strategy(n, max_size))
    })
}

/// Distribution with integer weights 1..=5 on (x, y) pairs.
pub fn dist_strategy(n: usize) -> impl Strategy<Value = AgentDistribution> {
    proptest::collection::vec((0..n, any::<bool>(), 1u64..=5), 1..=6).prop_map(|entries| {
        let counts: Vec<(Agent, u64)> = entries.into_iter().map(|(x, y, w)| (Agent::new(x, y), w)).collect();
        AgentDistribution::from_counts(&counts).expect("positive weights")
    })
}
