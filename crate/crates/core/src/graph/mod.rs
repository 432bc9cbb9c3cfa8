//! Manipulation graphs, hypotheses and agents on a finite indexed universe.

mod dist;
mod io;
mod response;

pub use dist::{monte_carlo_strategic_loss, ratio, AgentDistribution, Rational};
pub use io::{
    format_class, format_graph, format_graph_class, parse_class, parse_graph, parse_graph_class,
};
pub use response::{
    best_response, empirical_strategic_loss, induced, induced_label, population_strategic_loss,
    strategic_loss, TieBreakRule, TieBreaker,
};

use crate::error::{invalid, Result};
use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;

/// Index of a vertex in a finite universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Directed graph with a declared out-degree bound. Neighbor lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ManipulationGraph {
    adjacency: Vec<Vec<VertexId>>,
    declared_k: usize,
}

impl ManipulationGraph {
    pub fn new(declared_k: usize, adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        let mut adj = Vec::with_capacity(n);
        for (x, list) in adjacency.into_iter().enumerate() {
            if list.len() > declared_k {
                return Err(invalid(format!(
                    "vertex {x} has out-degree {} above declared k={declared_k}",
                    list.len()
                )));
            }
            let mut sorted = list;
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(invalid(format!("duplicate arc {x}->{}", w[0])));
                }
            }
            for &y in &sorted {
                if y >= n {
                    return Err(invalid(format!("arc {x}->{y} leaves the universe of size {n}")));
                }
                if y == x {
                    return Err(invalid(format!("self-loop at vertex {x}")));
                }
            }
            adj.push(sorted.into_iter().map(VertexId).collect());
        }
        Ok(Self {
            adjacency: adj,
            declared_k,
        })
    }

    pub fn from_arcs(n: usize, declared_k: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(x, y) in arcs {
            if x >= n {
                return Err(invalid(format!("arc source {x} outside universe of size {n}")));
            }
            adj[x].push(y);
        }
        Self::new(declared_k, adj)
    }

    pub fn arcless(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            declared_k: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn declared_k(&self) -> usize {
        self.declared_k
    }

    /// Actual maximum out-degree k(G).
    pub fn max_out_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn neighbors(&self, x: VertexId) -> &[VertexId] {
        &self.adjacency[x.0]
    }

    /// N[x]: x first, then its out-neighbors in sorted order.
    pub fn closed_neighborhood(&self, x: VertexId) -> Vec<VertexId> {
        let mut v = Vec::with_capacity(1 + self.adjacency[x.0].len());
        v.push(x);
        v.extend_from_slice(&self.adjacency[x.0]);
        v
    }

    pub fn has_arc(&self, x: VertexId, y: VertexId) -> bool {
        self.adjacency[x.0].binary_search(&y).is_ok()
    }

    pub fn arc_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(x, l)| l.iter().map(move |&y| (VertexId(x), y)))
    }

    pub fn is_arcless(&self) -> bool {
        self.adjacency.iter().all(Vec::is_empty)
    }

    /// Arc-wise inclusion.
    pub fn is_subgraph_of(&self, other: &ManipulationGraph) -> bool {
        self.n() == other.n() && self.arcs().all(|(x, y)| other.has_arc(x, y))
    }

    /// Copy with one extra arc; the declared bound grows if needed.
    pub fn with_arc(&self, x: usize, y: usize) -> Result<Self> {
        let mut adj: Vec<Vec<usize>> = self
            .adjacency
            .iter()
            .map(|l| l.iter().map(|v| v.0).collect())
            .collect();
        if x >= adj.len() {
            return Err(invalid(format!("vertex {x} outside universe")));
        }
        adj[x].push(y);
        let k = self.declared_k.max(adj[x].len());
        Self::new(k, adj)
    }

    /// Same arcs under a different declared bound.
    pub fn with_declared_k(&self, k: usize) -> Result<Self> {
        let adj = self
            .adjacency
            .iter()
            .map(|l| l.iter().map(|v| v.0).collect())
            .collect();
        Self::new(k, adj)
    }

    pub fn vertex(&self, i: usize) -> Result<VertexId> {
        if i < self.n() {
            Ok(VertexId(i))
        } else {
            Err(invalid(format!("vertex {i} outside universe of size {}", self.n())))
        }
    }
}

/// A labeling of the universe; 1 marks the positive region X_{h,+}.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hypothesis {
    bits: FixedBitSet,
}

impl fmt::Debug for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypothesis({})", self.to_bit_string())
    }
}

impl Hypothesis {
    pub fn all_negative(n: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn all_positive(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Self { bits }
    }

    /// The probe 1{x != x_t}.
    pub fn all_but(n: usize, x: VertexId) -> Self {
        let mut h = Self::all_positive(n);
        h.bits.set(x.0, false);
        h
    }

    pub fn from_positive(n: usize, positives: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut bits = FixedBitSet::with_capacity(n);
        for p in positives {
            if p >= n {
                return Err(invalid(format!("positive vertex {p} outside universe of size {n}")));
            }
            bits.insert(p);
        }
        Ok(Self { bits })
    }

    pub fn from_bits(labels: &[bool]) -> Self {
        let mut bits = FixedBitSet::with_capacity(labels.len());
        for (i, &b) in labels.iter().enumerate() {
            bits.set(i, b);
        }
        Self { bits }
    }

    pub fn from_bitset(bits: FixedBitSet) -> Self {
        Self { bits }
    }

    /// Parse a string of '0'/'1' characters.
    pub fn parse(s: &str) -> Result<Self> {
        let mut labels = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => labels.push(false),
                '1' => labels.push(true),
                other => return Err(invalid(format!("unexpected character {other:?} in bit string"))),
            }
        }
        Ok(Self::from_bits(&labels))
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn label(&self, x: VertexId) -> bool {
        self.bits.contains(x.0)
    }

    pub fn set(&mut self, x: VertexId, value: bool) {
        self.bits.set(x.0, value);
    }

    pub fn positives(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.bits.ones().map(VertexId)
    }

    pub fn positive_count(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.n())
            .map(|i| if self.bits.contains(i) { '1' } else { '0' })
            .collect()
    }

    /// Short hex digest of the labeling, used in transcripts.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.n() as u64).to_le_bytes());
        for b in self.bits.as_slice() {
            hasher.update(b.to_le_bytes());
        }
        let out = hasher.finalize();
        out.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Finite ordered list of distinct hypotheses over one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisClass {
    n: usize,
    members: Vec<Hypothesis>,
}

impl HypothesisClass {
    pub fn new(n: usize, members: Vec<Hypothesis>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(members.len());
        for (i, h) in members.iter().enumerate() {
            if h.n() != n {
                return Err(invalid(format!(
                    "hypothesis {i} has length {} but the universe has size {n}",
                    h.n()
                )));
            }
            if !seen.insert(h) {
                return Err(invalid(format!("duplicate hypothesis at index {i}")));
            }
        }
        Ok(Self { n, members })
    }

    /// Singletons {1{x}} over the given vertices, in order.
    pub fn singletons(n: usize, points: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members = points
            .into_iter()
            .map(|p| Hypothesis::from_positive(n, [p]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, members)
    }

    /// Every labeling of the universe; n must be small.
    pub fn power_set(n: usize) -> Result<Self> {
        if n > 12 {
            return Err(invalid(format!("power set over {n} points is too large")));
        }
        let members = (0..1usize << n)
            .map(|mask| Hypothesis::from_positive(n, (0..n).filter(|i| mask >> i & 1 == 1)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, i: usize) -> &Hypothesis {
        &self.members[i]
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Hypothesis> {
        self.members.iter()
    }

    pub fn index_of(&self, h: &Hypothesis) -> Option<usize> {
        self.members.iter().position(|m| m == h)
    }
}

/// Finite ordered list of graphs sharing one universe and one declared bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphClass {
    members: Vec<ManipulationGraph>,
}

impl GraphClass {
    pub fn new(members: Vec<ManipulationGraph>) -> Result<Self> {
        if let Some(first) = members.first() {
            let (n, k) = (first.n(), first.declared_k());
            for (i, g) in members.iter().enumerate() {
                if g.n() != n || g.declared_k() != k {
                    return Err(invalid(format!(
                        "graph {i} has (n={}, k={}) but the class uses (n={n}, k={k})",
                        g.n(),
                        g.declared_k()
                    )));
                }
            }
        }
        Ok(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, i: usize) -> &ManipulationGraph {
        &self.members[i]
    }

    pub fn members(&self) -> &[ManipulationGraph] {
        &self.members
    }

    pub fn n(&self) -> usize {
        self.members.first().map_or(0, ManipulationGraph::n)
    }

    pub fn declared_k(&self) -> usize {
        self.members.first().map_or(0, ManipulationGraph::declared_k)
    }
}

/// An example (x, y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Agent {
    pub x: VertexId,
    pub y: bool,
}

impl Agent {
    pub fn new(x: usize, y: bool) -> Self {
        Self { x: VertexId(x), y }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_rejects_bad_lists() {
        assert!(ManipulationGraph::new(1, vec![vec![0]]).is_err());
        assert!(ManipulationGraph::new(2, vec![vec![1, 1], vec![]]).is_err());
        assert!(ManipulationGraph::new(1, vec![vec![1, 2], vec![], vec![]]).is_err());
        assert!(ManipulationGraph::new(1, vec![vec![5], vec![]]).is_err());
        let g = ManipulationGraph::new(2, vec![vec![2, 1], vec![], vec![]]).unwrap();
        assert_eq!(g.neighbors(VertexId(0)), &[VertexId(1), VertexId(2)]);
        assert_eq!(g.closed_neighborhood(VertexId(0))[0], VertexId(0));
        assert_eq!(g.max_out_degree(), 2);
        assert!(g.has_arc(VertexId(0), VertexId(2)));
    }

    #[test]
    fn class_rejects_duplicates_and_mixed_sizes() {
        let a = Hypothesis::parse("010").unwrap();
        assert!(HypothesisClass::new(3, vec![a.clone(), a.clone()]).is_err());
        assert!(HypothesisClass::new(3, vec![Hypothesis::parse("01").unwrap()]).is_err());
        assert_eq!(HypothesisClass::power_set(3).unwrap().len(), 8);
    }

    #[test]
    fn graph_class_requires_common_bound() {
        let a = ManipulationGraph::arcless(3);
        let b = ManipulationGraph::from_arcs(3, 1, &[(0, 1)]).unwrap();
        assert!(GraphClass::new(vec![a, b.clone()]).is_err());
        assert!(GraphClass::new(vec![b.clone(), b]).is_ok());
    }

    #[test]
    fn digest_is_stable_and_discriminating() {
        let a = Hypothesis::parse("0110").unwrap();
        let b = Hypothesis::parse("0111").unwrap();
        assert_eq!(a.digest(), a.clone().digest());
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 16);
    }
}
