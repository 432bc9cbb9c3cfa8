use crate::error::{invalid, Error, Result};
use crate::graph::{GraphClass, ManipulationGraph, VertexId};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

/// A finite graph class, possibly too large to list.
pub trait GraphFamily: Send + Sync {
    fn n(&self) -> usize;
    fn declared_k(&self) -> usize;
    fn len(&self) -> u128;
    fn graph(&self, index: u128) -> ManipulationGraph;
    fn index_of(&self, g: &ManipulationGraph) -> Option<u128>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn contains(&self, g: &ManipulationGraph) -> bool {
        self.index_of(g).is_some()
    }

    /// Number of members containing every arc in `required`.
    fn count_consistent(&self, required: &[(VertexId, VertexId)]) -> u128;

    /// Uniformly random member.
    fn sample(&self, rng: &mut dyn RngCore) -> ManipulationGraph;

    /// List every member; fails when the family is larger than `limit`.
    fn materialize(&self, limit: usize) -> Result<GraphClass> {
        let len = self.len();
        if len > limit as u128 {
            return Err(Error::Budget {
                what: "materialized graph class",
                reached: usize::try_from(len).unwrap_or(usize::MAX),
                limit,
            });
        }
        GraphClass::new((0..len).map(|i| self.graph(i)).collect())
    }
}

impl GraphFamily for GraphClass {
    fn n(&self) -> usize {
        GraphClass::n(self)
    }

    fn declared_k(&self) -> usize {
        GraphClass::declared_k(self)
    }

    fn len(&self) -> u128 {
        GraphClass::len(self) as u128
    }

    fn graph(&self, index: u128) -> ManipulationGraph {
        self.get(index as usize).clone()
    }

    fn index_of(&self, g: &ManipulationGraph) -> Option<u128> {
        self.members().iter().position(|m| m == g).map(|i| i as u128)
    }

    fn count_consistent(&self, required: &[(VertexId, VertexId)]) -> u128 {
        self.members()
            .iter()
            .filter(|g| required.iter().all(|&(x, v)| g.has_arc(x, v)))
            .count() as u128
    }

    fn sample(&self, rng: &mut dyn RngCore) -> ManipulationGraph {
        self.get(rng.random_range(0..GraphClass::len(self))).clone()
    }

    fn materialize(&self, _limit: usize) -> Result<GraphClass> {
        Ok(self.clone())
    }
}

/// Every graph that gives each column source at most one arc, into one of
/// that column's targets. Member index is mixed-radix over columns, column 0
/// least significant; digit 0 means no arc, digit i the arc to target i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnChoiceFamily {
    n: usize,
    columns: Vec<(VertexId, Vec<VertexId>)>,
    len: u128,
}

impl ColumnChoiceFamily {
    pub fn new(n: usize, columns: Vec<(VertexId, Vec<VertexId>)>) -> Result<Self> {
        let mut len: u128 = 1;
        let mut sources = std::collections::HashSet::new();
        for (s, targets) in &columns {
            if s.0 >= n || targets.iter().any(|t| t.0 >= n || t == s) {
                return Err(invalid("column vertex outside universe or self target"));
            }
            if !sources.insert(*s) {
                return Err(invalid(format!("vertex {s} is the source of two columns")));
            }
            len = len
                .checked_mul(targets.len() as u128 + 1)
                .ok_or_else(|| invalid("graph family too large to index"))?;
        }
        Ok(Self { n, columns, len })
    }

    pub fn columns(&self) -> &[(VertexId, Vec<VertexId>)] {
        &self.columns
    }

    /// Index of the graph with the given per-column digits.
    pub fn index_from_digits(&self, digits: &[usize]) -> u128 {
        let mut idx = 0u128;
        for (c, &d) in digits.iter().enumerate().rev() {
            idx = idx * (self.columns[c].1.len() as u128 + 1) + d as u128;
        }
        idx
    }

    fn digits(&self, mut index: u128) -> Vec<usize> {
        self.columns
            .iter()
            .map(|(_, t)| {
                let base = t.len() as u128 + 1;
                let d = (index % base) as usize;
                index /= base;
                d
            })
            .collect()
    }

    fn build(&self, digits: &[usize]) -> ManipulationGraph {
        let mut adj = vec![Vec::new(); self.n];
        for ((s, targets), &d) in self.columns.iter().zip(digits) {
            if d > 0 {
                adj[s.0].push(targets[d - 1].0);
            }
        }
        ManipulationGraph::new(1, adj).expect("column family graphs are valid")
    }
}

impl GraphFamily for ColumnChoiceFamily {
    fn n(&self) -> usize {
        self.n
    }

    fn declared_k(&self) -> usize {
        1
    }

    fn len(&self) -> u128 {
        self.len
    }

    fn graph(&self, index: u128) -> ManipulationGraph {
        self.build(&self.digits(index))
    }

    fn index_of(&self, g: &ManipulationGraph) -> Option<u128> {
        if g.n() != self.n || g.declared_k() != 1 {
            return None;
        }
        let mut digits = vec![0usize; self.columns.len()];
        let mut matched = 0;
        for (c, (s, targets)) in self.columns.iter().enumerate() {
            match g.neighbors(*s) {
                [] => {}
                [t] => {
                    digits[c] = targets.iter().position(|x| x == t)? + 1;
                    matched += 1;
                }
                _ => return None,
            }
        }
        (matched == g.arc_count()).then(|| self.index_from_digits(&digits))
    }

    fn count_consistent(&self, required: &[(VertexId, VertexId)]) -> u128 {
        let mut count = 1u128;
        for (s, targets) in &self.columns {
            let wanted: Vec<VertexId> = required
                .iter()
                .filter(|(x, _)| x == s)
                .map(|&(_, v)| v)
                .collect();
            let options = match wanted.split_first() {
                None => targets.len() as u128 + 1,
                Some((first, rest)) => {
                    u128::from(rest.iter().all(|v| v == first) && targets.contains(first))
                }
            };
            count *= options;
        }
        let sources: Vec<VertexId> = self.columns.iter().map(|(s, _)| *s).collect();
        if required.iter().any(|(x, _)| !sources.contains(x)) {
            return 0;
        }
        count
    }

    fn sample(&self, rng: &mut dyn RngCore) -> ManipulationGraph {
        let digits: Vec<usize> = self
            .columns
            .iter()
            .map(|(_, t)| rng.random_range(0..=t.len()))
            .collect();
        self.build(&digits)
    }
}

/// Graph classes carried by fixtures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSet {
    Explicit(GraphClass),
    Columns(ColumnChoiceFamily),
}

impl GraphSet {
    pub fn as_family(&self) -> &dyn GraphFamily {
        match self {
            GraphSet::Explicit(c) => c,
            GraphSet::Columns(c) => c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn two_columns() -> ColumnChoiceFamily {
        ColumnChoiceFamily::new(
            6,
            vec![
                (VertexId(0), vec![VertexId(2), VertexId(4)]),
                (VertexId(1), vec![VertexId(3), VertexId(5)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn indices_round_trip() {
        let f = two_columns();
        assert_eq!(f.len(), 9);
        for i in 0..9 {
            let g = f.graph(i);
            assert!(g.max_out_degree() <= 1);
            assert_eq!(f.index_of(&g), Some(i));
        }
        let outside = ManipulationGraph::from_arcs(6, 1, &[(0, 3)]).unwrap();
        assert_eq!(f.index_of(&outside), None);
    }

    #[test]
    fn consistent_counts_match_enumeration() {
        let f = two_columns();
        let cases: Vec<Vec<(VertexId, VertexId)>> = vec![
            vec![],
            vec![(VertexId(0), VertexId(2))],
            vec![(VertexId(0), VertexId(2)), (VertexId(1), VertexId(5))],
            vec![(VertexId(0), VertexId(2)), (VertexId(0), VertexId(4))],
            vec![(VertexId(2), VertexId(0))],
        ];
        let explicit = f.materialize(100).unwrap();
        for req in cases {
            assert_eq!(f.count_consistent(&req), explicit.count_consistent(&req));
        }
    }

    #[test]
    fn samples_are_members() {
        let f = two_columns();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert!(f.contains(&f.sample(&mut rng)));
        }
    }

    #[test]
    fn materialize_respects_limit() {
        assert!(matches!(two_columns().materialize(5), Err(Error::Budget { .. })));
    }
}
