//! Brute-force VC and Littlestone dimension oracles and the induced class.

use crate::error::{invalid, Error, Result};
use crate::graph::{induced, Hypothesis, HypothesisClass, ManipulationGraph, VertexId};
use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

/// Enumeration limits for the oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimBudget {
    pub max_vertices: usize,
    pub max_class: usize,
    pub max_nodes: usize,
}

impl Default for DimBudget {
    fn default() -> Self {
        Self {
            max_vertices: 64,
            max_class: 4096,
            max_nodes: 4_000_000,
        }
    }
}

pub(crate) fn floor_log2(m: usize) -> u32 {
    debug_assert!(m > 0);
    usize::BITS - 1 - m.leading_zeros()
}

/// Deduplicated induced labelings h̄_G, each remembering its first source in H.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedClass {
    members: Vec<Hypothesis>,
    sources: Vec<usize>,
}

impl InducedClass {
    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The labeling x ↦ h̄_G(x).
pub fn induced_labeling(graph: &ManipulationGraph, h: &Hypothesis) -> Hypothesis {
    let labels: Vec<bool> = (0..graph.n()).map(|x| induced(graph, h, VertexId(x))).collect();
    Hypothesis::from_bits(&labels)
}

pub fn induce_class(graph: &ManipulationGraph, cls: &HypothesisClass) -> Result<InducedClass> {
    if graph.n() != cls.n() {
        return Err(invalid(format!(
            "graph universe {} differs from class universe {}",
            graph.n(),
            cls.n()
        )));
    }
    let mut seen = HashSet::new();
    let mut members = Vec::new();
    let mut sources = Vec::new();
    for (i, h) in cls.iter().enumerate() {
        let bar = induced_labeling(graph, h);
        if seen.insert(bar.clone()) {
            members.push(bar);
            sources.push(i);
        }
    }
    Ok(InducedClass { members, sources })
}

/// Per-vertex member sets of a deduplicated class.
#[derive(Debug, Clone)]
pub struct ClassIndex {
    n: usize,
    m: usize,
    pos: Vec<FixedBitSet>,
}

impl ClassIndex {
    pub fn new(rows: &[Hypothesis], budget: &DimBudget) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Domain("dimension of an empty class".into()));
        };
        let n = first.n();
        if rows.iter().any(|h| h.n() != n) {
            return Err(invalid("labelings of different lengths"));
        }
        if n > budget.max_vertices {
            return Err(Error::Budget {
                what: "universe size",
                reached: n,
                limit: budget.max_vertices,
            });
        }
        let mut unique: Vec<&Hypothesis> = Vec::with_capacity(rows.len());
        let mut seen = HashSet::new();
        for h in rows {
            if seen.insert(h) {
                unique.push(h);
            }
        }
        let m = unique.len();
        if m > budget.max_class {
            return Err(Error::Budget {
                what: "class size",
                reached: m,
                limit: budget.max_class,
            });
        }
        let mut pos = vec![FixedBitSet::with_capacity(m); n];
        for (i, h) in unique.iter().enumerate() {
            for x in h.positives() {
                pos[x.0].insert(i);
            }
        }
        Ok(Self { n, m, pos })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn full(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.m);
        s.insert_range(..);
        s
    }

    /// Members with h(x) = 1.
    pub fn positive_at(&self, x: usize) -> &FixedBitSet {
        &self.pos[x]
    }

    /// Members of `mask` with h(x) = label.
    pub fn restrict(&self, mask: &FixedBitSet, x: usize, label: bool) -> FixedBitSet {
        let mut out = mask.clone();
        if label {
            out.intersect_with(&self.pos[x]);
        } else {
            out.difference_with(&self.pos[x]);
        }
        out
    }
}

pub fn vc_dimension(rows: &[Hypothesis]) -> Result<usize> {
    vc_dimension_with(rows, &DimBudget::default())
}

/// Depth-first search over shattered sets, extending only with larger indices.
/// Class members are kept partitioned by their pattern on the current set, so
/// a set is shattered iff every cell splits. By Pajor's lemma the search visits
/// at most |H| shattered sets.
pub fn vc_dimension_with(rows: &[Hypothesis], budget: &DimBudget) -> Result<usize> {
    let idx = ClassIndex::new(rows, budget)?;
    let cap = floor_log2(idx.len()) as usize;
    let mut state = VcSearch {
        idx: &idx,
        best: 0,
        cap,
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    state.dfs(&[idx.full()], 0, 0)?;
    Ok(state.best)
}

struct VcSearch<'a> {
    idx: &'a ClassIndex,
    best: usize,
    cap: usize,
    nodes: usize,
    max_nodes: usize,
}

impl VcSearch<'_> {
    fn dfs(&mut self, cells: &[FixedBitSet], start: usize, size: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::Budget {
                what: "vc search nodes",
                reached: self.best,
                limit: self.max_nodes,
            });
        }
        for x in start..self.idx.n() {
            if self.best >= self.cap {
                return Ok(());
            }
            // Not enough cells can remain to beat the current best.
            if size + 1 + (self.idx.n() - x - 1) <= self.best {
                return Ok(());
            }
            let mut next = Vec::with_capacity(cells.len() * 2);
            let mut shattered = true;
            for c in cells {
                let a = self.idx.restrict(c, x, true);
                let b = self.idx.restrict(c, x, false);
                if a.is_clear() || b.is_clear() {
                    shattered = false;
                    break;
                }
                next.push(a);
                next.push(b);
            }
            if shattered {
                self.best = self.best.max(size + 1);
                self.dfs(&next, x + 1, size + 1)?;
            }
        }
        Ok(())
    }
}

pub fn littlestone_dimension(rows: &[Hypothesis]) -> Result<usize> {
    littlestone_dimension_with(rows, &DimBudget::default())
}

pub fn littlestone_dimension_with(rows: &[Hypothesis], budget: &DimBudget) -> Result<usize> {
    let oracle = LdimOracle::new(rows, budget)?;
    Ok(oracle.ldim(&oracle.index().full())?.unwrap_or(0) as usize)
}

/// Memoized Littlestone recursion over member subsets; shared by SOA clones.
#[derive(Debug)]
pub struct LdimOracle {
    idx: ClassIndex,
    memo: Mutex<HashMap<FixedBitSet, u32>>,
    max_nodes: usize,
}

impl LdimOracle {
    pub fn new(rows: &[Hypothesis], budget: &DimBudget) -> Result<Self> {
        Ok(Self {
            idx: ClassIndex::new(rows, budget)?,
            memo: Mutex::new(HashMap::new()),
            max_nodes: budget.max_nodes,
        })
    }

    pub fn index(&self) -> &ClassIndex {
        &self.idx
    }

    /// Ldim of a member subset; `None` for the empty set.
    pub fn ldim(&self, mask: &FixedBitSet) -> Result<Option<u32>> {
        let card = mask.count_ones(..);
        if card == 0 {
            return Ok(None);
        }
        self.rec(mask, card).map(Some)
    }

    fn rec(&self, mask: &FixedBitSet, card: usize) -> Result<u32> {
        if card <= 1 {
            return Ok(0);
        }
        if let Some(&v) = self.memo.lock().expect("memo lock").get(mask) {
            return Ok(v);
        }
        let cap = floor_log2(card);
        let mut splits: Vec<(usize, usize, FixedBitSet)> = Vec::new();
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        for x in 0..self.idx.n() {
            let a = self.idx.restrict(mask, x, true);
            let ca = a.count_ones(..);
            if ca == 0 || ca == card {
                continue;
            }
            let b = self.idx.restrict(mask, x, false);
            // A split and its mirror image carry the same value.
            let key = if a <= b { a.clone() } else { b.clone() };
            if !seen.insert(key) {
                continue;
            }
            splits.push((ca.min(card - ca), ca, a));
        }
        splits.sort_by(|p, q| q.0.cmp(&p.0));
        let mut best = 0u32;
        for (small, ca, a) in splits {
            if 1 + floor_log2(small) <= best {
                break;
            }
            let mut b = mask.clone();
            b.difference_with(&a);
            let cb = card - ca;
            let (first, cf, second, cs) = if ca <= cb { (&a, ca, &b, cb) } else { (&b, cb, &a, ca) };
            let lf = self.rec(first, cf)?;
            if 1 + lf <= best {
                continue;
            }
            let ls = self.rec(second, cs)?;
            best = best.max(1 + lf.min(ls));
            if best >= cap {
                break;
            }
        }
        let mut memo = self.memo.lock().expect("memo lock");
        if memo.len() >= self.max_nodes {
            return Err(Error::Budget {
                what: "littlestone memo entries",
                reached: memo.len(),
                limit: self.max_nodes,
            });
        }
        memo.insert(mask.clone(), best);
        Ok(best)
    }
}

/// Result of checking d̄ ≤ max(1, ceil(d·log2(max(2, k·d)))).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcdReport {
    pub d: usize,
    pub k: usize,
    pub dbar: usize,
    pub bound: usize,
    pub holds: bool,
    /// d̄ within one of the bound.
    pub near_bound: bool,
}

pub fn vcd_upper_bound(d: usize, k: usize) -> usize {
    let m = (k * d).max(2) as f64;
    let v = d as f64 * m.log2();
    (v - 1e-9).ceil().max(1.0) as usize
}

pub fn verify_vcd_upper(graph: &ManipulationGraph, cls: &HypothesisClass) -> Result<VcdReport> {
    let d = vc_dimension(cls.members())?;
    let induced = induce_class(graph, cls)?;
    let dbar = vc_dimension(induced.members())?;
    let k = graph.max_out_degree();
    let bound = vcd_upper_bound(d, k);
    Ok(VcdReport {
        d,
        k,
        dbar,
        bound,
        holds: dbar <= bound,
        near_bound: dbar + 1 >= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singletons(n: usize) -> HypothesisClass {
        HypothesisClass::singletons(n, 0..n).unwrap()
    }

    #[test]
    fn power_sets() {
        let p3 = HypothesisClass::power_set(3).unwrap();
        assert_eq!(vc_dimension(p3.members()).unwrap(), 3);
        let p4 = HypothesisClass::power_set(4).unwrap();
        assert_eq!(littlestone_dimension(p4.members()).unwrap(), 4);
    }

    #[test]
    fn singletons_have_dimension_one() {
        for n in 2..6 {
            assert_eq!(vc_dimension(singletons(n).members()).unwrap(), 1);
            assert_eq!(littlestone_dimension(singletons(n).members()).unwrap(), 1);
        }
    }

    #[test]
    fn one_member_is_zero() {
        let h = vec![Hypothesis::parse("0101").unwrap()];
        assert_eq!(vc_dimension(&h).unwrap(), 0);
        assert_eq!(littlestone_dimension(&h).unwrap(), 0);
    }

    #[test]
    fn thresholds_separate_vc_and_ldim() {
        // Thresholds on a line: VC 1, Littlestone floor(log2(n+1)).
        let n = 7;
        let rows: Vec<_> = (0..=n)
            .map(|t| Hypothesis::from_positive(n, t..n).unwrap())
            .collect();
        assert_eq!(vc_dimension(&rows).unwrap(), 1);
        assert_eq!(littlestone_dimension(&rows).unwrap(), 3);
    }

    #[test]
    fn empty_class_is_domain_error() {
        assert!(matches!(vc_dimension(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn budgets_are_enforced() {
        let rows = vec![Hypothesis::all_negative(70)];
        assert!(matches!(vc_dimension(&rows), Err(Error::Budget { .. })));
    }

    #[test]
    fn induced_class_on_arcless_graph_is_identity() {
        let cls = HypothesisClass::power_set(3).unwrap();
        let ind = induce_class(&ManipulationGraph::arcless(3), &cls).unwrap();
        assert_eq!(ind.members(), cls.members());
    }

    #[test]
    fn bound_formula() {
        assert_eq!(vcd_upper_bound(1, 8), 3);
        assert_eq!(vcd_upper_bound(1, 0), 1);
        assert_eq!(vcd_upper_bound(2, 8), 8);
        assert_eq!(vcd_upper_bound(0, 3), 1);
    }
}
