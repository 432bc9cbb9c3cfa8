//! Deterministic fixture generators for the equality and lower-bound constructions.

mod family;

pub use family::{ColumnChoiceFamily, GraphFamily, GraphSet};

use crate::error::{invalid, Error, Result};
use crate::graph::{
    induced, ratio, Agent, AgentDistribution, GraphClass, Hypothesis, HypothesisClass,
    ManipulationGraph, Rational, VertexId,
};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest universe a generator will build.
pub const MAX_UNIVERSE: usize = 4096;
/// Largest hypothesis class a generator will build.
pub const MAX_CLASS: usize = 1 << 16;

/// Which construction produced a fixture, with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum FixtureKind {
    Binrep { d: usize, k: usize },
    Star { d: usize, k: usize },
    UgPacLb { n: usize, i_star: usize },
    UgOnlineLb { n: usize },
    Chain { n: usize },
    Random { n: usize, k: usize, hypotheses: usize, seed: u64 },
    RandomUg { n: usize, k: usize, graphs: usize, hypotheses: usize, seed: u64 },
    Loaded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub kind: FixtureKind,
    /// The true graph G⋆; for adaptive constructions a placeholder with no arcs.
    pub graph: ManipulationGraph,
    pub graphs: Option<GraphSet>,
    pub class: HypothesisClass,
    pub vertex_labels: Vec<String>,
    /// Designated h⋆ for realizable play.
    pub target: Option<usize>,
    /// Index of G⋆ within `graphs`.
    pub graph_target: Option<u128>,
}

impl FixtureKind {
    /// Regenerate the named construction; `Loaded` has nothing to rebuild.
    pub fn build(&self) -> Result<Fixture> {
        match *self {
            FixtureKind::Binrep { d, k } => binary_rep_construction(d, k),
            FixtureKind::Star { d, k } => star_singletons(d, k),
            FixtureKind::UgPacLb { n, i_star } => ug_pac_lb_construction(n, i_star),
            FixtureKind::UgOnlineLb { n } => ug_online_lb_construction(n),
            FixtureKind::Chain { n } => chain_construction(n),
            FixtureKind::Random { n, k, hypotheses, seed } => random_fixture(n, k, hypotheses, seed),
            FixtureKind::RandomUg { n, k, graphs, hypotheses, seed } => {
                random_ug_fixture(n, k, graphs, hypotheses, seed)
            }
            FixtureKind::Loaded => Err(invalid("loaded fixtures are built from files")),
        }
    }
}

impl Fixture {
    pub fn name(&self) -> String {
        match &self.kind {
            FixtureKind::Binrep { d, k } => format!("binrep(d={d},k={k})"),
            FixtureKind::Star { d, k } => format!("star(d={d},k={k})"),
            FixtureKind::UgPacLb { n, i_star } => format!("ug-pac-lb(n={n},i*={i_star})"),
            FixtureKind::UgOnlineLb { n } => format!("ug-online-lb(n={n})"),
            FixtureKind::Chain { n } => format!("chain(n={n})"),
            FixtureKind::Random { n, k, hypotheses, seed } => {
                format!("random(n={n},k={k},h={hypotheses},seed={seed})")
            }
            FixtureKind::RandomUg { n, k, graphs, hypotheses, seed } => {
                format!("random-ug(n={n},k={k},g={graphs},h={hypotheses},seed={seed})")
            }
            FixtureKind::Loaded => "loaded".to_string(),
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Fixture assembled from loaded files.
    pub fn loaded(graph: ManipulationGraph, class: HypothesisClass, target: Option<usize>) -> Result<Self> {
        let f = Self {
            kind: FixtureKind::Loaded,
            vertex_labels: (0..graph.n()).map(|i| format!("v{i}")).collect(),
            graph,
            graphs: None,
            class,
            target,
            graph_target: None,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.graph.n() != self.class.n() || self.vertex_labels.len() != self.graph.n() {
            return Err(invalid("fixture graph, class and labels disagree on universe size"));
        }
        if self.target.is_some_and(|t| t >= self.class.len()) {
            return Err(invalid("target hypothesis index out of range"));
        }
        if let Some(gs) = &self.graphs {
            let fam = gs.as_family();
            if fam.n() != self.graph.n() {
                return Err(invalid("graph class universe differs from the fixture's"));
            }
            if self.graph_target.is_some_and(|t| t >= fam.len()) {
                return Err(invalid("target graph index out of range"));
            }
        }
        Ok(())
    }

    pub fn target_hypothesis(&self) -> Option<&Hypothesis> {
        self.target.map(|t| self.class.get(t))
    }

    /// Realizable distribution with random integer weights in 1..=8 on every
    /// vertex, labeled by the target's induced labeling under G⋆.
    pub fn realizable_distribution(&self, seed: u64) -> Result<AgentDistribution> {
        let h = self
            .target_hypothesis()
            .ok_or_else(|| invalid("fixture has no target hypothesis"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<(Agent, u64)> = (0..self.n())
            .map(|x| {
                let y = induced(&self.graph, h, VertexId(x));
                (Agent::new(x, y), rng.random_range(1..=8u64))
            })
            .collect();
        AgentDistribution::from_counts(&entries)
    }

    /// Same support as [`Self::realizable_distribution`], with each label
    /// flipped with probability `noise`.
    pub fn noisy_distribution(&self, seed: u64, noise: &Rational) -> Result<AgentDistribution> {
        let base = self.realizable_distribution(seed)?;
        let keep = Rational::one() - noise;
        let mut support = Vec::new();
        for (a, p) in base.support() {
            support.push((*a, p * &keep));
            support.push((Agent { x: a.x, y: !a.y }, p * noise));
        }
        AgentDistribution::new(support)
    }
}

fn check_budget(vertices: usize, members: usize) -> Result<()> {
    if vertices > MAX_UNIVERSE {
        return Err(Error::Budget {
            what: "fixture universe",
            reached: vertices,
            limit: MAX_UNIVERSE,
        });
    }
    if members > MAX_CLASS {
        return Err(Error::Budget {
            what: "fixture class",
            reached: members,
            limit: MAX_CLASS,
        });
    }
    Ok(())
}

/// All tuples in `1..=k` of length `d`, lexicographic.
fn tuples(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=k).map(move |j| {
                    let mut t = t.clone();
                    t.push(j);
                    t
                })
            })
            .collect();
    }
    out
}

/// Flat index of x_{r,j} in a grid with `k+1` columns.
pub fn grid_index(row: usize, j: usize, k: usize) -> usize {
    row * (k + 1) + j
}

/// d copies of log2(k) rows; row r (global, copy c = r / log2 k) has hub
/// x_{r,0} with arcs to x_{r,1..k}. Hypothesis (j_1..j_d) labels x_{r,j_c}
/// with bit i of (j_c mod k), where i = r mod log2 k, so j = k is all-zero.
pub fn binary_rep_construction(d: usize, k: usize) -> Result<Fixture> {
    if d == 0 {
        return Err(invalid("d must be positive"));
    }
    if k < 2 || !k.is_power_of_two() {
        return Err(invalid(format!("k={k} must be a power of two at least 2")));
    }
    let bits = k.trailing_zeros() as usize;
    let rows = d * bits;
    let n = rows * (k + 1);
    let size = k.checked_pow(d as u32).unwrap_or(usize::MAX);
    check_budget(n, size)?;
    let mut adj = vec![Vec::new(); n];
    let mut labels = Vec::with_capacity(n);
    for r in 0..rows {
        adj[grid_index(r, 0, k)] = (1..=k).map(|j| grid_index(r, j, k)).collect();
        for j in 0..=k {
            labels.push(format!("x_{{{r},{j}}}"));
        }
    }
    let graph = ManipulationGraph::new(k, adj)?;
    let members = tuples(d, k)
        .into_iter()
        .map(|t| {
            let mut pos = Vec::new();
            for (c, &j) in t.iter().enumerate() {
                for i in 0..bits {
                    if (j % k) >> i & 1 == 1 {
                        pos.push(grid_index(c * bits + i, j, k));
                    }
                }
            }
            Hypothesis::from_positive(n, pos)
        })
        .collect::<Result<Vec<_>>>()?;
    let class = HypothesisClass::new(n, members)?;
    Ok(Fixture {
        kind: FixtureKind::Binrep { d, k },
        graph,
        graphs: None,
        class,
        vertex_labels: labels,
        target: Some(0),
        graph_target: None,
    })
}

/// Hubs x_{r,0} of a binary-representation fixture.
pub fn binrep_hubs(d: usize, k: usize) -> Vec<VertexId> {
    let bits = k.trailing_zeros() as usize;
    (0..d * bits).map(|r| VertexId(grid_index(r, 0, k))).collect()
}

/// d stars with hub x_{i,0} and leaves x_{i,1..k}; each hypothesis picks one
/// positive leaf per star.
pub fn star_singletons(d: usize, k: usize) -> Result<Fixture> {
    if d == 0 || k == 0 {
        return Err(invalid("d and k must be positive"));
    }
    let n = d * (k + 1);
    let size = k.checked_pow(d as u32).unwrap_or(usize::MAX);
    check_budget(n, size)?;
    let mut adj = vec![Vec::new(); n];
    let mut labels = Vec::with_capacity(n);
    for i in 0..d {
        adj[grid_index(i, 0, k)] = (1..=k).map(|j| grid_index(i, j, k)).collect();
        for j in 0..=k {
            labels.push(format!("x_{{{i},{j}}}"));
        }
    }
    let graph = ManipulationGraph::new(k, adj)?;
    let members = tuples(d, k)
        .into_iter()
        .map(|t| {
            Hypothesis::from_positive(n, t.iter().enumerate().map(|(i, &j)| grid_index(i, j, k)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Fixture {
        kind: FixtureKind::Star { d, k },
        graph,
        graphs: None,
        class: HypothesisClass::new(n, members)?,
        vertex_labels: labels,
        target: Some(0),
        graph_target: None,
    })
}

/// Vertex layout of the unknown-graph PAC construction: o = 0 and
/// x_{i,j} = 1 + i·n + (j−1) for i in 0..=n, j in 1..=n.
pub fn ug_pac_index(n: usize, i: usize, j: usize) -> usize {
    1 + i * n + (j - 1)
}

/// One node o plus blocks X_0..X_n of n nodes each; H = {1{X_i}} for i ≥ 1;
/// the graph class lets each x_{0,j} point to at most one x_{i,j}.
/// G⋆ connects x_{0,j} to x_{i⋆,j} for every j.
pub fn ug_pac_lb_construction(n: usize, i_star: usize) -> Result<Fixture> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    if i_star == 0 || i_star > n {
        return Err(invalid(format!("i_star={i_star} must lie in 1..={n}")));
    }
    let size = 1 + n * (n + 1);
    check_budget(size, n)?;
    let mut labels = vec!["o".to_string()];
    for i in 0..=n {
        for j in 1..=n {
            labels.push(format!("x_{{{i},{j}}}"));
        }
    }
    let columns: Vec<(VertexId, Vec<VertexId>)> = (1..=n)
        .map(|j| {
            (
                VertexId(ug_pac_index(n, 0, j)),
                (1..=n).map(|i| VertexId(ug_pac_index(n, i, j))).collect(),
            )
        })
        .collect();
    let family = ColumnChoiceFamily::new(size, columns)?;
    let digits = vec![i_star; n];
    let target_idx = family.index_from_digits(&digits);
    let graph = family.graph(target_idx);
    let members = (1..=n)
        .map(|i| Hypothesis::from_positive(size, (1..=n).map(|j| ug_pac_index(n, i, j))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fixture {
        kind: FixtureKind::UgPacLb { n, i_star },
        graph,
        graphs: Some(GraphSet::Columns(family)),
        class: HypothesisClass::new(size, members)?,
        vertex_labels: labels,
        target: Some(i_star - 1),
        graph_target: Some(target_idx),
    })
}

/// Mass 1−2ε on o (label 0) and 2ε spread uniformly on X_0 (label 1).
pub fn ug_pac_lb_distribution(n: usize, eps: &Rational) -> Result<AgentDistribution> {
    let two_eps = eps * ratio(2, 1);
    if two_eps > Rational::one() || *eps < ratio(0, 1) {
        return Err(invalid("epsilon must lie in [0, 1/2]"));
    }
    let mut support = vec![(Agent::new(0, false), Rational::one() - &two_eps)];
    for j in 1..=n {
        support.push((Agent::new(ug_pac_index(n, 0, j), true), &two_eps / ratio(n as i64, 1)));
    }
    AgentDistribution::new(support)
}

/// Vertex layout of the unknown-graph online construction:
/// x_{i,j} = i·n + (j−1) for i in 0..=n, j in 1..=n.
pub fn ug_online_index(n: usize, i: usize, j: usize) -> usize {
    i * n + (j - 1)
}

/// Blocks X_0..X_n of n nodes; column j is fresh at round j. H = {1{X_i}},
/// i ≥ 1. The true graph is chosen adaptively, so `graph` has no arcs.
pub fn ug_online_lb_construction(n: usize) -> Result<Fixture> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    let size = n * (n + 1);
    check_budget(size, n)?;
    let mut labels = Vec::with_capacity(size);
    for i in 0..=n {
        for j in 1..=n {
            labels.push(format!("x_{{{i},{j}}}"));
        }
    }
    let columns = (1..=n)
        .map(|j| {
            (
                VertexId(ug_online_index(n, 0, j)),
                (1..=n).map(|i| VertexId(ug_online_index(n, i, j))).collect(),
            )
        })
        .collect();
    let family = ColumnChoiceFamily::new(size, columns)?;
    let members = (1..=n)
        .map(|i| Hypothesis::from_positive(size, (1..=n).map(|j| ug_online_index(n, i, j))))
        .collect::<Result<Vec<_>>>()?;
    let graphs = if n <= 4 {
        GraphSet::Explicit(family.materialize(usize::MAX)?)
    } else {
        GraphSet::Columns(family)
    };
    Ok(Fixture {
        kind: FixtureKind::UgOnlineLb { n },
        graph: ManipulationGraph::arcless(size).with_declared_k(1)?,
        graphs: Some(graphs),
        class: HypothesisClass::new(size, members)?,
        vertex_labels: labels,
        target: None,
        graph_target: None,
    })
}

/// Chain vertices: A = 0, B = 1, C_i = 1 + i.
pub const CHAIN_A: VertexId = VertexId(0);
pub const CHAIN_B: VertexId = VertexId(1);

/// Graphs A→B→C_i for i in 1..=n; class = singletons over the C_i.
/// Graph i−1 pairs with hypothesis i−1; the default target is i = 1.
pub fn chain_construction(n: usize) -> Result<Fixture> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    let size = n + 2;
    check_budget(size, n)?;
    let graphs = (1..=n)
        .map(|i| ManipulationGraph::from_arcs(size, 1, &[(0, 1), (1, 1 + i)]))
        .collect::<Result<Vec<_>>>()?;
    let class = HypothesisClass::singletons(size, (1..=n).map(|i| 1 + i))?;
    let mut labels = vec!["A".to_string(), "B".to_string()];
    labels.extend((1..=n).map(|i| format!("C_{i}")));
    Ok(Fixture {
        kind: FixtureKind::Chain { n },
        graph: graphs[0].clone(),
        graphs: Some(GraphSet::Explicit(GraphClass::new(graphs)?)),
        class,
        vertex_labels: labels,
        target: Some(0),
        graph_target: Some(0),
    })
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<ManipulationGraph> {
    let mut adj = vec![Vec::new(); n];
    for (x, list) in adj.iter_mut().enumerate() {
        let deg = rng.random_range(0..=k.min(n - 1));
        while list.len() < deg {
            let y = rng.random_range(0..n);
            if y != x && !list.contains(&y) {
                list.push(y);
            }
        }
    }
    ManipulationGraph::new(k, adj)
}

fn random_class(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Result<HypothesisClass> {
    let cap = if n >= 20 { usize::MAX } else { 1usize << n };
    if size == 0 || size > cap {
        return Err(invalid(format!("cannot draw {size} distinct hypotheses on {n} points")));
    }
    let mut members: Vec<Hypothesis> = Vec::with_capacity(size);
    while members.len() < size {
        let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.35)).collect();
        let h = Hypothesis::from_bits(&bits);
        if !members.contains(&h) {
            members.push(h);
        }
    }
    HypothesisClass::new(n, members)
}

/// Random graph with out-degrees uniform in 0..=k and a random class; the
/// target is hypothesis 0. At least one vertex has out-degree exactly k.
pub fn random_fixture(n: usize, k: usize, hypotheses: usize, seed: u64) -> Result<Fixture> {
    if n < 2 {
        return Err(invalid("random fixtures need at least two vertices"));
    }
    check_budget(n, hypotheses)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graph = random_graph(&mut rng, n, k)?;
    if graph.max_out_degree() < k.min(n - 1) {
        let x = rng.random_range(0..n);
        let mut adj: Vec<Vec<usize>> = (0..n)
            .map(|v| graph.neighbors(VertexId(v)).iter().map(|u| u.0).collect())
            .collect();
        let mut others: Vec<usize> = (0..n).filter(|&y| y != x).collect();
        others.truncate(k.min(n - 1));
        adj[x] = others;
        graph = ManipulationGraph::new(k, adj)?;
    }
    let class = random_class(&mut rng, n, hypotheses)?;
    Ok(Fixture {
        kind: FixtureKind::Random { n, k, hypotheses, seed },
        graph,
        graphs: None,
        class,
        vertex_labels: (0..n).map(|i| format!("v{i}")).collect(),
        target: Some(0),
        graph_target: None,
    })
}

/// Random unknown-graph fixture: G⋆ plus decoys built from it by adding
/// arcs (supersets), deleting arcs, or redrawing. G⋆ sits at a random index.
pub fn random_ug_fixture(
    n: usize,
    k: usize,
    graphs: usize,
    hypotheses: usize,
    seed: u64,
) -> Result<Fixture> {
    if graphs == 0 {
        return Err(invalid("need at least one graph"));
    }
    let base = random_fixture(n, k, hypotheses, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_dec0);
    let star = base.graph.clone();
    let mut members = vec![star.clone()];
    let mut attempts = 0;
    while members.len() < graphs {
        attempts += 1;
        if attempts > 100 * graphs {
            return Err(invalid("could not draw enough distinct decoy graphs"));
        }
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|v| star.neighbors(VertexId(v)).iter().map(|u| u.0).collect())
            .collect();
        let decoy = match rng.random_range(0..3) {
            0 => {
                let mut adj = adj;
                let x = rng.random_range(0..n);
                let y = rng.random_range(0..n);
                if x == y || adj[x].contains(&y) || adj[x].len() >= k {
                    continue;
                }
                adj[x].push(y);
                ManipulationGraph::new(k, adj)?
            }
            1 => {
                let mut adj = adj;
                let x = rng.random_range(0..n);
                if adj[x].is_empty() {
                    continue;
                }
                let i = rng.random_range(0..adj[x].len());
                adj[x].remove(i);
                ManipulationGraph::new(k, adj)?
            }
            _ => random_graph(&mut rng, n, k)?,
        };
        if !members.contains(&decoy) {
            members.push(decoy);
        }
    }
    let pos = rng.random_range(0..members.len());
    members.swap(0, pos);
    Ok(Fixture {
        kind: FixtureKind::RandomUg { n, k, graphs, hypotheses, seed },
        graph: star,
        graphs: Some(GraphSet::Explicit(GraphClass::new(members)?)),
        class: base.class,
        vertex_labels: base.vertex_labels,
        target: Some(0),
        graph_target: Some(pos as u128),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binrep_sizes() {
        let f = binary_rep_construction(1, 8).unwrap();
        assert_eq!(f.n(), 27);
        assert_eq!(f.class.len(), 8);
        let f = binary_rep_construction(1, 2).unwrap();
        assert_eq!(f.n(), 3);
        assert_eq!(f.graph.arc_count(), 2);
        assert_eq!(f.class.len(), 2);
        assert!(binary_rep_construction(1, 3).is_err());
    }

    #[test]
    fn star_sizes() {
        let f = star_singletons(1, 3).unwrap();
        assert_eq!(f.n(), 4);
        assert_eq!(f.class.len(), 3);
        let f = star_singletons(2, 3).unwrap();
        assert_eq!(f.class.len(), 9);
        assert!(f.class.iter().all(|h| h.positive_count() == 2));
    }

    #[test]
    fn ug_pac_lb_family() {
        let f = ug_pac_lb_construction(2, 1).unwrap();
        let fam = f.graphs.as_ref().unwrap().as_family();
        assert_eq!(fam.len(), 9);
        assert!(fam.contains(&f.graph));
        assert_eq!(fam.index_of(&f.graph), f.graph_target);
        for i in 0..9 {
            assert!(fam.graph(i).max_out_degree() <= 1);
        }
    }

    #[test]
    fn chain_shape() {
        let f = chain_construction(3).unwrap();
        let GraphSet::Explicit(gc) = f.graphs.as_ref().unwrap() else {
            panic!("chain graphs are explicit")
        };
        assert_eq!(gc.len(), 3);
        assert_eq!(f.class.len(), 3);
        assert!(gc.members().iter().all(|g| g.max_out_degree() == 1));
    }

    #[test]
    fn generators_are_reproducible() {
        assert_eq!(random_fixture(8, 3, 16, 4).unwrap(), random_fixture(8, 3, 16, 4).unwrap());
        assert_eq!(
            random_ug_fixture(8, 2, 16, 8, 4).unwrap(),
            random_ug_fixture(8, 2, 16, 8, 4).unwrap()
        );
        let f = random_fixture(8, 3, 16, 9).unwrap();
        assert_eq!(f.graph.max_out_degree(), 3);
    }

    #[test]
    fn random_ug_contains_target() {
        let f = random_ug_fixture(8, 2, 16, 8, 11).unwrap();
        let fam = f.graphs.as_ref().unwrap().as_family();
        assert_eq!(fam.len(), 16);
        assert_eq!(fam.graph(f.graph_target.unwrap()), f.graph);
    }
}
