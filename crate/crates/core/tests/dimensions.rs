mod common;

use common::*;
use proptest::prelude::*;
use stratlearn::constructions::{binary_rep_construction, binrep_hubs, random_fixture, star_singletons};
use stratlearn::dims::*;
use stratlearn::graph::{Hypothesis, HypothesisClass, ManipulationGraph};
use stratlearn::Error;

/// Independent shattering oracle: some subset of size m whose 2^m patterns
/// all occur.
fn shatters(rows: &[Hypothesis], set: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::new();
    for h in rows {
        seen.insert(set.iter().map(|&x| h.label(stratlearn::graph::VertexId(x))).collect::<Vec<_>>());
    }
    seen.len() == 1 << set.len()
}

fn naive_vc(rows: &[Hypothesis], n: usize) -> usize {
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if set.len() > best && shatters(rows, &set) {
            best = set.len();
        }
    }
    best
}

/// Plain recursion with no memo or pruning.
fn naive_ldim(rows: &[Hypothesis], n: usize) -> usize {
    if rows.len() <= 1 {
        return 0;
    }
    let mut best = 0;
    for x in (0..n).map(stratlearn::graph::VertexId) {
        let (one, zero): (Vec<_>, Vec<_>) = rows.iter().cloned().partition(|h| h.label(x));
        if !one.is_empty() && !zero.is_empty() {
            best = best.max(1 + naive_ldim(&one, n).min(naive_ldim(&zero, n)));
        }
    }
    best
}

#[test]
fn small_classes() {
    let p3 = HypothesisClass::power_set(3).unwrap();
    assert_eq!(vc_dimension(p3.members()).unwrap(), 3);
    let s = HypothesisClass::singletons(5, 0..5).unwrap();
    assert_eq!(vc_dimension(s.members()).unwrap(), 1);
    assert_eq!(littlestone_dimension(s.members()).unwrap(), 1);
    let one = HypothesisClass::singletons(3, [1]).unwrap();
    assert_eq!(littlestone_dimension(one.members()).unwrap(), 0);
    let p4 = HypothesisClass::power_set(4).unwrap();
    assert_eq!(littlestone_dimension(p4.members()).unwrap(), 4);
}

#[test]
fn induced_class_examples() {
    let cls = HypothesisClass::power_set(3).unwrap();
    let arcless = ManipulationGraph::arcless(3);
    let ind = induce_class(&arcless, &cls).unwrap();
    assert_eq!(ind.members(), cls.members());
    let pos = HypothesisClass::new(3, vec![Hypothesis::all_positive(3)]).unwrap();
    let g = ManipulationGraph::from_arcs(3, 1, &[(0, 1)]).unwrap();
    assert_eq!(induce_class(&g, &pos).unwrap().members(), pos.members());
    let other = HypothesisClass::power_set(2).unwrap();
    assert!(matches!(induce_class(&g, &other), Err(Error::Validation(_))));
}

#[test]
fn binrep_hubs_see_every_pattern() {
    let f = binary_rep_construction(1, 4).unwrap();
    let ind = induce_class(&f.graph, &f.class).unwrap();
    let hubs = binrep_hubs(1, 4);
    let patterns: std::collections::BTreeSet<Vec<bool>> =
        ind.members().iter().map(|h| hubs.iter().map(|&x| h.label(x)).collect()).collect();
    assert_eq!(patterns.len(), 4);
}

#[test]
fn binrep_identities_against_naive_oracles() {
    for (d, k) in [(1, 2), (1, 4), (2, 2)] {
        let f = binary_rep_construction(d, k).unwrap();
        let n = f.n();
        let ind = induce_class(&f.graph, &f.class).unwrap();
        let expect = d * k.trailing_zeros() as usize;
        assert_eq!(vc_dimension(f.class.members()).unwrap(), d);
        assert_eq!(littlestone_dimension(f.class.members()).unwrap(), d);
        assert_eq!(vc_dimension(ind.members()).unwrap(), expect);
        assert_eq!(littlestone_dimension(ind.members()).unwrap(), expect);
        if n <= 12 {
            assert_eq!(naive_vc(ind.members(), n), expect);
            assert_eq!(naive_ldim(ind.members(), n), expect);
        }
    }
}

#[test]
fn binrep_equality_case_of_the_upper_bound() {
    let f = binary_rep_construction(1, 8).unwrap();
    let r = verify_vcd_upper(&f.graph, &f.class).unwrap();
    assert_eq!((r.d, r.dbar, r.bound, r.holds), (1, 3, 3, true));
    assert!(r.near_bound);
    let base = vc_dimension(f.class.members()).unwrap();
    assert_eq!(base, 1);
}

#[test]
fn arcless_graph_keeps_the_dimension() {
    let f = random_fixture(8, 0, 16, 4).unwrap();
    let r = verify_vcd_upper(&f.graph, &f.class).unwrap();
    assert_eq!(r.d, r.dbar);
    assert!(r.holds);
}

#[test]
fn star_dimensions() {
    let f = star_singletons(1, 3).unwrap();
    assert_eq!(littlestone_dimension(f.class.members()).unwrap(), 1);
    let f = star_singletons(2, 2).unwrap();
    assert_eq!(littlestone_dimension(f.class.members()).unwrap(), 2);
    assert_eq!(naive_ldim(f.class.members(), f.n()), 2);
}

#[test]
fn budget_errors_report_the_size_reached() {
    let big = HypothesisClass::singletons(70, 0..70).unwrap();
    match vc_dimension(big.members()) {
        Err(Error::Budget { reached, limit, .. }) => assert!(reached > limit),
        other => panic!("expected a budget error, got {other:?}"),
    }
    let tight = DimBudget { max_nodes: 10, ..DimBudget::default() };
    let p = HypothesisClass::power_set(8).unwrap();
    assert!(matches!(littlestone_dimension_with(p.members(), &tight), Err(Error::Budget { .. })));
}

#[test]
fn fifty_random_fixtures_respect_the_upper_bound() {
    let mut failures = 0;
    for seed in 0..50u64 {
        let n = 4 + (seed as usize % 7);
        let k = 1 + (seed as usize % 4);
        let size = 2 + (seed as usize * 7) % 31;
        let size = size.min(1 << n);
        let f = random_fixture(n, k, size, seed).unwrap();
        let r = verify_vcd_upper(&f.graph, &f.class).unwrap();
        assert_eq!(r.bound, vcd_upper_bound(r.d, r.k));
        failures += usize::from(!r.holds);
    }
    assert_eq!(failures, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimensions_are_ordered_and_match_naive(cls in class_strategy(6, 20)) {
        let rows = cls.members();
        let vc = vc_dimension(rows).unwrap();
        let ld = littlestone_dimension(rows).unwrap();
        prop_assert!(vc <= ld);
        prop_assert!(ld <= (usize::BITS - 1 - rows.len().leading_zeros()) as usize);
        prop_assert_eq!(vc, naive_vc(rows, 6));
        prop_assert_eq!(ld, naive_ldim(rows, 6));
    }

    #[test]
    fn induced_class_bounds((g, cls) in graph_and_class(8, 3, 24)) {
        let ind = induce_class(&g, &cls).unwrap();
        prop_assert!(ind.len() <= cls.len());
        for (m, &src) in ind.members().iter().zip(ind.sources()) {
            prop_assert_eq!(m, &induced_labeling(&g, cls.get(src)));
        }
        let r = verify_vcd_upper(&g, &cls).unwrap();
        prop_assert!(r.holds);
    }

    #[test]
    fn arcless_induction_is_idempotent(cls in class_strategy(5, 12)) {
        let g = ManipulationGraph::arcless(5);
        let once = induce_class(&g, &cls).unwrap();
        let again = induce_class(&g, &HypothesisClass::new(5, once.members().to_vec()).unwrap()).unwrap();
        prop_assert_eq!(once.members(), again.members());
    }
}
