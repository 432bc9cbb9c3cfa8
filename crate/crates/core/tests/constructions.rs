use stratlearn::constructions::*;
use stratlearn::graph::{
    induced, population_strategic_loss, ratio, Hypothesis, TieBreakRule, VertexId,
};
use stratlearn::online::{soa, ug_online};
use stratlearn::protocol::{adversary, run_online, AdversaryKind, FeedbackSetting, RunSpec};

#[test]
fn binrep_minimal_size() {
    let f = binary_rep_construction(1, 2).unwrap();
    // One bit row: hub plus two leaves.
    assert_eq!(f.n(), 3);
    assert_eq!(f.graph.arc_count(), 2);
    assert_eq!(f.class.len(), 2);
    assert_eq!(binary_rep_construction(1, 8).unwrap().n(), 27);
    assert!(binary_rep_construction(1, 3).is_err());
    assert!(binary_rep_construction(0, 2).is_err());
}

#[test]
fn binrep_labels_follow_binary_representation() {
    let k = 4;
    let f = binary_rep_construction(1, k).unwrap();
    for (idx, h) in f.class.iter().enumerate() {
        let j = idx + 1;
        for row in 0..2 {
            for col in 1..=k {
                let bit = col == j && ((j % k) >> row) & 1 == 1;
                assert_eq!(h.label(VertexId(grid_index(row, col, k))), bit);
            }
            assert!(!h.label(VertexId(grid_index(row, 0, k))));
        }
    }
}

#[test]
fn star_examples() {
    let f = star_singletons(1, 3).unwrap();
    assert_eq!((f.n(), f.class.len()), (4, 3));
    let hub = VertexId(grid_index(0, 0, 3));
    assert!(!induced(&f.graph, &Hypothesis::all_negative(4), hub));
    // The all-negative hypothesis loses on (hub, 1).
    let t = f.target_hypothesis().unwrap();
    assert!(induced(&f.graph, t, hub));
    assert_eq!(star_singletons(2, 3).unwrap().class.len(), 9);
}

#[test]
fn ug_pac_lb_family() {
    let f = ug_pac_lb_construction(2, 1).unwrap();
    let fam = f.graphs.as_ref().unwrap().as_family();
    assert_eq!(fam.len(), 9);
    let gc = fam.materialize(100).unwrap();
    assert_eq!(gc.len(), 9);
    assert!(gc.members().iter().all(|g| g.max_out_degree() <= 1));
    let distinct: std::collections::HashSet<_> = gc.members().iter().map(stratlearn::graph::format_graph).collect();
    assert_eq!(distinct.len(), 9);
    assert_eq!(fam.graph(f.graph_target.unwrap()), f.graph);
}

#[test]
fn ug_pac_lb_distribution_is_realizable_for_every_target() {
    let n = 3;
    let eps = ratio(1, 10);
    let dist = ug_pac_lb_distribution(n, &eps).unwrap();
    for i_star in 1..=n {
        let f = ug_pac_lb_construction(n, i_star).unwrap();
        for j in 1..=n {
            assert!(f.graph.has_arc(VertexId(ug_pac_index(n, 0, j)), VertexId(ug_pac_index(n, i_star, j))));
        }
        let h = f.target_hypothesis().unwrap();
        let loss = population_strategic_loss(&f.graph, h, &dist, &TieBreakRule::LexMin).unwrap();
        assert_eq!(loss, ratio(0, 1));
        for (i, other) in f.class.iter().enumerate() {
            if i + 1 != i_star {
                let l = population_strategic_loss(&f.graph, other, &dist, &TieBreakRule::LexMin).unwrap();
                assert_eq!(l, ratio(1, 5));
            }
        }
    }
}

#[test]
fn chain_examples() {
    let f = chain_construction(3).unwrap();
    let gc = match f.graphs.as_ref().unwrap() {
        GraphSet::Explicit(gc) => gc.clone(),
        _ => panic!("chain graph class is explicit"),
    };
    assert_eq!((gc.len(), f.class.len()), (3, 3));
    for g in gc.members() {
        assert!(g.max_out_degree() <= 1);
        assert_eq!(g.arc_count(), 2);
    }
    let neg = Hypothesis::all_negative(f.n());
    assert!(!induced(&f.graph, &neg, CHAIN_B));
    assert!(induced(&f.graph, f.target_hypothesis().unwrap(), CHAIN_B));
}

#[test]
fn ug_online_lb_forces_a_mistake_at_n2() {
    let f = ug_online_lb_construction(2).unwrap();
    let gc = f.graphs.as_ref().unwrap().as_family().materialize(1000).unwrap();
    assert_eq!(gc.len(), 9);
    let mut learner = ug_online(soa(&f.class).unwrap(), &gc, 1).unwrap();
    let mut src = adversary(AdversaryKind::UgOnlineLb, &f, true).unwrap();
    let t = run_online(&mut learner, src.as_mut(), &RunSpec::new(FeedbackSetting::UgXThenV, 4)).unwrap();
    assert!(t.mistakes >= 1);
}

#[test]
fn regeneration_is_bit_identical() {
    let a = random_ug_fixture(8, 2, 16, 8, 42).unwrap();
    let b = random_ug_fixture(8, 2, 16, 8, 42).unwrap();
    assert_eq!(a.graph, b.graph);
    assert_eq!(a.class, b.class);
    assert_eq!(a.graph_target, b.graph_target);
    for f in [
        binary_rep_construction(2, 4).unwrap(),
        star_singletons(2, 3).unwrap(),
        ug_online_lb_construction(3).unwrap(),
        random_fixture(9, 3, 20, 1).unwrap(),
    ] {
        let again = f.kind.build().unwrap();
        assert_eq!(again.graph, f.graph);
        assert_eq!(again.class, f.class);
        assert!(f.graph.max_out_degree() <= f.graph.declared_k());
    }
}

#[test]
fn random_ug_fixture_contains_the_true_graph() {
    for seed in 0..10 {
        let f = random_ug_fixture(8, 2, 16, 8, seed).unwrap();
        let fam = f.graphs.as_ref().unwrap().as_family();
        assert_eq!(fam.graph(f.graph_target.unwrap()), f.graph);
        let dist = f.realizable_distribution(seed).unwrap();
        let h = f.target_hypothesis().unwrap();
        assert!(dist.support().iter().all(|(a, _)| induced(&f.graph, h, a.x) == a.y));
    }
}
