mod common;

use proptest::prelude::*;
use stratlearn::constructions::{
    binary_rep_construction, chain_construction, grid_index, random_fixture, star_singletons,
    ug_online_lb_construction,
};
use stratlearn::exec::Exec;
use stratlearn::graph::{
    induced, Agent, AgentDistribution, Hypothesis, HypothesisClass, ManipulationGraph, VertexId,
};
use stratlearn::online::{red2online_fi, red2online_pmf, soa, ug_online, StrategicLearner};
use stratlearn::protocol::{
    adversary, best_in_hindsight, collect_pac_sample, parse_transcript_csv, run_online,
    AdversaryKind, Feedback, FeedbackSetting, IidSource, Probe, RunSpec,
};
use stratlearn::{Error, Result};

/// Proposes the same hypothesis every round.
#[derive(Clone)]
struct Fixed(Hypothesis);

impl StrategicLearner for Fixed {
    fn name(&self) -> String {
        "fixed".into()
    }
    fn supports(&self, _setting: FeedbackSetting) -> bool {
        true
    }
    fn propose(&mut self, _x: Option<VertexId>) -> Result<Hypothesis> {
        Ok(self.0.clone())
    }
    fn observe(&mut self, _fb: &Feedback) -> Result<()> {
        Ok(())
    }
}

#[test]
fn fixed_learners() {
    let f = star_singletons(2, 3).unwrap();
    let target = f.target_hypothesis().unwrap().clone();
    let dist = AgentDistribution::uniform(&[Agent::new(grid_index(0, 0, 3), true), Agent::new(grid_index(1, 0, 3), true)]).unwrap();
    let mut src = IidSource::new(f.graph.clone(), dist.clone(), 1, Some(target.clone())).unwrap();
    let mut neg = Fixed(Hypothesis::all_negative(f.n()));
    let tr = run_online(&mut neg, &mut src, &RunSpec::new(FeedbackSetting::PmfV, 25)).unwrap();
    assert_eq!(tr.mistakes, 25);

    let dist = f.realizable_distribution(4).unwrap();
    for setting in FeedbackSetting::ALL {
        let mut src = IidSource::new(f.graph.clone(), dist.clone(), 4, Some(target.clone())).unwrap();
        let spec = RunSpec::new(setting, 50).with_regret(&f.class);
        let tr = run_online(&mut Fixed(target.clone()), &mut src, &spec).unwrap();
        assert_eq!(tr.mistakes, 0);
        assert_eq!(tr.regret(), Some(0));
    }
}

#[test]
fn best_in_hindsight_examples() {
    let g = ManipulationGraph::from_arcs(3, 1, &[(0, 1)]).unwrap();
    let cls = HypothesisClass::new(3, vec![
        Hypothesis::parse("000").unwrap(),
        Hypothesis::parse("010").unwrap(),
        Hypothesis::parse("001").unwrap(),
    ])
    .unwrap();
    // 010 induces 110: agent 0 and 1 positive, 2 negative.
    let agents = [Agent::new(0, true), Agent::new(1, true), Agent::new(2, false), Agent::new(2, true)];
    assert_eq!(best_in_hindsight(&cls, &g, &agents, Exec::Sequential).unwrap(), (1, 1));
    assert_eq!(best_in_hindsight(&cls, &g, &[], Exec::Sequential).unwrap(), (0, 0));
    // Ties go to the smallest index.
    let agents = [Agent::new(2, false)];
    assert_eq!(best_in_hindsight(&cls, &g, &agents, Exec::Sequential).unwrap(), (0, 0));
}

#[test]
fn adversaries_match_their_fixtures() {
    let star = star_singletons(1, 4).unwrap();
    let binrep = binary_rep_construction(1, 4).unwrap();
    assert!(matches!(adversary(AdversaryKind::PmfStar, &binrep, false), Err(Error::Validation(_))));
    assert!(matches!(adversary(AdversaryKind::FiBinrep, &star, true), Err(Error::Validation(_))));
    assert!(adversary(AdversaryKind::UgChain, &star, false).is_err());
    assert!(adversary(AdversaryKind::Greedy, &star, false).is_ok());
    assert!(AdversaryKind::PmfStar.compatible(FeedbackSetting::PmfV));
    assert!(!AdversaryKind::PmfStar.compatible(FeedbackSetting::FullyInformative));
    assert!(AdversaryKind::UgChain.compatible(FeedbackSetting::UgPairAfter));
    assert!(!AdversaryKind::UgChain.compatible(FeedbackSetting::UgXThenV));
    for k in AdversaryKind::ALL {
        assert_eq!(k.as_str().parse::<AdversaryKind>().unwrap(), k);
    }
}

#[test]
fn engine_rejects_bad_pairings() {
    let star = star_singletons(1, 4).unwrap();
    let mut fi = red2online_fi(soa(&star.class).unwrap(), &star.graph);
    let mut src = adversary(AdversaryKind::PmfStar, &star, false).unwrap();
    // red2fi does not run in pmf-v.
    let r = run_online(&mut fi, src.as_mut(), &RunSpec::new(FeedbackSetting::PmfV, 3));
    assert!(matches!(r, Err(Error::Protocol(_))));
    // pmf-star never commits x_t, which fi needs.
    let r = run_online(&mut fi, src.as_mut(), &RunSpec::new(FeedbackSetting::FullyInformative, 3));
    assert!(matches!(r, Err(Error::Protocol(_))));
}

#[test]
fn adversary_runs_replay_under_final_graph() {
    let lb = ug_online_lb_construction(3).unwrap();
    let graphs = lb.graphs.as_ref().unwrap().as_family().materialize(1 << 16).unwrap();
    let mut learner = ug_online(soa(&lb.class).unwrap(), &graphs, graphs.declared_k()).unwrap();
    let mut src = adversary(AdversaryKind::UgOnlineLb, &lb, true).unwrap();
    let tr = run_online(&mut learner, src.as_mut(), &RunSpec::new(FeedbackSetting::UgXThenV, 12)).unwrap();
    assert!(graphs.members().contains(&tr.final_graph));
    let target = tr.target.clone().unwrap();
    for (r, h) in tr.rounds.iter().zip(&tr.hypotheses) {
        assert_eq!(r.mistake, induced(&tr.final_graph, h, r.x) != r.y);
        assert_eq!(r.y, induced(&tr.final_graph, &target, r.x));
    }

    let chain = chain_construction(4).unwrap();
    let graphs = chain.graphs.as_ref().unwrap().as_family().materialize(1 << 16).unwrap();
    let mut learner = ug_online(soa(&chain.class).unwrap(), &graphs, graphs.declared_k()).unwrap();
    let mut src = adversary(AdversaryKind::UgChain, &chain, false).unwrap();
    let tr = run_online(&mut learner, src.as_mut(), &RunSpec::new(FeedbackSetting::UgPairAfter, 20)).unwrap();
    assert!(tr.mistakes >= 3);
    assert!(graphs.members().contains(&tr.final_graph));
}

#[test]
fn star_probe_reveals_uniform_leaves() {
    let k = 4;
    let f = star_singletons(1, k).unwrap();
    let hub = grid_index(0, 0, k);
    let dist = AgentDistribution::point_mass(Agent::new(hub, false));
    let draws = 10_000;
    let sample = collect_pac_sample(&f.graph, &dist, draws, Probe::AllButX, 9).unwrap();
    for j in 1..=k {
        let hits = sample.iter().filter(|o| o.v.index() == grid_index(0, j, k)).count();
        let freq = hits as f64 / draws as f64;
        assert!((freq - 1.0 / k as f64).abs() <= 0.03, "leaf {j}: {freq}");
    }
    let still = collect_pac_sample(&f.graph, &dist, 100, Probe::AllPositive, 9).unwrap();
    assert!(still.iter().all(|o| o.v == o.x));
    // Leaves have no arcs, so they stay put even under the all-but-x probe.
    let leaf = AgentDistribution::point_mass(Agent::new(grid_index(0, 2, k), true));
    let s = collect_pac_sample(&f.graph, &leaf, 50, Probe::AllButX, 0).unwrap();
    assert!(s.iter().all(|o| o.v == o.x && o.y));
}

#[test]
fn runs_are_deterministic() {
    let f = random_fixture(7, 2, 12, 5).unwrap();
    let run = || {
        let mut learner = red2online_pmf(soa(&f.class).unwrap(), 2);
        let mut src = IidSource::new(f.graph.clone(), f.realizable_distribution(3).unwrap(), 3, f.target_hypothesis().cloned()).unwrap();
        run_online(&mut learner, &mut src, &RunSpec::new(FeedbackSetting::PmfX, 80)).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    assert_eq!(a.digest().unwrap(), b.digest().unwrap());
    let rows = parse_transcript_csv(&a.to_csv().unwrap()).unwrap();
    assert_eq!(rows.len(), 80);
    for (row, r) in rows.iter().zip(&a.rounds) {
        assert_eq!(*row, (r.t, r.x.index(), r.v.index(), r.yhat, r.y, r.mistake));
    }
    let s1 = collect_pac_sample(&f.graph, &f.realizable_distribution(0).unwrap(), 200, Probe::AllButX, 11).unwrap();
    let s2 = collect_pac_sample(&f.graph, &f.realizable_distribution(0).unwrap(), 200, Probe::AllButX, 11).unwrap();
    assert_eq!(s1, s2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn best_in_hindsight_is_the_minimum(
        (g, cls) in common::graph_and_class(6, 3, 8),
        picks in proptest::collection::vec((0usize..6, any::<bool>()), 0..20),
    ) {
        let agents: Vec<Agent> = picks.into_iter().map(|(x, y)| Agent::new(x % g.n(), y)).collect();
        let (i, loss) = best_in_hindsight(&cls, &g, &agents, Exec::Sequential).unwrap();
        let losses: Vec<usize> = cls
            .iter()
            .map(|h| agents.iter().filter(|a| induced(&g, h, a.x) != a.y).count())
            .collect();
        prop_assert_eq!(loss, *losses.iter().min().unwrap());
        prop_assert_eq!(i, losses.iter().position(|&l| l == loss).unwrap());
        prop_assert_eq!(best_in_hindsight(&cls, &g, &agents, Exec::Parallel).unwrap(), (i, loss));
    }

    #[test]
    fn probe_reveals_an_out_neighbor((g, _h) in common::graph_and_hypothesis(7, 3), seed in any::<u64>()) {
        let agents: Vec<Agent> = (0..g.n()).map(|x| Agent::new(x, x % 2 == 0)).collect();
        let dist = AgentDistribution::uniform(&agents).unwrap();
        for o in collect_pac_sample(&g, &dist, 30, Probe::AllButX, seed).unwrap() {
            if g.neighbors(o.x).is_empty() {
                prop_assert_eq!(o.v, o.x);
            } else {
                prop_assert!(g.has_arc(o.x, o.v));
            }
        }
    }
}
