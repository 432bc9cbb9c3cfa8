use proptest::prelude::*;
use stratlearn::constructions::binary_rep_construction;
use stratlearn::graph::{format_class, format_graph, format_graph_class, ManipulationGraph, TieBreakRule};
use stratlearn::harness::{
    cmd_construct, cmd_dims, cmd_learn_graph, cmd_matrix, cmd_run, write_outputs, Assertions, CheckKind,
    ExperimentConfig, FixtureSpec, Grid, Mode, PacOptions, SourceSpec,
};
use stratlearn::online::{LearnerKind, LearnerOptions};
use stratlearn::pac::NeighborhoodMode;
use stratlearn::protocol::{AdversaryKind, FeedbackSetting};

fn config(fixture: FixtureSpec, learner: LearnerKind, rounds: usize) -> ExperimentConfig {
    ExperimentConfig {
        fixture,
        learner,
        learner_options: LearnerOptions::default(),
        setting: None,
        mode: None,
        source: SourceSpec::default(),
        rounds,
        seeds: vec![0, 1, 2],
        tie_break: TieBreakRule::LexMin,
        pac: PacOptions::default(),
        out: None,
        assertions: Assertions::default(),
        grid: None,
    }
}

#[test]
fn construct_writes_fixture_files() {
    let dir = tempfile::tempdir().unwrap();
    let m = cmd_construct(&FixtureSpec::Binrep { d: 1, k: 8 }, dir.path()).unwrap();
    assert_eq!((m.n, m.class_size, m.declared_k), (27, 8, 8));
    assert!(dir.path().join("graph.txt").exists());
    assert!(dir.path().join("manifest.json").exists());
    assert!(!dir.path().join("graphs.txt").exists());

    let m = cmd_construct(&FixtureSpec::Star { d: 1, k: 3 }, dir.path()).unwrap();
    assert_eq!((m.n, m.class_size), (4, 3));

    let m = cmd_construct(&FixtureSpec::UgPacLb { n: 2, i_star: 1 }, dir.path()).unwrap();
    assert_eq!(m.graph_class_size.as_deref(), Some("9"));
    assert!(m.files.contains(&"graphs.txt".to_string()));

    assert!(cmd_construct(&FixtureSpec::Binrep { d: 1, k: 3 }, dir.path()).is_err());
}

#[test]
fn dims_on_binrep() {
    let f = binary_rep_construction(1, 8).unwrap();
    let r = cmd_dims(&format_class(&f.class), Some(&format_graph(&f.graph))).unwrap();
    assert_eq!((r.d, r.ldim, r.dbar, r.ldim_induced), (1, 1, Some(3), Some(3)));
    assert_eq!(r.holds, Some(true));
    let r = cmd_dims(&format_class(&f.class), None).unwrap();
    assert_eq!(r.dbar, None);
    assert!(cmd_dims("n=2\n011\n", None).is_err());
}

#[test]
fn learn_graph_command() {
    let a = ManipulationGraph::from_arcs(3, 2, &[(0, 1), (0, 2)]).unwrap();
    let b = ManipulationGraph::from_arcs(3, 2, &[(0, 1)]).unwrap();
    let graphs = format_graph_class(&[a, b]);
    let clicks = "x,shown,clicked\n0,1 2,1\n0,1 2,1\n";
    let r = cmd_learn_graph(&graphs, clicks, NeighborhoodMode::Realizable).unwrap();
    assert_eq!((r.graph, r.degree_sum, r.clicks), (1, 2, 2));
    let clicks = "x,shown,clicked\n0,1 2,2\n";
    assert_eq!(cmd_learn_graph(&graphs, clicks, NeighborhoodMode::Realizable).unwrap().graph, 0);
}

#[test]
fn pmf_star_run_passes() {
    let mut cfg = config(FixtureSpec::Star { d: 1, k: 8 }, LearnerKind::Red2pmf, 60);
    cfg.setting = Some(FeedbackSetting::PmfV);
    cfg.source = SourceSpec::Adversary { name: AdversaryKind::PmfStar };
    let (summary, artifacts) = cmd_run(&cfg).unwrap();
    assert!(summary.passed, "{:?}", summary.failures());
    assert_eq!(artifacts.len(), 3);
    for o in &summary.outcomes {
        assert!(o.mistakes.unwrap() >= 7);
        assert!(o.checks.iter().any(|c| c.kind == CheckKind::Floor));
    }
    let dir = tempfile::tempdir().unwrap();
    write_outputs(dir.path(), &summary, &artifacts).unwrap();
    for f in ["summary.json", "transcript_seed0.csv", "run_seed2.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn validation_rejects_bad_configs() {
    let base = config(FixtureSpec::Star { d: 1, k: 3 }, LearnerKind::Red2fi, 10);
    let mut c = base.clone();
    c.seeds.clear();
    assert!(cmd_run(&c).is_err());
    let mut c = base.clone();
    c.setting = Some(FeedbackSetting::PmfV);
    assert!(cmd_run(&c).is_err());
    let mut c = base.clone();
    c.learner = LearnerKind::UgOnline;
    c.setting = None;
    assert!(cmd_run(&c).is_err());
    let mut c = base.clone();
    c.source = SourceSpec::Adversary { name: AdversaryKind::PmfStar };
    assert!(cmd_run(&c).is_err());
    let mut c = base;
    c.source = SourceSpec::Iid { noise: Some("3/2".into()) };
    assert!(cmd_run(&c).is_err());
    assert!(ExperimentConfig::from_json(r#"{"fixture":{"name":"star","d":1,"k":3},"learner":"soa","rounds":1,"seeds":[0],"extra":1}"#).is_err());
}

#[test]
fn arcless_matrix_matches_standard_errors() {
    let mut cfg = config(FixtureSpec::Random { n: 6, k: 0, hypotheses: 12, seed: 4 }, LearnerKind::Soa, 60);
    cfg.grid = Some(Grid {
        learners: vec![LearnerKind::Soa, LearnerKind::Halving, LearnerKind::Red2fi, LearnerKind::Red2pmf],
        settings: vec![FeedbackSetting::FullyInformative, FeedbackSetting::PmfX, FeedbackSetting::PmfV],
    });
    let m = cmd_matrix(&cfg).unwrap();
    assert!(m.passed);
    // red2fi runs only under fi.
    assert_eq!(m.rows.len(), (3 + 3 + 1 + 3) * 3);
    for r in &m.rows {
        assert_eq!(r.mistakes, r.standard_errors, "{r:?}");
    }
    assert!(!m.skipped.is_empty());
    assert!(m.to_csv().unwrap().starts_with("learner,setting,seed"));
}

#[test]
fn pac_run_reports_exact_loss() {
    let mut cfg = config(FixtureSpec::UgPacLb { n: 3, i_star: 2 }, LearnerKind::UgRel, 300);
    cfg.pac.max_loss = Some(0.05);
    let (summary, artifacts) = cmd_run(&cfg).unwrap();
    assert_eq!(summary.mode, Mode::Pac);
    assert!(summary.passed, "{:?}", summary.failures());
    assert!(artifacts.iter().all(|a| a.sample_csv.is_some()));
}

#[test]
fn runs_are_deterministic() {
    let mut cfg = config(FixtureSpec::Random { n: 7, k: 2, hypotheses: 10, seed: 1 }, LearnerKind::Red2pmf, 80);
    cfg.source = SourceSpec::Iid { noise: Some("1/10".into()) };
    cfg.assertions.ceilings = false;
    let (a, xa) = cmd_run(&cfg).unwrap();
    let (b, xb) = cmd_run(&cfg).unwrap();
    let digests = |s: &stratlearn::harness::RunSummary| s.outcomes.iter().map(|o| o.digest.clone()).collect::<Vec<_>>();
    assert_eq!(digests(&a), digests(&b));
    for (x, y) in xa.iter().zip(&xb) {
        assert_eq!(x.transcript_csv, y.transcript_csv);
    }
}

fn fixture_spec() -> impl Strategy<Value = FixtureSpec> {
    prop_oneof![
        (1usize..3, 1usize..4).prop_map(|(d, e)| FixtureSpec::Binrep { d, k: 1 << e }),
        (1usize..3, 1usize..6).prop_map(|(d, k)| FixtureSpec::Star { d, k }),
        (2usize..5).prop_map(|n| FixtureSpec::Chain { n }),
        (2usize..8, 0usize..3, 1usize..20, any::<u64>())
            .prop_map(|(n, k, hypotheses, seed)| FixtureSpec::Random { n, k, hypotheses, seed }),
    ]
}

proptest! {
    #[test]
    fn config_json_round_trips(
        fixture in fixture_spec(),
        learner in proptest::sample::select(LearnerKind::ALL.to_vec()),
        setting in proptest::option::of(proptest::sample::select(FeedbackSetting::ALL.to_vec())),
        rounds in 1usize..1000,
        seeds in proptest::collection::vec(any::<u64>(), 1..4),
        noise in proptest::option::of(0u32..10),
        tie in 0u8..2,
        max_loss in proptest::option::of(0.0f64..1.0),
    ) {
        let mut cfg = config(fixture, learner, rounds);
        cfg.setting = setting;
        cfg.seeds = seeds;
        cfg.source = SourceSpec::Iid { noise: noise.map(|n| format!("{n}/10")) };
        if tie == 1 {
            cfg.tie_break = TieBreakRule::UniformRandom { seed: rounds as u64 };
        }
        cfg.pac.max_loss = max_loss;
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
