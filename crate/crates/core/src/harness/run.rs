use super::config::{ExperimentConfig, Mode, SourceSpec};
use crate::constructions::{Fixture, FixtureKind};
use crate::dims::littlestone_dimension;
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::{
    population_strategic_loss, Agent, AgentDistribution, Hypothesis, ManipulationGraph,
    Rational, TieBreakRule,
};
use crate::online::bounds::{binrep_floor, fi_ceiling, pmf_ceiling, star_floor, ug_ceiling, ug_floor};
use crate::online::{
    agnostic_online_fi, build_learner, AgnosticOptions, LearnerKind, StrategicLearner,
};
use crate::pac::{
    erm_strategic, exact_neighborhood_loss, format_observations, learn_neighborhoods,
    split_sizes, ug_agnostic, ug_realizable, Click, GraphHypothesisPair, LabeledObservation,
    NeighborhoodMode,
};
use crate::protocol::{
    adversary, collect_pac_sample, run_online, AdversaryKind, AgentSource, FeedbackSetting,
    IidSource, Probe, RunSpec, Transcript,
};
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Ceiling,
    Floor,
    Regret,
    Loss,
    Invariant,
}

/// One asserted bound and what the run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub bound: f64,
    pub observed: f64,
    pub passed: bool,
}

impl Check {
    fn upper(name: &str, kind: CheckKind, bound: f64, observed: f64) -> Self {
        Self { name: name.into(), kind, bound, observed, passed: observed <= bound }
    }

    fn lower(name: &str, bound: f64, observed: f64) -> Self {
        Self { name: name.into(), kind: CheckKind::Floor, bound, observed, passed: observed >= bound }
    }
}

/// Result of one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub mistakes: Option<usize>,
    pub regret: Option<i64>,
    pub expected_regret: Option<f64>,
    /// Rounds where h_t(x_t) ≠ y_t, i.e. the loss without manipulation.
    pub standard_errors: Option<usize>,
    /// Exact population strategic loss of a batch learner's output.
    pub loss: Option<String>,
    pub standard_loss: Option<String>,
    pub selected: Option<GraphHypothesisPair>,
    pub digest: Option<String>,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl SeedOutcome {
    fn empty(seed: u64) -> Self {
        Self {
            seed,
            mistakes: None,
            regret: None,
            expected_regret: None,
            standard_errors: None,
            loss: None,
            standard_loss: None,
            selected: None,
            digest: None,
            checks: Vec::new(),
            error: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("seed {}: {} {:?} bound {} observed {}", self.seed, c.name, c.kind, c.bound, c.observed))
            .collect();
        if let Some(e) = &self.error {
            out.push(format!("seed {}: {e}", self.seed));
        }
        out
    }
}

/// JSON sidecar written next to each transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub fixture: String,
    pub learner: LearnerKind,
    pub setting: FeedbackSetting,
    pub seed: u64,
    pub rounds: usize,
    pub source: String,
    pub tie_break: TieBreakRule,
    pub mistakes: Option<usize>,
    pub regret: Option<i64>,
    pub digest: Option<String>,
    pub checks: Vec<Check>,
}

/// Files produced by one seed.
#[derive(Debug, Clone)]
pub struct SeedArtifacts {
    pub seed: u64,
    pub transcript_csv: Option<String>,
    pub sample_csv: Option<String>,
    pub metadata: RunMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub fixture: String,
    pub learner: LearnerKind,
    pub setting: FeedbackSetting,
    pub mode: Mode,
    pub source: String,
    pub rounds: usize,
    pub outcomes: Vec<SeedOutcome>,
    pub passed: bool,
}

impl RunSummary {
    pub fn failures(&self) -> Vec<String> {
        self.outcomes.iter().flat_map(|o| o.failures()).collect()
    }
}

/// A built fixture plus what every seed shares.
pub struct Prepared {
    pub fixture: Fixture,
    ldim: Option<usize>,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let fixture = cfg.fixture.build()?;
        let ldim = if cfg.mode() == Mode::Online && cfg.assertions.ceilings {
            Some(littlestone_dimension(fixture.class.members())?)
        } else {
            None
        };
        Ok(Self { fixture, ldim })
    }
}

/// Run every seed of a config. Seed-level failures are recorded, not raised.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<(RunSummary, Vec<SeedArtifacts>)> {
    cfg.validate()?;
    let prep = Prepared::new(cfg)?;
    Ok(run_prepared(cfg, &prep, Exec::default()))
}

pub(crate) fn run_prepared(cfg: &ExperimentConfig, prep: &Prepared, exec: Exec) -> (RunSummary, Vec<SeedArtifacts>) {
    let results = exec.map(cfg.seeds.len(), |i| run_seed(cfg, prep, cfg.seeds[i]));
    let (outcomes, artifacts): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let summary = RunSummary {
        fixture: prep.fixture.name(),
        learner: cfg.learner,
        setting: cfg.setting(),
        mode: cfg.mode(),
        source: cfg.source.label(),
        rounds: cfg.rounds,
        passed: outcomes.iter().all(SeedOutcome::passed),
        outcomes,
    };
    (summary, artifacts.into_iter().flatten().collect())
}

/// Write transcripts, sidecars and `summary.json` under `dir`.
pub fn write_outputs(dir: &Path, summary: &RunSummary, artifacts: &[SeedArtifacts]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for a in artifacts {
        if let Some(csv) = &a.transcript_csv {
            std::fs::write(dir.join(format!("transcript_seed{}.csv", a.seed)), csv)?;
        }
        if let Some(csv) = &a.sample_csv {
            std::fs::write(dir.join(format!("sample_seed{}.csv", a.seed)), csv)?;
        }
        std::fs::write(
            dir.join(format!("run_seed{}.json", a.seed)),
            serde_json::to_string_pretty(&a.metadata)? + "\n",
        )?;
    }
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}

fn run_seed(cfg: &ExperimentConfig, prep: &Prepared, seed: u64) -> (SeedOutcome, Option<SeedArtifacts>) {
    let result = match cfg.mode() {
        Mode::Online => online_seed(cfg, prep, seed),
        Mode::Pac => pac_seed(cfg, prep, seed),
    };
    match result {
        Ok((o, a)) => (o, Some(a)),
        Err(e) => {
            let mut o = SeedOutcome::empty(seed);
            o.error = Some(e.to_string());
            (o, None)
        }
    }
}

fn distribution(cfg: &ExperimentConfig, fx: &Fixture, seed: u64) -> Result<(AgentDistribution, bool)> {
    match cfg.source.noise()? {
        Some(noise) => Ok((fx.noisy_distribution(seed, &noise)?, false)),
        None => Ok((fx.realizable_distribution(seed)?, true)),
    }
}

fn build_source(cfg: &ExperimentConfig, fx: &Fixture, seed: u64) -> Result<Box<dyn AgentSource>> {
    let setting = cfg.setting();
    match &cfg.source {
        SourceSpec::Iid { .. } => {
            let (dist, realizable) = distribution(cfg, fx, seed)?;
            let target = if realizable { fx.target_hypothesis().cloned() } else { None };
            Ok(Box::new(IidSource::new(fx.graph.clone(), dist, seed, target)?))
        }
        SourceSpec::Adversary { name } => adversary(*name, fx, setting.discloses_x_before()),
    }
}

fn floor_for(name: AdversaryKind, kind: &FixtureKind) -> Option<usize> {
    match (name, kind) {
        (AdversaryKind::FiBinrep, FixtureKind::Binrep { d, k }) => Some(binrep_floor(*d, *k)),
        (AdversaryKind::PmfStar, FixtureKind::Star { d, k }) => Some(star_floor(*d, *k)),
        (AdversaryKind::UgOnlineLb, FixtureKind::UgOnlineLb { n }) => Some(ug_floor(*n)),
        (AdversaryKind::UgChain, FixtureKind::Chain { n }) => Some(ug_floor(*n)),
        _ => None,
    }
}

/// The learner's ceiling on realizable runs, if it has one.
fn ceiling_for(cfg: &ExperimentConfig, fx: &Fixture, ldim: usize) -> Option<(&'static str, usize)> {
    let opts = &cfg.learner_options;
    match cfg.learner {
        LearnerKind::Red2fi => Some(("fi-ceiling", fi_ceiling(ldim, fx.graph.max_out_degree()))),
        LearnerKind::Red2pmf => {
            let k = opts.k_bound.unwrap_or_else(|| fx.graph.max_out_degree());
            // The formula vanishes at k = 0, where it bounds nothing.
            (k > 0).then(|| ("pmf-ceiling", pmf_ceiling(ldim, k)))
        }
        // The guarantee needs x_t disclosed before h_t.
        LearnerKind::UgOnline if cfg.setting() == FeedbackSetting::UgXThenV => {
            let fam = fx.graphs.as_ref()?.as_family();
            let k = opts.k_bound.unwrap_or_else(|| fam.declared_k());
            let len = usize::try_from(fam.len()).ok()?;
            Some(("ug-ceiling", ug_ceiling(ldim, k, len)))
        }
        _ => None,
    }
}

/// Per-round weight bookkeeping of the weighted reductions.
fn weight_check(cfg: &ExperimentConfig, fx: &Fixture, t: &Transcript) -> Option<Check> {
    let factor = match cfg.learner {
        LearnerKind::Red2fi => 0.75,
        LearnerKind::Red2pmf => {
            let k = cfg.learner_options.k_bound.unwrap_or_else(|| fx.graph.max_out_degree());
            1.0 - 1.0 / (4.0 * (k as f64 + 1.0))
        }
        _ => return None,
    };
    let mut prev = 1.0f64;
    let mut violations = 0usize;
    for r in &t.rounds {
        let w = r.total_weight?;
        let cap = if r.mistake { factor * prev } else { prev };
        if w > cap + 1e-12 * cap.abs() {
            violations += 1;
        }
        prev = w;
    }
    Some(Check::upper("weight-bookkeeping", CheckKind::Invariant, 0.0, violations as f64))
}

fn online_seed(cfg: &ExperimentConfig, prep: &Prepared, seed: u64) -> Result<(SeedOutcome, SeedArtifacts)> {
    let fx = &prep.fixture;
    let setting = cfg.setting();
    let mut source = build_source(cfg, fx, seed)?;
    let spec = RunSpec::new(setting, cfg.rounds)
        .with_rule(cfg.tie_break.clone())
        .with_regret(&fx.class);
    let mut out = SeedOutcome::empty(seed);
    let transcript = if cfg.learner == LearnerKind::MwAgnosticFi {
        let opts = AgnosticOptions {
            seed,
            max_experts: cfg.learner_options.max_experts,
            certify: cfg.learner_options.certify_budget,
            ..AgnosticOptions::default()
        };
        let mut hedge = agnostic_online_fi(&fx.class, &fx.graph, cfg.rounds, &opts)?;
        let t = run_online(&mut hedge, source.as_mut(), &spec)?;
        let best = t.best_loss.unwrap_or(0) as f64;
        let expected = hedge.expected_loss() - best;
        out.expected_regret = Some(expected);
        if cfg.assertions.ceilings {
            out.checks.push(Check::upper("hedge-regret", CheckKind::Regret, hedge.regret_bound(), expected));
        }
        t
    } else {
        let mut learner: Box<dyn StrategicLearner> =
            build_learner(cfg.learner, fx, setting, cfg.rounds, seed, &cfg.learner_options)?;
        run_online(&mut learner, source.as_mut(), &spec)?
    };
    let realizable = source.realizable();
    if cfg.assertions.ceilings && realizable {
        if let Some(ldim) = prep.ldim {
            if let Some((name, bound)) = ceiling_for(cfg, fx, ldim) {
                out.checks.push(Check::upper(name, CheckKind::Ceiling, bound as f64, transcript.mistakes as f64));
            }
        }
    }
    if cfg.assertions.floors {
        if let SourceSpec::Adversary { name } = &cfg.source {
            if let Some(floor) = floor_for(*name, &fx.kind) {
                if cfg.rounds >= floor {
                    out.checks.push(Check::lower(name.as_str(), floor as f64, transcript.mistakes as f64));
                }
            }
        }
    }
    if cfg.assertions.invariants {
        if let Some(c) = weight_check(cfg, fx, &transcript) {
            out.checks.push(c);
        }
        if realizable {
            out.checks.push(Check::upper(
                "realizable-regret",
                CheckKind::Invariant,
                0.0,
                transcript.best_loss.unwrap_or(0) as f64,
            ));
        }
    }
    out.mistakes = Some(transcript.mistakes);
    out.regret = transcript.regret();
    out.standard_errors = Some(
        transcript
            .rounds
            .iter()
            .zip(&transcript.hypotheses)
            .filter(|(r, h)| h.label(r.x) != r.y)
            .count(),
    );
    let digest = transcript.digest()?;
    out.digest = Some(digest.clone());
    let metadata = RunMetadata {
        fixture: fx.name(),
        learner: cfg.learner,
        setting,
        seed,
        rounds: cfg.rounds,
        source: transcript.source.clone(),
        tie_break: cfg.tie_break.clone(),
        mistakes: out.mistakes,
        regret: out.regret,
        digest: Some(digest),
        checks: out.checks.clone(),
    };
    Ok((
        out,
        SeedArtifacts { seed, transcript_csv: Some(transcript.to_csv()?), sample_csv: None, metadata },
    ))
}

fn standard_loss(h: &Hypothesis, dist: &AgentDistribution) -> Rational {
    let mut total = Rational::zero();
    for (a, p) in dist.support() {
        if h.label(a.x) != a.y {
            total += p;
        }
    }
    total
}

fn as_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn pac_seed(cfg: &ExperimentConfig, prep: &Prepared, seed: u64) -> Result<(SeedOutcome, SeedArtifacts)> {
    let fx = &prep.fixture;
    let exec = Exec::default();
    let (dist, _) = distribution(cfg, fx, seed)?;
    let star = &fx.graph;
    let mut out = SeedOutcome::empty(seed);
    let graphs = || -> Result<crate::graph::GraphClass> {
        fx.graphs
            .as_ref()
            .ok_or_else(|| invalid(format!("{} needs a fixture with a graph class", cfg.learner)))?
            .as_family()
            .materialize(1 << 16)
    };
    let sample = |t: usize| collect_pac_sample(star, &dist, t, Probe::AllButX, seed);
    let (hyp, graph_choice, obs): (Option<usize>, Option<ManipulationGraph>, Vec<LabeledObservation>) =
        match cfg.learner {
            LearnerKind::Erm => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let agents: Vec<Agent> = (0..cfg.rounds).map(|_| dist.sample(&mut rng)).collect();
                let (h, _) = erm_strategic(star, &fx.class, &agents, exec)?;
                let obs = agents.iter().map(|a| LabeledObservation { x: a.x, v: a.x, y: a.y }).collect();
                (Some(h), None, obs)
            }
            LearnerKind::UgRel => {
                let gc = graphs()?;
                let obs = sample(cfg.rounds)?;
                let pair = ug_realizable(&gc, &fx.class, &obs, exec)?;
                out.selected = Some(pair);
                (Some(pair.hypothesis), Some(gc.get(pair.graph).clone()), obs)
            }
            LearnerKind::UgAgn => {
                let gc = graphs()?;
                let k = cfg.learner_options.k_bound.unwrap_or_else(|| gc.declared_k()).max(1);
                let (t1, t2) = match (cfg.pac.t1, cfg.pac.t2) {
                    (Some(a), Some(b)) => (a, b),
                    _ => split_sizes(cfg.rounds, k),
                };
                let obs = sample(t1 + t2)?;
                let pair = ug_agnostic(&gc, &fx.class, &obs[..t1], &obs[t1..], k, exec)?;
                out.selected = Some(pair);
                (Some(pair.hypothesis), Some(gc.get(pair.graph).clone()), obs)
            }
            LearnerKind::Neighborlearn => {
                let gc = graphs()?;
                let obs = sample(cfg.rounds)?;
                let n = star.n();
                let clicks: Vec<Click> = obs
                    .iter()
                    .map(|o| Click {
                        x: o.x,
                        shown: (0..n).filter(|&v| v != o.x.index()).map(crate::graph::VertexId).collect(),
                        clicked: o.v,
                    })
                    .collect();
                let mode = match cfg.source.noise()? {
                    None => NeighborhoodMode::Realizable,
                    Some(_) => NeighborhoodMode::Agnostic {
                        k: cfg.learner_options.k_bound.unwrap_or_else(|| gc.declared_k()).max(1),
                    },
                };
                let g = learn_neighborhoods(&gc, &clicks, mode, exec)?;
                out.selected = Some(GraphHypothesisPair { graph: g, hypothesis: 0 });
                (None, Some(gc.get(g).clone()), obs)
            }
            other => return Err(invalid(format!("{other} is an online learner"))),
        };
    let loss = match hyp {
        Some(i) => {
            let h = fx.class.get(i);
            let l = population_strategic_loss(star, h, &dist, &TieBreakRule::LexMin)?;
            out.standard_loss = Some(standard_loss(h, &dist).to_string());
            if cfg.assertions.invariants {
                if let Some(g) = &graph_choice {
                    let nb = exact_neighborhood_loss(g, star, &dist)?;
                    let under_g = population_strategic_loss(g, h, &dist, &TieBreakRule::LexMin)?;
                    let slack = &nb + &under_g - &l;
                    out.checks.push(Check {
                        name: "decomposition".into(),
                        kind: CheckKind::Invariant,
                        bound: 0.0,
                        observed: as_f64(&slack),
                        passed: slack >= Rational::zero(),
                    });
                }
            }
            l
        }
        None => {
            let g = graph_choice.as_ref().expect("neighborhood learner selects a graph");
            exact_neighborhood_loss(g, star, &dist)?
        }
    };
    if let Some(max) = cfg.pac.max_loss {
        out.checks.push(Check::upper("max-loss", CheckKind::Loss, max, as_f64(&loss)));
    }
    out.loss = Some(loss.to_string());
    let csv = format_observations(&obs)?;
    let metadata = RunMetadata {
        fixture: fx.name(),
        learner: cfg.learner,
        setting: cfg.setting(),
        seed,
        rounds: cfg.rounds,
        source: cfg.source.label(),
        tie_break: TieBreakRule::UniformRandom { seed: crate::protocol::tie_seed(seed) },
        mistakes: None,
        regret: None,
        digest: None,
        checks: out.checks.clone(),
    };
    Ok((out, SeedArtifacts { seed, transcript_csv: None, sample_csv: Some(csv), metadata }))
}
