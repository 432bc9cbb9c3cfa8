use crate::constructions::{Fixture, FixtureKind, GraphSet};
use crate::error::{invalid, Result};
use crate::graph::{parse_class, parse_graph, parse_graph_class, GraphClass, Rational, TieBreakRule};
use crate::online::{LearnerKind, LearnerOptions};
use crate::protocol::{AdversaryKind, FeedbackSetting};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// A named construction or a set of fixture files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FixtureSpec {
    Binrep { d: usize, k: usize },
    Star { d: usize, k: usize },
    UgPacLb { n: usize, i_star: usize },
    UgOnlineLb { n: usize },
    Chain { n: usize },
    Random { n: usize, k: usize, hypotheses: usize, seed: u64 },
    RandomUg { n: usize, k: usize, graphs: usize, hypotheses: usize, seed: u64 },
    /// G⋆ and H from files, with an optional graph-class file.
    Files {
        graph: PathBuf,
        class: PathBuf,
        #[serde(default)]
        graphs: Option<PathBuf>,
        #[serde(default)]
        target: Option<usize>,
    },
}

impl FixtureSpec {
    pub fn kind(&self) -> Option<FixtureKind> {
        Some(match *self {
            FixtureSpec::Binrep { d, k } => FixtureKind::Binrep { d, k },
            FixtureSpec::Star { d, k } => FixtureKind::Star { d, k },
            FixtureSpec::UgPacLb { n, i_star } => FixtureKind::UgPacLb { n, i_star },
            FixtureSpec::UgOnlineLb { n } => FixtureKind::UgOnlineLb { n },
            FixtureSpec::Chain { n } => FixtureKind::Chain { n },
            FixtureSpec::Random { n, k, hypotheses, seed } => FixtureKind::Random { n, k, hypotheses, seed },
            FixtureSpec::RandomUg { n, k, graphs, hypotheses, seed } => {
                FixtureKind::RandomUg { n, k, graphs, hypotheses, seed }
            }
            FixtureSpec::Files { .. } => return None,
        })
    }

    /// Whether the fixture carries a candidate graph class.
    pub fn has_graph_class(&self) -> bool {
        match self {
            FixtureSpec::UgPacLb { .. }
            | FixtureSpec::UgOnlineLb { .. }
            | FixtureSpec::Chain { .. }
            | FixtureSpec::RandomUg { .. } => true,
            FixtureSpec::Files { graphs, .. } => graphs.is_some(),
            _ => false,
        }
    }

    pub fn files(&self) -> Vec<&Path> {
        match self {
            FixtureSpec::Files { graph, class, graphs, .. } => {
                let mut v = vec![graph.as_path(), class.as_path()];
                v.extend(graphs.as_deref());
                v
            }
            _ => Vec::new(),
        }
    }

    pub fn build(&self) -> Result<Fixture> {
        if let Some(kind) = self.kind() {
            return kind.build();
        }
        let FixtureSpec::Files { graph, class, graphs, target } = self else {
            unreachable!("named specs return above")
        };
        let g = parse_graph(&std::fs::read_to_string(graph)?)?;
        let cls = parse_class(&std::fs::read_to_string(class)?)?;
        let mut fixture = Fixture::loaded(g, cls, *target)?;
        if let Some(path) = graphs {
            let members = parse_graph_class(&std::fs::read_to_string(path)?)?;
            let gc = GraphClass::new(members)?;
            fixture.graph_target = gc.members().iter().position(|m| *m == fixture.graph).map(|i| i as u128);
            fixture.graphs = Some(GraphSet::Explicit(gc));
            fixture.validate()?;
        }
        Ok(fixture)
    }
}

/// Where agents come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    /// i.i.d. from the fixture's seeded distribution; labels flipped with
    /// probability `noise` (a rational such as "1/10").
    Iid {
        #[serde(default)]
        noise: Option<String>,
    },
    Adversary { name: AdversaryKind },
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec::Iid { noise: None }
    }
}

impl SourceSpec {
    pub fn noise(&self) -> Result<Option<Rational>> {
        match self {
            SourceSpec::Iid { noise: Some(s) } => {
                let r: Rational = s
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("noise `{s}` is not a rational")))?;
                if r < Rational::from_integer(0.into()) || r > Rational::from_integer(1.into()) {
                    return Err(invalid("noise must lie in [0, 1]"));
                }
                Ok(Some(r).filter(|r| *r != Rational::from_integer(0.into())))
            }
            _ => Ok(None),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SourceSpec::Iid { noise: None } => "iid".into(),
            SourceSpec::Iid { noise: Some(n) } => format!("iid(noise={n})"),
            SourceSpec::Adversary { name } => name.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Online,
    Pac,
}

/// Sample sizes and loss target for batch learners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PacOptions {
    /// Graph-fitting sample size for the agnostic learner.
    pub t1: Option<usize>,
    /// Hypothesis-fitting sample size for the agnostic learner.
    pub t2: Option<usize>,
    /// Assert exact population strategic loss at most this.
    pub max_loss: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Assertions {
    pub ceilings: bool,
    pub floors: bool,
    pub invariants: bool,
}

impl Default for Assertions {
    fn default() -> Self {
        Self { ceilings: true, floors: true, invariants: true }
    }
}

/// Learner × setting sweep for `matrix`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    /// Empty means every online learner.
    pub learners: Vec<LearnerKind>,
    /// Empty means every setting.
    pub settings: Vec<FeedbackSetting>,
}

/// One experiment: fixture, learner, setting, source, seeds and outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub fixture: FixtureSpec,
    pub learner: LearnerKind,
    #[serde(default)]
    pub learner_options: LearnerOptions,
    /// Defaults to the learner's natural setting.
    #[serde(default)]
    pub setting: Option<FeedbackSetting>,
    /// Defaults to the learner's mode.
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub source: SourceSpec,
    /// Rounds (online) or sample size (PAC).
    pub rounds: usize,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub tie_break: TieBreakRule,
    #[serde(default)]
    pub pac: PacOptions,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub assertions: Assertions,
    #[serde(default)]
    pub grid: Option<Grid>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn setting(&self) -> FeedbackSetting {
        self.setting.unwrap_or_else(|| self.learner.default_setting())
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(if self.learner.is_pac() { Mode::Pac } else { Mode::Online })
    }

    /// Everything checkable before any run starts.
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(invalid("config needs at least one seed"));
        }
        if self.rounds == 0 {
            return Err(invalid("rounds must be positive"));
        }
        for f in self.fixture.files() {
            if !f.exists() {
                return Err(invalid(format!("fixture file {} does not exist", f.display())));
            }
        }
        let mode = self.mode();
        if (mode == Mode::Pac) != self.learner.is_pac() {
            return Err(invalid(format!("learner {} does not run in {mode:?} mode", self.learner)));
        }
        let setting = self.setting();
        if !self.learner.supports(setting) {
            return Err(invalid(format!("learner {} does not run under setting {setting}", self.learner)));
        }
        let needs_graphs = matches!(
            self.learner,
            LearnerKind::UgOnline | LearnerKind::UgRel | LearnerKind::UgAgn | LearnerKind::Neighborlearn
        );
        if needs_graphs && !self.fixture.has_graph_class() {
            return Err(invalid(format!("learner {} needs a fixture with a graph class", self.learner)));
        }
        if let SourceSpec::Adversary { name } = &self.source {
            if mode == Mode::Pac {
                return Err(invalid("PAC runs draw i.i.d. samples, not adversarial ones"));
            }
            if !name.compatible(setting) {
                return Err(invalid(format!("adversary {name} cannot play under setting {setting}")));
            }
        }
        self.source.noise()?;
        Ok(())
    }
}
