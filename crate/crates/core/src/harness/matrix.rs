use super::config::ExperimentConfig;
use super::run::{run_prepared, CheckKind, Prepared, SeedOutcome};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::online::LearnerKind;
use crate::protocol::FeedbackSetting;
use serde::{Deserialize, Serialize};

/// One (learner, setting, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub learner: LearnerKind,
    pub setting: FeedbackSetting,
    pub seed: u64,
    pub mistakes: Option<usize>,
    pub standard_errors: Option<usize>,
    pub regret: Option<i64>,
    pub loss: Option<String>,
    pub standard_loss: Option<String>,
    pub ceiling: Option<f64>,
    pub floor: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
}

impl MatrixRow {
    fn new(learner: LearnerKind, setting: FeedbackSetting, o: &SeedOutcome) -> Self {
        let bound = |kind| o.checks.iter().find(|c| c.kind == kind).map(|c| c.bound);
        Self {
            learner,
            setting,
            seed: o.seed,
            mistakes: o.mistakes,
            standard_errors: o.standard_errors,
            regret: o.regret,
            loss: o.loss.clone(),
            standard_loss: o.standard_loss.clone(),
            ceiling: bound(CheckKind::Ceiling).or(bound(CheckKind::Regret)),
            floor: bound(CheckKind::Floor),
            passed: o.passed(),
            error: o.error.clone().or_else(|| {
                let f = o.failures();
                (!f.is_empty()).then(|| f.join("; "))
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixResult {
    pub rows: Vec<MatrixRow>,
    /// Cells dropped as incompatible, with the reason.
    pub skipped: Vec<String>,
    pub passed: bool,
}

impl MatrixResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Sweep the grid; cells run in parallel and merge in grid order.
pub fn cmd_matrix(cfg: &ExperimentConfig) -> Result<MatrixResult> {
    let grid = cfg.grid.clone().unwrap_or_default();
    let learners: Vec<LearnerKind> = if grid.learners.is_empty() {
        LearnerKind::ALL.into_iter().filter(|k| k.is_online()).collect()
    } else {
        grid.learners
    };
    let settings = if grid.settings.is_empty() { FeedbackSetting::ALL.to_vec() } else { grid.settings };
    let mut cells = Vec::new();
    let mut skipped = Vec::new();
    for &learner in &learners {
        for &setting in &settings {
            let mut c = cfg.clone();
            c.learner = learner;
            c.setting = Some(setting);
            c.mode = None;
            c.grid = None;
            match c.validate() {
                Ok(()) => cells.push(c),
                Err(e) => skipped.push(format!("{learner}/{setting}: {e}")),
            }
        }
    }
    if cells.is_empty() {
        return Err(invalid("no compatible learner/setting cell in the grid"));
    }
    let prepared = cells.iter().map(Prepared::new).collect::<Result<Vec<_>>>()?;
    let results = Exec::default().map(cells.len(), |i| {
        run_prepared(&cells[i], &prepared[i], Exec::Sequential).0
    });
    let rows: Vec<MatrixRow> = results
        .iter()
        .flat_map(|s| s.outcomes.iter().map(move |o| MatrixRow::new(s.learner, s.setting, o)))
        .collect();
    Ok(MatrixResult { passed: rows.iter().all(|r| r.passed), rows, skipped })
}
