use crate::error::Result;
use crate::graph::{Agent, Hypothesis, ManipulationGraph, VertexId};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::time::Duration;

/// One protocol round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: usize,
    pub x: VertexId,
    pub v: VertexId,
    pub yhat: bool,
    pub y: bool,
    pub mistake: bool,
    pub experts: Option<usize>,
    pub total_weight: Option<f64>,
    pub h_digest: String,
    pub h_positive: usize,
}

#[derive(Debug, Serialize)]
struct CsvRow {
    t: usize,
    x: usize,
    v: usize,
    yhat: u8,
    y: u8,
    mistake: u8,
    experts: Option<usize>,
    total_weight: Option<f64>,
}

/// A finished run. Hypotheses are kept in memory for replay checks; files
/// only carry their digests.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub learner: String,
    pub source: String,
    pub rounds: Vec<RoundRecord>,
    pub hypotheses: Vec<Hypothesis>,
    pub mistakes: usize,
    pub best_loss: Option<usize>,
    pub final_graph: ManipulationGraph,
    pub target: Option<Hypothesis>,
    pub survivors: Option<usize>,
    pub wall_time: Duration,
}

impl Transcript {
    pub fn agents(&self) -> Vec<Agent> {
        self.rounds.iter().map(|r| Agent { x: r.x, y: r.y }).collect()
    }

    /// Mistakes minus the best fixed hypothesis in hindsight.
    pub fn regret(&self) -> Option<i64> {
        self.best_loss.map(|b| self.mistakes as i64 - b as i64)
    }

    /// Columns t,x,v,yhat,y,mistake,experts,total_weight.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rounds {
            w.serialize(CsvRow {
                t: r.t,
                x: r.x.index(),
                v: r.v.index(),
                yhat: r.yhat as u8,
                y: r.y as u8,
                mistake: r.mistake as u8,
                experts: r.experts,
                total_weight: r.total_weight,
            })?;
        }
        if self.rounds.is_empty() {
            w.write_record(["t", "x", "v", "yhat", "y", "mistake", "experts", "total_weight"])?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Digest of the CSV plus the per-round hypothesis digests.
    pub fn digest(&self) -> Result<String> {
        let mut hasher = Sha256::new();
        hasher.update(self.to_csv()?.as_bytes());
        for r in &self.rounds {
            hasher.update(r.h_digest.as_bytes());
        }
        let out = hasher.finalize();
        Ok(out.iter().take(16).map(|b| format!("{b:02x}")).collect())
    }
}

/// Parse a transcript CSV back into (t, x, v, yhat, y, mistake) rows.
pub fn parse_transcript_csv(text: &str) -> Result<Vec<(usize, usize, usize, bool, bool, bool)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<usize> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| crate::Error::Parse {
                    line: out.len() + 2,
                    msg: format!("bad field {i}"),
                })
        };
        out.push((num(0)?, num(1)?, num(2)?, num(3)? == 1, num(4)? == 1, num(5)? == 1));
    }
    Ok(out)
}
