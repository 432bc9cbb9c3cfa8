use crate::error::{invalid, Error};
use crate::graph::{ManipulationGraph, VertexId};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// What the learner sees in each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeedbackSetting {
    /// Graph known; x_t before h_t.
    #[serde(rename = "fi")]
    FullyInformative,
    /// Graph known; x_t (and v_t) after the round.
    #[serde(rename = "pmf-x")]
    PmfX,
    /// Graph known; only v_t after the round.
    #[serde(rename = "pmf-v")]
    PmfV,
    /// Graph unknown; x_t before h_t, v_t after.
    #[serde(rename = "ug")]
    UgXThenV,
    /// Graph unknown; (x_t, v_t) after the round.
    #[serde(rename = "ug-pair")]
    UgPairAfter,
}

impl FeedbackSetting {
    pub const ALL: [FeedbackSetting; 5] = [
        FeedbackSetting::FullyInformative,
        FeedbackSetting::PmfX,
        FeedbackSetting::PmfV,
        FeedbackSetting::UgXThenV,
        FeedbackSetting::UgPairAfter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeedbackSetting::FullyInformative => "fi",
            FeedbackSetting::PmfX => "pmf-x",
            FeedbackSetting::PmfV => "pmf-v",
            FeedbackSetting::UgXThenV => "ug",
            FeedbackSetting::UgPairAfter => "ug-pair",
        }
    }

    pub fn discloses_x_before(self) -> bool {
        matches!(self, FeedbackSetting::FullyInformative | FeedbackSetting::UgXThenV)
    }

    pub fn graph_known(self) -> bool {
        matches!(
            self,
            FeedbackSetting::FullyInformative | FeedbackSetting::PmfX | FeedbackSetting::PmfV
        )
    }
}

impl fmt::Display for FeedbackSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeedbackSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        FeedbackSetting::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown feedback setting {s:?}")))
    }
}

/// The end-of-round record delivered to the learner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feedback {
    pub x: Option<VertexId>,
    pub v: Option<VertexId>,
    pub yhat: bool,
    pub y: bool,
    /// N_{G⋆}(x_t), when the graph is known and x_t is disclosed.
    pub nx: Option<Vec<VertexId>>,
    /// N_{G⋆}(v_t), when the graph is known.
    pub nv: Option<Vec<VertexId>>,
}

impl Feedback {
    pub fn build(
        setting: FeedbackSetting,
        graph: &ManipulationGraph,
        x: VertexId,
        v: VertexId,
        yhat: bool,
        y: bool,
    ) -> Self {
        let nbrs = |u: VertexId| Some(graph.neighbors(u).to_vec());
        match setting {
            FeedbackSetting::FullyInformative | FeedbackSetting::PmfX => Feedback {
                x: Some(x),
                v: Some(v),
                yhat,
                y,
                nx: nbrs(x),
                nv: nbrs(v),
            },
            FeedbackSetting::PmfV => Feedback {
                x: None,
                v: Some(v),
                yhat,
                y,
                nx: None,
                nv: nbrs(v),
            },
            FeedbackSetting::UgXThenV | FeedbackSetting::UgPairAfter => Feedback {
                x: Some(x),
                v: Some(v),
                yhat,
                y,
                nx: None,
                nv: None,
            },
        }
    }

    pub fn mistake(&self) -> bool {
        self.yhat != self.y
    }
}
