//! Experiment driver behind the command-line tool.

mod commands;
mod config;
mod matrix;
mod run;

pub use commands::{
    cmd_construct, cmd_dims, cmd_learn_graph, DimsReport, LearnGraphReport, Manifest,
    WRITE_GRAPH_CLASS_LIMIT,
};
pub use config::{Assertions, ExperimentConfig, FixtureSpec, Grid, Mode, PacOptions, SourceSpec};
pub use matrix::{cmd_matrix, MatrixResult, MatrixRow};
pub use run::{
    cmd_run, write_outputs, Check, CheckKind, Prepared, RunMetadata, RunSummary, SeedArtifacts,
    SeedOutcome,
};
