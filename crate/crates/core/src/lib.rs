//! Strategic classification on finite manipulation graphs.

pub mod constructions;
pub mod dims;
pub mod error;
pub mod exec;
pub mod graph;
pub mod harness;
pub mod online;
pub mod pac;
pub mod protocol;

pub use error::{Error, Result};
