//! Nonresponse bias analysis for surveys: data loading, configuration,
//! the ten-step analysis pipeline and report export.
//!
//! The numerics live in [`nrba_core`]; this crate adds file formats and
//! orchestration.

pub mod config;
pub mod error;
pub mod export;
pub mod io;
pub mod pipeline;

pub use config::NrbaConfig;
pub use error::{NrbaError, Result};
pub use pipeline::{run_patterns, run_pipeline, NrbaReport};
