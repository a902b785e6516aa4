//! Experiment harness around `rankscope-core`: key-value configs, seeded
//! dataset generation, training runs with certification reports, and the
//! file formats everything round-trips through (checkpoints, CSVs, IDX,
//! SVG charts).

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;

pub use error::{CliError, CliResult};
