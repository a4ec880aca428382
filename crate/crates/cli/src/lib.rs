//! Scenario files, sweeps and report writers behind the `pairanneal`
//! command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod sweep;

pub use config::Scenario;
pub use error::{CliError, Result};
