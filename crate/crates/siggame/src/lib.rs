//! Command-line front end for `siggame-core`: TOML configuration, report
//! rendering (human tables, CSV, JSON) and a rayon runner for the seeded
//! simulator.

#![forbid(unsafe_code)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod parallel;
pub mod report;

pub use cli::Cli;
pub use commands::{execute, run, Outcome};
pub use error::CliError;
pub use format::{render, Format};
pub use report::RunReport;
