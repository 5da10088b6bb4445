//! Command-line front end for `meanswitch-core`: argument parsing, matrix
//! and measure file formats, and canonical JSON reports.

pub mod canonical;
pub mod cli;
mod error;
pub mod formats;
pub mod report;

pub use error::{CliError, CliResult};
