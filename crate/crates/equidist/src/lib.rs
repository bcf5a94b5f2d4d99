//! Files and the command-line interface for `equidist-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod curve_file;
pub mod error;
pub mod output;

pub use error::CliError;
