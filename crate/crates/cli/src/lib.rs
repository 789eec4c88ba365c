//! Library side of the `ascene` command-line tool.

pub mod commands;
pub mod config;
mod error;

pub use config::PipelineConfig;
pub use error::CliError;
