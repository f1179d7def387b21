//! Library half of the `catbbm` binary: configuration, subcommand
//! implementations, and output writers, kept callable so the test suites can
//! drive the harness in-process.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, CliError, CommandOutcome};
pub use config::{parse_grid, CommandKind, Config, OutputFormat};
