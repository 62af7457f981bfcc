//! Command-line front end for the `kerrsense` library: sectioned TOML
//! configurations in, deterministic CSV/JSON out.
//!
//! The binary is thin: [`run`] parses arguments, loads and validates the
//! configuration, converts SI inputs to the internal dimensionless system,
//! dispatches to one subcommand and maps failures onto stable exit codes
//! (0 success, 2 configuration, 3 numerical, 4 not bistable, 5 unstable
//! branch).

pub mod cli;
pub mod commands;
pub mod config;
pub mod csvio;

pub use cli::{run, Cli, CliError, RunEnv};
