//! Command-line front end for the `modechoice` toolkit: TOML run
//! configuration, artifact writing and the subcommands behind the
//! `modechoice` binary.

pub mod artifacts;
pub mod commands;
pub mod config;

pub use config::{ConfigError, RunConfig};
