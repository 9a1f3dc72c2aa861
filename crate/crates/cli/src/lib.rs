//! Command-line front end: run configuration, subcommands and CSV export.

pub mod commands;
pub mod config;
pub mod export;
