//! Config parsing, output writers and subcommands behind the `tunnelopt` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
