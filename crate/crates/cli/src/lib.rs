//! File formats and subcommands of the `matreg` command-line tool.

pub mod commands;
pub mod formats;
