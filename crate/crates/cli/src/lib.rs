//! Command-line front end for `stokes-mle`: counts-file I/O, the estimate
//! report, and the subcommands behind the `stokes-mle` binary.

pub mod cli;
pub mod commands;
pub mod counts_file;
pub mod error;
pub mod report;

pub use error::CliError;
