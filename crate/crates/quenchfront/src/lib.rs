//! Command-line companion to `quenchfront-core`: run configuration, versioned CSV output,
//! the `quenchfront` subcommands and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod csvio;

pub use config::RunConfig;
pub use csvio::Table;
