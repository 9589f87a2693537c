//! Command-line front end: configuration, example runs and report files.

pub mod config;
pub mod report;
pub mod run;

pub use run::{run, Cli, Outcome};
