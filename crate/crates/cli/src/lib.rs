//! Command-line front end: problem documents, traces and the commands of the
//! `bilinear` binary.

pub mod app;
pub mod document;

pub use app::{run, Cli, CliError};
