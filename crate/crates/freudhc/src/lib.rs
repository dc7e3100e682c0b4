//! Experiment harness for `freudhc-core`: JSON configs, the function
//! corpus, CSV/JSON artifacts, the `freudhc` command line and the
//! acceptance suite.

pub mod acceptance;
pub mod cache;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod output;

pub use error::{HarnessError, Result};
