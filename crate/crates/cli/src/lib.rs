//! Experiment pipelines for `tracelab`: JSON configs in, CSV tables and
//! hashed manifests out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind, Tolerances};
pub use error::{CliError, CliResult};
