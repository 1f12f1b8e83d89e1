//! Experiment orchestration for the zero-noise limit laboratory.

// `!(x > 0)` guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use experiments::{run, LabError, Outcome};
pub use report::{ExperimentReport, Metric, Threshold};
