//! Batch evaluation, aggregation and report files for the `sceneeval` command.

pub mod config;
pub mod report;
pub mod run;

pub use config::{ConfigBuilder, ConfigError, JudgeMode, RunConfig};
pub use report::{aggregate, AggregateReport, AggregateRow};
pub use run::{run, RunError, RunOutcome};
