//! Declarative jobs over the engine: config parsing, dispatch, reports
//! and batch runs.

pub mod batch;
pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, parse_job, Diagnostic, JobConfig, JobKind};
pub use report::{render_table, Report, SCHEMA};
pub use run::{run_job, JobError};
