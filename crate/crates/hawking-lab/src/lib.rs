//! Configuration, experiment drivers, reports and manifests for the `hawking-lab` CLI.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::RunConfig;
pub use error::RunError;
pub use experiments::{criteria, run, selftest_reports, Lab, EXPERIMENTS};
pub use report::{Check, Report, RunDir, Table};
