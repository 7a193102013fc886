//! Reproducible experiment runs (JSON config in, CSV out) and the claim suite.

pub mod config;
pub mod record;
pub mod run;
pub mod suite;

pub use config::{ExperimentConfig, ExperimentKind};
pub use record::{MetricRow, ResultRecord};
pub use run::run;
pub use suite::{run_suite, ClaimReport, SuiteOptions};
