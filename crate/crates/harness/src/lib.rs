//! Experiment runner for `dirikern-core`: JSON run configurations, the
//! six verification commands, and CSV / JSON / plot-data reports.

pub mod config;
pub mod error;
pub mod family;
pub mod report;
pub mod run;

pub use config::{parse_config, Command, RunConfig};
pub use error::{HarnessError, Result};
pub use report::{emit_reports, ReportRow};
pub use run::{run, RunOptions, RunOutput};
