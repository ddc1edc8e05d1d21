//! Configuration, execution and file formats for `onshell-core`.
//!
//! A run reads one TOML file ([`config::RunConfig`]), verifies the scenario
//! and writes `report.json`, `summary.csv` and `plotdata/*.csv`. All CSV
//! files start with a `schema_version` column.

pub mod config;
pub mod exec;
pub mod report;
pub mod run;

pub use config::{validate_config, ConfigErrors, RunConfig, Validated};
pub use exec::RayonExecutor;
pub use run::{export_structconst, run, RunOutcome};
