//! Experiment harness for `kmrate-core`: TOML experiment files, CSV traces,
//! and the comparison table. The `kmrate` binary is a thin layer over this
//! library.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod spaces;
pub mod table;

pub use config::{parse_config, ExperimentConfig};
pub use error::{ConfigError, HarnessError, SchemaError};
pub use experiment::{run_checks, run_experiment, CheckReport, ExperimentReport, Validity};
pub use table::{comparison_table, TableParams, TableRow};
