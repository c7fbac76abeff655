//! Scenario files, CSV output and the built-in scenario catalog for
//! `weakval-core`.
// guards written as `!(x > bound)` also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

pub use catalog::{builtin_config, list_builtin, BUILTINS};
pub use config::{parse_scenario, Kind, ScenarioConfig};
pub use error::CliError;
pub use run::{render_scenario, run_scenario, Rendered, RunOptions};
