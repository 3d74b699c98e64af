//! Command-line experiments on top of `berryphase`: TOML-configured loop
//! phase runs, parameter sweeps, connection/curvature tables and a built-in
//! validation suite.

pub mod config;
pub mod error;
pub mod expr;
pub mod output;
pub mod run;
pub mod tables;
pub mod validate;

pub use config::{Angle, ExperimentConfig, LoopSpec, Method, OutputFormat};
pub use error::CliError;
pub use expr::parse_angle;
pub use run::{
    closed_form_reference, run_experiment, run_experiment_with, sweep, sweep_with, ResultRecord, RunOptions,
};
