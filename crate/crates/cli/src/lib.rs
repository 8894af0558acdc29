//! Experiment harness for `krylov-sqrt`: configuration, experiment drivers,
//! CSV tables and SVG plots behind the `krylov-sqrt` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod plot;
pub mod problem;
pub mod table;

pub use config::{Config, Overrides};
pub use error::{CliError, CliResult};
pub use table::Table;
