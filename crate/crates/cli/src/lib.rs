//! Scenario files, runners and output formats for the `photon` binary.

pub mod demo;
pub mod error;
pub mod format;
pub mod run;
pub mod scenario;

pub use error::{CliError, ConfigError};
pub use run::{run, Report};
pub use scenario::{parse_scenario, Kind, Scenario};
