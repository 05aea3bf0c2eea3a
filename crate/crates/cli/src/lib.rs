//! Scenario runner: TOML configs in, CSV tables and a JSON manifest out.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod scenarios;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use output::Report;
