//! Command-line front end for `gifzs`: system configs, PGM images and the
//! `render`, `distance`, `approximate` and `verify` commands.

pub mod commands;
pub mod config;
pub mod pgm;

pub use commands::{CliError, CliResult};
pub use config::{ConfigError, GreySpec, SystemConfig};
pub use pgm::Pgm;
