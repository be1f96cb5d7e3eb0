//! Library side of the `bandpip` command-line tool: configuration loading,
//! the `validate` / `evolve` / `pip` workflows, and CSV/JSON emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_evolve, cmd_pip, cmd_validate, with_threads, Status, ValidateReport};
pub use config::{load_config, ConventionChoice, OutputFormat, RunConfig};
pub use error::CliError;
