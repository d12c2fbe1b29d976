//! Batch front end for `tns-core`: configuration, snapshots and the subcommands behind the `tns` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod snapshot;
pub mod tensor_spec;

pub use commands::constants::cmd_constants;
pub use commands::heat::cmd_heat;
pub use commands::run::{cmd_run, RunOutcome, CSV_HEADER};
pub use commands::threshold::cmd_threshold;
pub use commands::verify::{cmd_verify, Suite, VerifyOptions, VerifyReport};
pub use config::{parse_config, parse_config_with_overrides, RunConfig};
pub use error::{CliError, Result};
pub use snapshot::{load_snapshot, save_snapshot};
