//! Configuration, snapshot format, CSV export and mode dispatch for the
//! `ipm` command-line tool.

pub mod config;
pub mod dispatch;
pub mod error;
pub mod export;
pub mod snapshot;

pub use config::{parse_config, Mode, RunConfig};
pub use dispatch::{dispatch, Manifest, Outcome};
pub use error::{CliError, CliResult};
pub use snapshot::{load_snapshot, save_snapshot, SnapshotError, SnapshotMeta};
