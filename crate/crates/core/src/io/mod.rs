//! Files on disk: snapshots, CSV tables, JSON configuration and run manifests.

pub mod config;
pub mod manifest;
pub mod report;
pub mod snapshot;

pub use config::Config;
pub use manifest::{content_hash, Manifest, OutDirLock};
pub use report::{read_report_csv, write_report_csv, Table};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotError};
