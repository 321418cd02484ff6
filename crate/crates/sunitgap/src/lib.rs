//! IO, configuration and parallel drivers around `sunitgap-core`.

pub mod cache;
pub mod config;
pub mod dataset_io;
mod error;
pub mod parallel;
pub mod report;

pub use error::{AppError, AppResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
