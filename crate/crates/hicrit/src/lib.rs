//! File formats, caches and the command-line front end for `hicrit-core`.

pub mod cache;
pub mod cli;
mod error;
pub mod format;
pub mod ingest;
pub mod manifest;
pub mod model;

pub use error::{Error, Result};
