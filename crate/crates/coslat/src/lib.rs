//! Std companion to `coslat-core`: file formats, a weight-table cache,
//! rayon drivers and the experiment runners behind the `coslat` binary.

pub mod cache;
pub mod config;
pub mod experiments;
pub mod files;
pub mod parallel;
pub mod report;

mod error;

pub use error::{Error, Result};
