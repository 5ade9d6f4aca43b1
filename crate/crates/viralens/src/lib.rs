//! Infographic virality decision support.
//!
//! File formats, image decoding, the `viralens` command line and the HTTP
//! scoring service, built on the algorithms in `viralens-core`.

pub mod archive;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod imaging;
pub mod json;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod select;
pub mod service;
pub mod tokens;

pub use error::{Error, Result, Stage};
pub use viralens_core as core;
