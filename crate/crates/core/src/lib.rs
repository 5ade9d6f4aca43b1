//! Allocation-only algorithms behind the viralens infographic pipeline.
//!
//! Everything here is pure computation over in-memory values: pixel
//! clustering into visual words, doc-term assembly, truncated SVD,
//! collapsed Gibbs LDA, cluster statistics with pooled t-tests, and the
//! scoring math used by the decision support layer. Decoding images,
//! reading manifests and persisting archives live in the `viralens` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod color;
pub mod corpus;
pub mod dss;
pub mod error;
pub mod kmeans;
pub mod lda;
pub mod linalg;
pub mod rng;
pub mod special;
pub mod text;
pub mod vision;

pub use error::{Error, Result};
