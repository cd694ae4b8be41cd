//! Sequence similarity through the Burrows-Wheeler transform.
//!
//! The crate computes BWT and EBWT distances, the BWMD embedding (a
//! square-root scaled Markov transition vector of the BWT, whose Euclidean
//! distance is the Hellinger distance), and the LZJD baseline. On top of
//! those sit hierarchical and k-means clustering, exact and approximate
//! nearest-neighbor search, evaluation metrics and corpus ingestion.

pub mod bwt;
pub mod cache;
pub mod cluster;
pub mod corpus;
pub mod ebwt;
pub mod embed;
pub mod error;
pub mod eval;
pub mod exec;
pub mod experiments;
pub mod fmt;
pub mod knn;
pub mod lzjd;
pub mod metric;
pub mod sequence;

pub use bwt::{bwt, bwt_oracle, BwtOutput};
pub use ebwt::{ebwt_distance, ebwt_distance_normalized, ebwt_merge, MergeTrace, Source};
pub use embed::{bwmd_distance, embed, hellinger, BwmdEmbedding};
pub use error::{Error, Result};
pub use exec::Execution;
pub use lzjd::{lz_set, lzjd_distance, LzSet};
pub use sequence::{Alphabet, Sequence};
