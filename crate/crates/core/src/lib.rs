//! Similarity search over fixed-length protein fragments.
//!
//! Score matrices are turned into quasi-metrics, fragments of a FASTA corpus
//! are grouped into bins by per-position alphabet reductions, and range, kNN
//! and PSSM queries are answered exactly by walking the implicit tree of
//! bins around the query. Supporting modules compute exact score
//! distributions, iterate PSSM profiles, and estimate distance exponents.

pub mod distexp;
pub mod error;
pub mod fsindex;
pub mod ingest;
pub mod profile;
pub mod random;
pub mod scoring;
pub mod search;
pub mod stats;

pub use error::{Error, Result};
pub use fsindex::{FsIndex, PartitionScheme};
pub use ingest::{FragmentRef, FragmentStore, SequenceRecord};
pub use scoring::{Alphabet, Pssm, QuasiMetric, ScoreMatrix};
pub use search::{CostTable, Hit, HitList, SearchMode, SearchStats};
