//! The bin/frag/lcp index over alphabet-partition projections.

mod index;
mod partition;
mod persist;

pub use index::{BinSummary, FsIndex};
pub use partition::{PartitionScheme, MAX_BINS};
pub use persist::{decode, DetachedIndex, FORMAT_VERSION, MAGIC};
