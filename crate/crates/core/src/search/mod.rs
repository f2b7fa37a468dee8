//! Exact range, kNN and PSSM queries over an [`FsIndex`], and the
//! sequential scan they are checked against.

mod costs;
mod hits;
mod scan;
mod traverse;

pub use costs::CostTable;
pub use hits::{Hit, HitList, SearchMode, SearchStats};
pub use scan::sequential_scan;
pub use traverse::{process_bin_hits, search, trace_range_nodes, DistanceTables};

use crate::error::Result;
use crate::fsindex::FsIndex;
use crate::scoring::{Pssm, QuasiMetric};

/// Closed-ball query `{x : d(omega, x) <= eps}` for an encoded centre.
pub fn range_search(ix: &FsIndex, q: &QuasiMetric, omega: &[u8], eps: u64) -> Result<HitList> {
    search(ix, &CostTable::for_fragment(q, omega)?, SearchMode::Range(eps))
}

/// The `k` nearest fragments to `omega` and every fragment tied with the k-th.
pub fn knn_search(ix: &FsIndex, q: &QuasiMetric, omega: &[u8], k: usize) -> Result<HitList> {
    search(ix, &CostTable::for_fragment(q, omega)?, SearchMode::Knn(k))
}

/// Search by PSSM valuation; hit scores are raw PSSM scores.
pub fn pssm_search(ix: &FsIndex, p: &Pssm, mode: SearchMode) -> Result<HitList> {
    search(ix, &CostTable::for_pssm(p), mode)
}

#[cfg(test)]
mod tests;
