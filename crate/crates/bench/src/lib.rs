//! Seeded fixtures shared by the benchmarks.

use std::sync::Arc;

use fsindex_core::random::{seeded, BackgroundModel, SeededRng};
use fsindex_core::{Alphabet, CostTable, FragmentStore, FsIndex, PartitionScheme, QuasiMetric, ScoreMatrix};

pub const PARTITIONS: &str = "TSAN,ILVM,KR,DEQ,WFYH,GPC";

/// `n` uniform random fragments of length `m`.
pub fn store(n: usize, m: usize, seed: u64) -> Arc<FragmentStore> {
    let al = Alphabet::protein();
    let text: Vec<String> = BackgroundModel::uniform(20)
        .fragments(&mut seeded(seed), m, n)
        .iter()
        .map(|f| al.decode(f))
        .collect();
    Arc::new(FragmentStore::from_fragments(al, &text, m).expect("valid fragments"))
}

pub fn scheme(m: usize) -> PartitionScheme {
    PartitionScheme::parse(PARTITIONS, m, &Alphabet::protein()).expect("valid partitions")
}

pub fn index(n: usize, m: usize, seed: u64) -> FsIndex {
    FsIndex::build(store(n, m, seed), scheme(m)).expect("index builds")
}

pub fn blosum62() -> QuasiMetric {
    QuasiMetric::from_scores(&ScoreMatrix::blosum62()).expect("BLOSUM62 is a quasi-metric source")
}

/// Cost tables for `count` random BLOSUM62 fragment queries.
pub fn queries(q: &QuasiMetric, m: usize, count: usize, rng: &mut SeededRng) -> Vec<CostTable> {
    BackgroundModel::uniform(20)
        .fragments(rng, m, count)
        .iter()
        .map(|omega| CostTable::for_fragment(q, omega).expect("encoded query"))
        .collect()
}
