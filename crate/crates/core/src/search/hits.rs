use serde::Serialize;

use crate::ingest::FragmentRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Closed ball: every fragment at distance `<= epsilon`.
    Range(u64),
    /// The `k` nearest fragments plus every fragment tied with the k-th.
    Knn(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Tree nodes visited, empty bins included.
    pub nodes_visited: u64,
    /// Non-empty bins scanned.
    pub bins_scanned: u64,
    pub fragments_scanned: u64,
    /// Residues whose letter cost was looked up.
    pub residues_scanned: u64,
    /// Fragments whose full distance was computed.
    pub distance_evaluations: u64,
}

impl SearchStats {
    pub fn add(&mut self, other: &SearchStats) {
        self.nodes_visited += other.nodes_visited;
        self.bins_scanned += other.bins_scanned;
        self.fragments_scanned += other.fragments_scanned;
        self.residues_scanned += other.residues_scanned;
        self.distance_evaluations += other.distance_evaluations;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hit {
    pub fragment: FragmentRef,
    pub distance: u64,
    pub score: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitList {
    /// Sorted by (distance, record, offset).
    pub hits: Vec<Hit>,
    pub stats: SearchStats,
}

impl HitList {
    pub(crate) fn new(mut hits: Vec<Hit>, stats: SearchStats) -> Self {
        hits.sort_by_key(|h| (h.distance, h.fragment));
        HitList { hits, stats }
    }

    pub fn len(&self) -> usize {
        self.hits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }

    /// Largest hit distance; for kNN results this is the k-th distance.
    pub fn radius(&self) -> Option<u64> {
        self.hits.last().map(|h| h.distance)
    }

    pub fn fragments(&self) -> Vec<FragmentRef> {
        let mut v: Vec<FragmentRef> = self.hits.iter().map(|h| h.fragment).collect();
        v.sort();
        v
    }

    /// Fragments scanned per hit returned. A query that scans nothing and
    /// returns nothing has overhead 1.
    pub fn access_overhead(&self) -> f64 {
        self.stats.fragments_scanned.max(1) as f64 / self.hits.len().max(1) as f64
    }
}
