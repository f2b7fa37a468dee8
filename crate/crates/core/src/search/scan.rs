use super::costs::CostTable;
use super::hits::{Hit, HitList, SearchMode, SearchStats};
use crate::error::{Error, Result};
use crate::ingest::FragmentStore;

/// Brute-force answer over every fragment of `store`.
pub fn sequential_scan(store: &FragmentStore, costs: &CostTable, mode: SearchMode) -> Result<HitList> {
    if costs.frag_len() != store.frag_len() {
        return Err(Error::LengthMismatch {
            expected: store.frag_len(),
            actual: costs.frag_len(),
        });
    }
    let n = store.len() as u64;
    let stats = SearchStats {
        nodes_visited: 0,
        bins_scanned: 0,
        fragments_scanned: n,
        residues_scanned: n * store.frag_len() as u64,
        distance_evaluations: n,
    };
    let all = store.fragments().iter().map(|&f| (f, costs.distance(store.codes(f))));
    let hits: Vec<(_, u64)> = match mode {
        SearchMode::Range(eps) => all.filter(|&(_, d)| d <= eps).collect(),
        SearchMode::Knn(0) => return Err(Error::InvalidArgument("k must be at least 1".into())),
        SearchMode::Knn(k) => {
            let all: Vec<_> = all.collect();
            let mut d: Vec<u64> = all.iter().map(|&(_, d)| d).collect();
            d.sort_unstable();
            match d.get(k - 1).or(d.last()) {
                Some(&rk) => all.into_iter().filter(|&(_, d)| d <= rk).collect(),
                None => Vec::new(),
            }
        }
    };
    let hits = hits.into_iter().map(|(fragment, distance)| Hit {
        fragment,
        distance,
        score: costs.score_of(distance),
    });
    Ok(HitList::new(hits.collect(), stats))
}
