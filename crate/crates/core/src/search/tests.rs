use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;

use super::*;
use crate::fsindex::PartitionScheme;
use crate::ingest::FragmentStore;
use crate::random::{seeded, BackgroundModel};
use crate::scoring::{Alphabet, ScoreMatrix};

const COARSE: &str = "TSAN,ILVM,KR,DEQ,WFYH,GPC";

fn random_index(n: usize, m: usize, spec: &str, seed: u64) -> FsIndex {
    let al = Alphabet::protein();
    let mut rng = seeded(seed);
    let texts: Vec<String> = BackgroundModel::uniform(20)
        .fragments(&mut rng, m, n)
        .iter()
        .map(|f| al.decode(f))
        .collect();
    let store = Arc::new(FragmentStore::from_fragments(al.clone(), &texts, m).unwrap());
    FsIndex::build(store, PartitionScheme::parse(spec, m, &al).unwrap()).unwrap()
}

fn index_of(letters: &[u8], frags: &[&str], spec: &str) -> FsIndex {
    let al = Alphabet::new(letters).unwrap();
    let m = frags[0].len();
    let store = Arc::new(FragmentStore::from_fragments(al.clone(), frags, m).unwrap());
    FsIndex::build(store, PartitionScheme::parse(spec, m, &al).unwrap()).unwrap()
}

fn b62() -> QuasiMetric {
    QuasiMetric::from_scores(&ScoreMatrix::blosum62()).unwrap()
}

fn hit_set(h: &HitList) -> BTreeSet<(crate::ingest::FragmentRef, u64)> {
    h.hits.iter().map(|h| (h.fragment, h.distance)).collect()
}

#[test]
fn full_radius_returns_everything_from_every_non_empty_bin() {
    let ix = random_index(300, 4, COARSE, 1);
    let omega = ix.store().codes(ix.frag()[0]).to_vec();
    let h = range_search(&ix, &b62(), &omega, u64::MAX / 2).unwrap();
    assert_eq!(h.len(), 300);
    assert_eq!(h.stats.bins_scanned, ix.summary().non_empty_bins);
    assert_eq!(h.stats.nodes_visited, ix.n_bins());
}

#[test]
fn zero_radius_hamming_finds_copies() {
    let ix = index_of(b"ABCDEF", &["ABCD", "ABCD", "ABCE", "FFFF", "ABCD"], "AB,CD,EF");
    let q = QuasiMetric::hamming(ix.scheme().alphabet().clone());
    let omega = ix.scheme().alphabet().encode(b"ABCD").unwrap();
    let h = range_search(&ix, &q, &omega, 0).unwrap();
    let recs: Vec<u32> = h.hits.iter().map(|h| h.fragment.record).collect();
    assert_eq!(recs, [0, 1, 4]);
}

#[test]
fn knn_keeps_every_tie() {
    let ix = index_of(b"ABCDEF", &["ABCD", "FFFF", "ABCD", "ABCE", "ABCD"], "AB,CD,EF");
    let q = QuasiMetric::hamming(ix.scheme().alphabet().clone());
    let omega = ix.scheme().alphabet().encode(b"ABCD").unwrap();
    let h = knn_search(&ix, &q, &omega, 1).unwrap();
    assert_eq!(h.len(), 3);
    assert!(h.hits.iter().all(|h| h.distance == 0));
    // Two nearest: the third copy is tied with the second.
    assert_eq!(knn_search(&ix, &q, &omega, 2).unwrap().len(), 3);
    assert_eq!(knn_search(&ix, &q, &omega, 4).unwrap().len(), 4);
}

#[test]
fn knn_beyond_dataset_size_returns_dataset() {
    let ix = random_index(40, 4, COARSE, 2);
    let omega = ix.store().codes(ix.frag()[7]).to_vec();
    assert_eq!(knn_search(&ix, &b62(), &omega, 1000).unwrap().len(), 40);
}

#[test]
fn tie_list_survives_eviction() {
    // Distances from AAAA: 1, 1, 2, 0 in insertion order of a single bin.
    let ix = index_of(b"AB", &["AAAB", "AABA", "ABBA", "AAAA"], "AB");
    let q = QuasiMetric::hamming(ix.scheme().alphabet().clone());
    let omega = [0u8; 4];
    let store = ix.store_arc().clone();
    for k in 1..=4 {
        let h = knn_search(&ix, &q, &omega, k).unwrap();
        let oracle = sequential_scan(
            &store,
            &CostTable::for_fragment(&q, &omega).unwrap(),
            SearchMode::Knn(k),
        )
        .unwrap();
        assert_eq!(hit_set(&h), hit_set(&oracle), "k = {k}");
    }
}

#[test]
fn matches_sequential_scan() {
    let ix = random_index(500, 6, COARSE, 3);
    let q = b62();
    let metric = q.associated_metric();
    let mut rng = seeded(4);
    let gen = BackgroundModel::uniform(20);
    for _ in 0..100 {
        let omega = gen.fragment(&mut rng, 6);
        for costs in [
            CostTable::for_fragment(&q, &omega).unwrap(),
            CostTable::for_fragment(&metric, &omega).unwrap(),
        ] {
            for mode in [SearchMode::Range(5), SearchMode::Range(10), SearchMode::Range(15)]
                .into_iter()
                .chain([1, 10, 50].map(SearchMode::Knn))
            {
                let a = search(&ix, &costs, mode).unwrap();
                let b = sequential_scan(ix.store(), &costs, mode).unwrap();
                assert_eq!(hit_set(&a), hit_set(&b), "{mode:?}");
                assert_eq!(a.hits, b.hits);
                assert!(a.stats.fragments_scanned >= a.len() as u64);
                assert!(a.stats.residues_scanned <= 6 * a.stats.fragments_scanned);
                assert!(a.access_overhead() >= 1.0);
            }
        }
    }
}

#[test]
fn knn_radius_is_kth_order_statistic() {
    let ix = random_index(400, 4, COARSE, 5);
    let q = b62();
    let mut rng = seeded(6);
    for _ in 0..30 {
        let omega = BackgroundModel::uniform(20).fragment(&mut rng, 4);
        let mut d: Vec<u64> = ix
            .store()
            .fragments()
            .iter()
            .map(|&f| q.fragment_distance_codes(&omega, ix.store().codes(f)))
            .collect();
        d.sort_unstable();
        for k in [1, 7, 25] {
            assert_eq!(knn_search(&ix, &q, &omega, k).unwrap().radius(), Some(d[k - 1]));
        }
    }
}

#[test]
fn pssm_from_matrix_rows_equals_fragment_query() {
    let ix = random_index(400, 5, COARSE, 7);
    let s = ScoreMatrix::blosum62();
    let q = b62();
    let mut rng = seeded(8);
    for _ in 0..20 {
        let omega = BackgroundModel::uniform(20).fragment(&mut rng, 5);
        let p = Pssm::from_matrix_rows(&s, &omega);
        let a = pssm_search(&ix, &p, SearchMode::Range(12)).unwrap();
        let b = range_search(&ix, &q, &omega, 12).unwrap();
        assert_eq!(hit_set(&a), hit_set(&b));
        for h in &a.hits {
            assert_eq!(h.score, Some(p.score_codes(ix.store().codes(h.fragment)).unwrap()));
        }
    }
}

#[test]
fn forced_letter_restricts_bins() {
    let ix = random_index(1000, 3, COARSE, 9);
    let al = Alphabet::protein();
    let w = al.code(b'W').unwrap();
    let mut rows = vec![vec![0; 20]; 3];
    rows[0] = vec![-1000; 20];
    rows[0][w as usize] = 0;
    let p = Pssm::from_rows(al.clone(), &rows).unwrap();
    let h = pssm_search(&ix, &p, SearchMode::Range(0)).unwrap();
    let scheme = ix.scheme();
    let expected = ix
        .store()
        .fragments()
        .iter()
        .filter(|&&f| ix.store().codes(f)[0] == w)
        .count();
    assert_eq!(h.len(), expected);
    let wfyh = scheme.project_letter(0, w);
    for h in &h.hits {
        assert_eq!(scheme.project_letter(0, ix.store().codes(h.fragment)[0]), wfyh);
    }
    assert!(h.stats.bins_scanned <= ix.n_bins() / 6);
}

#[test]
fn uniform_pssm_is_a_full_scan() {
    let ix = random_index(200, 4, COARSE, 10);
    let p = Pssm::from_rows(Alphabet::protein(), &vec![vec![3; 20]; 4]).unwrap();
    let h = pssm_search(&ix, &p, SearchMode::Range(0)).unwrap();
    assert_eq!(h.len(), 200);
    assert!(h.hits.iter().all(|h| h.distance == 0 && h.score == Some(12)));
    assert_eq!(h.stats.bins_scanned, ix.summary().non_empty_bins);
}

#[test]
fn empty_store_scans_to_nothing() {
    let al = Alphabet::protein();
    let store = FragmentStore::from_fragments(al.clone(), &["AC"], 4).unwrap();
    let omega = al.encode(b"ACDE").unwrap();
    let costs = CostTable::for_fragment(&b62(), &omega).unwrap();
    let h = sequential_scan(&store, &costs, SearchMode::Knn(3)).unwrap();
    assert!(h.is_empty());
    assert_eq!(h.stats.distance_evaluations, 0);
}

#[test]
fn scan_evaluates_every_fragment() {
    let ix = random_index(123, 4, COARSE, 11);
    let omega = ix.store().codes(ix.frag()[0]).to_vec();
    let costs = CostTable::for_fragment(&b62(), &omega).unwrap();
    let h = sequential_scan(ix.store(), &costs, SearchMode::Range(3)).unwrap();
    assert_eq!(h.stats.distance_evaluations, 123);
}

#[test]
fn lcp_reuse_counts() {
    let ix = index_of(b"AB", &["AAAA", "AAAB", "ABBB"], "AB");
    let costs = CostTable::for_fragment(&QuasiMetric::hamming(ix.scheme().alphabet().clone()), &[0; 4]).unwrap();
    let (hits, stats) = process_bin_hits(&ix, 0, &costs, 10).unwrap();
    assert_eq!(stats.residues_scanned, 4 + 1 + 3);
    assert_eq!(hits, [(0, 0), (1, 1), (2, 3)]);

    let dup = index_of(b"AB", &["ABAB", "ABAB", "ABAB"], "AB");
    let (hits, stats) = process_bin_hits(&dup, 0, &costs, 10).unwrap();
    assert_eq!(stats.residues_scanned, 4);
    assert_eq!(hits.len(), 3);

    let single = index_of(b"AB", &["ABAB"], "AB");
    assert_eq!(process_bin_hits(&single, 0, &costs, 10).unwrap().1.residues_scanned, 4);
}

#[test]
fn bin_scan_abandons_at_the_checkpoint() {
    // BBBA is abandoned once its distance over the prefix it shares with
    // BBBB exceeds the radius; BBBB then only needs its last letter.
    let ix = index_of(b"AB", &["BBBA", "BBBB", "BAAA"], "AB");
    let costs = CostTable::for_fragment(&QuasiMetric::hamming(ix.scheme().alphabet().clone()), &[0; 4]).unwrap();
    let (hits, stats) = process_bin_hits(&ix, 0, &costs, 2).unwrap();
    // Order: BAAA, BBBA, BBBB with lcp 0, 1, 3.
    assert_eq!(hits, [(0, 1)]);
    assert_eq!(stats.distance_evaluations, 2);
    assert_eq!(stats.residues_scanned, 4 + 2 + 1);
}

#[test]
fn bin_scan_matches_naive_distances() {
    let ix = random_index(3000, 6, "ACDEFGHIKLMNPQRSTVWY", 12);
    let ix2 = random_index(3000, 6, "TSANILVMKRDEQWFYHGPC", 12);
    let q = b62();
    let mut rng = seeded(13);
    for ix in [&ix, &ix2] {
        for _ in 0..50 {
            let omega = BackgroundModel::uniform(20).fragment(&mut rng, 6);
            let costs = CostTable::for_fragment(&q, &omega).unwrap();
            let eps = rng.random_range(0..60);
            let u = rng.random_range(0..ix.n_bins());
            let (hits, stats) = process_bin_hits(ix, u, &costs, eps).unwrap();
            let naive: Vec<(usize, u64)> = ix
                .bin_range(u)
                .map(|i| (i, costs.distance(ix.store().codes(ix.frag()[i]))))
                .filter(|&(_, d)| d <= eps)
                .collect();
            assert_eq!(hits, naive);
            assert!(stats.residues_scanned <= 6 * stats.fragments_scanned);
        }
    }
}

#[test]
fn traced_bounds_are_sound_and_complete() {
    let ix = random_index(600, 4, "TSAN,ILVM,KRDEQ,WFYHGPC", 14);
    let q = b62();
    let scheme = ix.scheme();
    let mut rng = seeded(15);
    for _ in 0..20 {
        let omega = BackgroundModel::uniform(20).fragment(&mut rng, 4);
        let costs = CostTable::for_fragment(&q, &omega).unwrap();
        let tables = DistanceTables::new(&ix, &costs);
        let eps = rng.random_range(0..25);
        let trace = trace_range_nodes(&ix, &costs, eps).unwrap();
        let visited: BTreeSet<u64> = trace.iter().map(|t| t.0).collect();
        assert_eq!(visited.len(), trace.len(), "a bin was visited twice");
        for &(u, bound) in &trace {
            let reduced = scheme.unrank(u);
            let exact: u64 = reduced
                .iter()
                .enumerate()
                .map(|(j, &s)| tables.bin_letter[j][s as usize] as u64)
                .sum();
            assert_eq!(bound, exact);
            for &f in ix.bin_entries(u) {
                assert!(bound <= costs.distance(ix.store().codes(f)));
            }
        }
        for u in 0..ix.n_bins() {
            let reduced = scheme.unrank(u);
            let lb: u64 = reduced
                .iter()
                .enumerate()
                .map(|(j, &s)| tables.bin_letter[j][s as usize] as u64)
                .sum();
            assert_eq!(lb <= eps, visited.contains(&u), "bin {u}");
        }
    }
}

#[test]
fn rejects_bad_queries() {
    let ix = random_index(20, 4, COARSE, 16);
    let q = b62();
    assert!(range_search(&ix, &q, &[0, 1, 2], 3).is_err());
    assert!(knn_search(&ix, &q, &[0, 1, 2, 3], 0).is_err());
    assert!(range_search(&ix, &q, &[0, 1, 2, 30], 3).is_err());
}
