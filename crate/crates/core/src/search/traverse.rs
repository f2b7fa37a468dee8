use std::collections::BinaryHeap;

use super::costs::CostTable;
use super::hits::{Hit, HitList, SearchMode, SearchStats};
use crate::error::{Error, Result};
use crate::fsindex::FsIndex;

/// Lookup tables derived from a query before traversal.
#[derive(Debug, Clone)]
pub struct DistanceTables {
    /// Reduced letter of the query's home bin, per position.
    pub home: Vec<u8>,
    pub home_rank: u64,
    /// `bin_letter[j][sigma]`: least cost of any letter in group `sigma`.
    pub bin_letter: Vec<Vec<u32>>,
    /// Least `bin_letter[j][sigma]` over foreign groups; `None` when the
    /// position has a single group.
    pub min_other: Vec<Option<u32>>,
}

impl DistanceTables {
    pub fn new(ix: &FsIndex, costs: &CostTable) -> Self {
        let scheme = ix.scheme();
        let m = scheme.frag_len();
        let home_letters = costs.home_letters();
        let mut home = Vec::with_capacity(m);
        let mut bin_letter = Vec::with_capacity(m);
        let mut min_other = Vec::with_capacity(m);
        for j in 0..m {
            let mut per_group = vec![u32::MAX; scheme.sizes()[j]];
            for (a, &c) in costs.row(j).iter().enumerate() {
                let g = scheme.project_letter(j, a as u8) as usize;
                per_group[g] = per_group[g].min(c);
            }
            let h = scheme.project_letter(j, home_letters[j]);
            min_other.push(
                per_group
                    .iter()
                    .enumerate()
                    .filter(|&(g, _)| g != h as usize)
                    .map(|(_, &c)| c)
                    .min(),
            );
            home.push(h);
            bin_letter.push(per_group);
        }
        let home_rank = home.iter().enumerate().map(|(j, &h)| scheme.xi(j, h)).sum();
        DistanceTables {
            home,
            home_rank,
            bin_letter,
            min_other,
        }
    }
}

/// Receives hits from the bin scan and supplies the current radius.
trait HitSink {
    fn radius(&self) -> u64;
    fn insert(&mut self, entry: usize, dist: u64);
}

struct RangeSink {
    eps: u64,
    hits: Vec<(usize, u64)>,
}

impl HitSink for RangeSink {
    fn radius(&self) -> u64 {
        self.eps
    }

    fn insert(&mut self, entry: usize, dist: u64) {
        self.hits.push((entry, dist));
    }
}

/// Branch-and-bound state: a max-heap of the best `k` plus the list of
/// extra hits tied with the current k-th distance.
struct KnnSink {
    k: usize,
    eps: u64,
    heap: BinaryHeap<(u64, usize)>,
    ties: Vec<(usize, u64)>,
}

impl HitSink for KnnSink {
    fn radius(&self) -> u64 {
        self.eps
    }

    fn insert(&mut self, entry: usize, dist: u64) {
        if self.heap.len() < self.k {
            self.heap.push((dist, entry));
            if self.heap.len() == self.k {
                self.eps = self.heap.peek().unwrap().0;
            }
        } else if dist < self.eps {
            let (d1, e1) = self.heap.pop().unwrap();
            self.heap.push((dist, entry));
            let d2 = self.heap.peek().unwrap().0;
            self.eps = d2;
            if d1 == d2 {
                // The evicted entry is still tied with the new farthest hit.
                self.ties.push((e1, d1));
            } else {
                self.ties.clear();
            }
        } else {
            // Only fragments within the radius reach the sink, so dist == eps.
            self.ties.push((entry, dist));
        }
    }
}

/// One traversal: cumulative distances and counters are owned per search.
struct Traversal<'a> {
    ix: &'a FsIndex,
    costs: &'a CostTable,
    tables: DistanceTables,
    cd: Vec<u64>,
    stats: SearchStats,
    trace: Option<Vec<(u64, u64)>>,
}

impl<'a> Traversal<'a> {
    fn new(ix: &'a FsIndex, costs: &'a CostTable) -> Self {
        Traversal {
            ix,
            costs,
            tables: DistanceTables::new(ix, costs),
            cd: vec![0; ix.frag_len() + 1],
            stats: SearchStats::default(),
            trace: None,
        }
    }

    fn run<S: HitSink>(&mut self, sink: &mut S) {
        let u = self.tables.home_rank;
        self.node(u, 0, sink);
        self.check_node(u, 0, 0, sink);
    }

    #[inline]
    fn node<S: HitSink>(&mut self, u: u64, bound: u64, sink: &mut S) {
        self.stats.nodes_visited += 1;
        if let Some(t) = self.trace.as_mut() {
            t.push((u, bound));
        }
        process_bin(self.ix, u, self.costs, &mut self.cd, &mut self.stats, sink);
    }

    /// Visits the children of node `u` (bound `d`) that replace the home
    /// letter at a position `>= depth`, deepest position first.
    fn check_node<S: HitSink>(&mut self, u: u64, d: u64, depth: usize, sink: &mut S) {
        let scheme = self.ix.scheme();
        for j in (depth..scheme.frag_len()).rev() {
            let Some(min_other) = self.tables.min_other[j] else {
                continue;
            };
            if d + min_other as u64 > sink.radius() {
                continue;
            }
            let home = self.tables.home[j];
            let base = u - scheme.xi(j, home);
            for sigma in 0..scheme.sizes()[j] as u8 {
                if sigma == home {
                    continue;
                }
                let e = d + self.tables.bin_letter[j][sigma as usize] as u64;
                if e <= sink.radius() {
                    let v = base + scheme.xi(j, sigma);
                    self.node(v, e, sink);
                    self.check_node(v, e, j + 1, sink);
                }
            }
        }
    }
}

/// Scans bin `u`, reusing the cumulative distances of the common prefix with
/// the previous entry. A fragment is abandoned when its distance up to the
/// prefix it shares with the next entry already exceeds the radius.
fn process_bin<S: HitSink>(
    ix: &FsIndex,
    u: u64,
    costs: &CostTable,
    cd: &mut [u64],
    stats: &mut SearchStats,
    sink: &mut S,
) {
    let range = ix.bin_range(u);
    if range.is_empty() {
        return;
    }
    stats.bins_scanned += 1;
    let m = ix.frag_len();
    let store = ix.store();
    let frag = ix.frag();
    let lcp = ix.lcp();
    // cd[0..=valid] holds prefix distances of the current fragment.
    let mut valid = 0usize;
    for i in range.clone() {
        let s = store.codes(frag[i]);
        let next = if i + 1 < range.end { lcp[i + 1] as usize } else { 0 };
        valid = valid.min(lcp[i] as usize);
        stats.fragments_scanned += 1;
        for j in valid..next {
            cd[j + 1] = cd[j] + costs.cost(j, s[j]) as u64;
        }
        if valid < next {
            stats.residues_scanned += (next - valid) as u64;
            valid = next;
        }
        if cd[next] <= sink.radius() {
            for j in valid..m {
                cd[j + 1] = cd[j] + costs.cost(j, s[j]) as u64;
            }
            stats.residues_scanned += (m - valid) as u64;
            valid = m;
            stats.distance_evaluations += 1;
            if cd[m] <= sink.radius() {
                sink.insert(i, cd[m]);
            }
        }
    }
}

fn check_query(ix: &FsIndex, costs: &CostTable) -> Result<()> {
    if costs.frag_len() != ix.frag_len() {
        return Err(Error::LengthMismatch {
            expected: ix.frag_len(),
            actual: costs.frag_len(),
        });
    }
    if costs.alphabet_len() != ix.scheme().alphabet().len() {
        return Err(Error::InvalidArgument("query alphabet differs from the index".into()));
    }
    Ok(())
}

fn collect(ix: &FsIndex, costs: &CostTable, entries: Vec<(usize, u64)>, stats: SearchStats) -> HitList {
    let hits = entries
        .into_iter()
        .map(|(e, d)| Hit {
            fragment: ix.frag()[e],
            distance: d,
            score: costs.score_of(d),
        })
        .collect();
    HitList::new(hits, stats)
}

/// Exact range or kNN search through the implicit tree rooted at the
/// query's home bin.
pub fn search(ix: &FsIndex, costs: &CostTable, mode: SearchMode) -> Result<HitList> {
    check_query(ix, costs)?;
    let mut t = Traversal::new(ix, costs);
    let entries = match mode {
        SearchMode::Range(eps) => {
            let mut sink = RangeSink { eps, hits: Vec::new() };
            t.run(&mut sink);
            sink.hits
        }
        SearchMode::Knn(k) => {
            if k == 0 {
                return Err(Error::InvalidArgument("k must be at least 1".into()));
            }
            let mut sink = KnnSink {
                k,
                eps: u64::MAX,
                heap: BinaryHeap::new(),
                ties: Vec::new(),
            };
            t.run(&mut sink);
            let mut all = sink.ties;
            all.extend(sink.heap.into_iter().map(|(d, e)| (e, d)));
            all
        }
    };
    Ok(collect(ix, costs, entries, t.stats))
}

/// Every node visited by a range search with its accumulated lower bound,
/// in visiting order.
pub fn trace_range_nodes(ix: &FsIndex, costs: &CostTable, eps: u64) -> Result<Vec<(u64, u64)>> {
    check_query(ix, costs)?;
    let mut t = Traversal::new(ix, costs);
    t.trace = Some(Vec::new());
    let mut sink = RangeSink { eps, hits: Vec::new() };
    t.run(&mut sink);
    Ok(t.trace.unwrap())
}

/// Distances of the entries of bin `u` within `eps`, as `(frag index,
/// distance)`, along with the scan counters of this bin alone.
pub fn process_bin_hits(ix: &FsIndex, u: u64, costs: &CostTable, eps: u64) -> Result<(Vec<(usize, u64)>, SearchStats)> {
    check_query(ix, costs)?;
    if u >= ix.n_bins() {
        return Err(Error::InvalidArgument(format!("bin {u} out of range")));
    }
    let mut cd = vec![0; ix.frag_len() + 1];
    let mut stats = SearchStats::default();
    let mut sink = RangeSink { eps, hits: Vec::new() };
    process_bin(ix, u, costs, &mut cd, &mut stats, &mut sink);
    Ok((sink.hits, stats))
}
