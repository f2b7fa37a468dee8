use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use fsindex_core::random::seeded;
use fsindex_core::search::{search, sequential_scan, SearchMode};
use fsindex_core::{CostTable, FsIndex, HitList, SearchStats};

use crate::corpus::{load_mixture, open_index, random_queries, Measure};
use crate::error::{write_file, CliError, Result};
use crate::options::{parse_list, BenchOpts};

pub const DEFAULT_QUERIES: usize = 5000;
pub const DEFAULT_K: &str = "1,10,50";

/// One search of the benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub query: String,
    pub k: usize,
    pub mode: &'static str,
    pub radius: Option<u64>,
    pub stats: SearchStats,
    pub hits: usize,
    /// kNN bins over range bins at the kNN radius; set on range rows.
    pub bin_ratio: Option<f64>,
    pub micros: Option<f64>,
}

impl BenchRow {
    fn residues_pct(&self, total_residues: u64) -> f64 {
        if total_residues == 0 {
            0.0
        } else {
            100.0 * self.stats.residues_scanned as f64 / total_residues as f64
        }
    }

    fn overhead(&self) -> f64 {
        self.stats.fragments_scanned.max(1) as f64 / self.hits.max(1) as f64
    }
}

/// Fails unless the indexed and scanned results hold the same fragments at
/// the same distances.
pub fn check_against_scan(id: &str, query: &str, mode: SearchMode, indexed: &HitList, scan: &HitList) -> Result<()> {
    let set = |h: &HitList| h.hits.iter().map(|h| (h.fragment, h.distance)).collect::<BTreeSet<_>>();
    if set(indexed) == set(scan) {
        return Ok(());
    }
    Err(CliError::Verification(format!(
        "query {id} {query} {mode:?}: index returned {} hits, sequential scan {}",
        indexed.len(),
        scan.len()
    )))
}

pub fn run(o: &BenchOpts, seed: u64, out: &mut dyn Write) -> Result<()> {
    let ks: Vec<usize> = parse_list(o.k.as_deref().unwrap_or(DEFAULT_K), "k")?;
    if ks.contains(&0) {
        return Err(CliError::usage("--k values must be positive"));
    }
    let ix = open_index(&o.fasta, &o.index, o.frag_len, &o.partitions)?;
    let measure = Measure::load(&o.matrix, &o.measure)?;
    let mixture = load_mixture(&o.mixture, ix.store().alphabet())?;
    let count = o.random_queries.unwrap_or(DEFAULT_QUERIES);
    let queries = random_queries(ix.store(), mixture.as_ref(), count, &mut seeded(seed))?;
    let verify = o.verify.unwrap_or(false);
    let timing = o.timing.unwrap_or(false);

    let mut rows = Vec::new();
    let mut checked = 0usize;
    for q in &queries {
        let costs = measure.costs(&q.codes)?;
        let text = ix.store().alphabet().decode(&q.codes);
        for &k in &ks {
            let (knn, t_knn) = timed(&ix, &costs, SearchMode::Knn(k))?;
            // The kNN radius sets the range of the matching range search.
            let radius = knn.radius();
            let range = match radius {
                Some(r) => Some(timed(&ix, &costs, SearchMode::Range(r))?),
                None => None,
            };
            if verify {
                let scan = sequential_scan(ix.store(), &costs, SearchMode::Knn(k))?;
                check_against_scan(&q.id, &text, SearchMode::Knn(k), &knn, &scan)?;
                checked += 1;
                if let (Some(r), Some((range, _))) = (radius, &range) {
                    let scan = sequential_scan(ix.store(), &costs, SearchMode::Range(r))?;
                    check_against_scan(&q.id, &text, SearchMode::Range(r), range, &scan)?;
                    checked += 1;
                }
            }
            rows.push(BenchRow {
                query: q.id.clone(),
                k,
                mode: "knn",
                radius,
                stats: knn.stats,
                hits: knn.len(),
                bin_ratio: None,
                micros: timing.then_some(t_knn),
            });
            if let Some((range, t_range)) = range {
                let bins = range.stats.bins_scanned;
                rows.push(BenchRow {
                    query: q.id.clone(),
                    k,
                    mode: "range",
                    radius,
                    stats: range.stats,
                    hits: range.len(),
                    bin_ratio: (bins > 0).then(|| knn.stats.bins_scanned as f64 / bins as f64),
                    micros: timing.then_some(t_range),
                });
            }
        }
    }

    let mut report = String::new();
    writeln!(
        report,
        "#bench\tfragments={}\tfrag_len={}\tbins={}\tqueries={}\tk={}\tseed={seed}",
        ix.len(),
        ix.frag_len(),
        ix.n_bins(),
        queries.len(),
        ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
    )
    .unwrap();
    report.push_str(&format_report(&rows, (ix.len() * ix.frag_len()) as u64, &ks, timing));
    if verify {
        writeln!(report, "#verify\tsearches={checked}\tstatus=pass").unwrap();
    }
    match &o.out {
        Some(p) => write_file(p, report.as_bytes()),
        None => Ok(out.write_all(report.as_bytes())?),
    }
}

fn timed(ix: &FsIndex, costs: &CostTable, mode: SearchMode) -> Result<(HitList, f64)> {
    let t = Instant::now();
    let h = search(ix, costs, mode)?;
    Ok((h, t.elapsed().as_secs_f64() * 1e6))
}

const COLUMNS: &str = "bins\tfragments\tresidues\tresidues_pct\tevaluations\thits\taccess_overhead\tbin_ratio";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for x in xs {
        s += x;
        n += 1;
    }
    (n > 0).then(|| s / n as f64)
}

/// Per-search rows, then per (k, mode) means of the same columns.
pub fn format_report(rows: &[BenchRow], total_residues: u64, ks: &[usize], timing: bool) -> String {
    let time_col = if timing { "\ttime_us" } else { "" };
    let mut r = String::new();
    writeln!(r, "#rows\nquery\tk\tmode\tradius\t{COLUMNS}{time_col}").unwrap();
    for row in rows {
        let s = &row.stats;
        write!(
            r,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\t{:.6}\t{}",
            row.query,
            row.k,
            row.mode,
            row.radius.map_or_else(|| "-".into(), |x| x.to_string()),
            s.bins_scanned,
            s.fragments_scanned,
            s.residues_scanned,
            row.residues_pct(total_residues),
            s.distance_evaluations,
            row.hits,
            row.overhead(),
            opt(row.bin_ratio),
        )
        .unwrap();
        if timing {
            write!(r, "\t{}", opt(row.micros)).unwrap();
        }
        r.push('\n');
    }
    writeln!(r, "#aggregate\nk\tmode\tsearches\t{COLUMNS}{time_col}").unwrap();
    for &k in ks {
        for mode in ["knn", "range"] {
            let g: Vec<&BenchRow> = rows.iter().filter(|x| x.k == k && x.mode == mode).collect();
            if g.is_empty() {
                continue;
            }
            let m = |f: &dyn Fn(&BenchRow) -> f64| opt(mean(g.iter().map(|x| f(x))));
            write!(
                r,
                "{k}\t{mode}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                g.len(),
                m(&|x| x.stats.bins_scanned as f64),
                m(&|x| x.stats.fragments_scanned as f64),
                m(&|x| x.stats.residues_scanned as f64),
                m(&|x| x.residues_pct(total_residues)),
                m(&|x| x.stats.distance_evaluations as f64),
                m(&|x| x.hits as f64),
                m(&|x| x.overhead()),
                opt(mean(g.iter().filter_map(|x| x.bin_ratio))),
            )
            .unwrap();
            if timing {
                write!(r, "\t{}", opt(mean(g.iter().filter_map(|x| x.micros)))).unwrap();
            }
            r.push('\n');
        }
    }
    r
}
