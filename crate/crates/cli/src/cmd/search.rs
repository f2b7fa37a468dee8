use std::io::Write;

use fsindex_core::scoring::Pssm;
use fsindex_core::search::{search, SearchMode};
use fsindex_core::stats::{ScoreDistribution, Threshold};
use fsindex_core::{CostTable, FsIndex, HitList};
use serde_json::{json, Map, Value};

use crate::corpus::{encode_query, fasta_queries, open_index, random_queries, Measure};
use crate::error::{read_file, write_file, CliError, Result};
use crate::options::SearchOpts;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueryMode {
    Range(u64),
    Knn(usize),
    /// Range search at the least score whose E-value is at most this.
    Evalue(f64),
}

impl QueryMode {
    pub fn from_opts(o: &SearchOpts) -> Result<Self> {
        match (o.epsilon, o.k, o.evalue) {
            (Some(e), None, None) => Ok(QueryMode::Range(e)),
            (None, Some(k), None) => Ok(QueryMode::Knn(k)),
            (None, None, Some(e)) if e > 0.0 => Ok(QueryMode::Evalue(e)),
            (None, None, Some(e)) => Err(CliError::usage(format!("--evalue must be positive, got {e}"))),
            _ => Err(CliError::usage("give exactly one of --epsilon, --k, --evalue")),
        }
    }
}

/// Hits of one query plus the footer describing how they were found.
pub struct QueryResult {
    pub id: String,
    pub hits: HitList,
    pub footer: Map<String, Value>,
    pub distribution: Option<ScoreDistribution>,
}

pub fn run_query(ix: &FsIndex, id: &str, costs: &CostTable, mode: QueryMode) -> Result<QueryResult> {
    let mut footer = Map::new();
    footer.insert("query".into(), json!(id));
    let mut distribution = None;
    let hits = match mode {
        QueryMode::Range(eps) => {
            footer.insert("mode".into(), json!("range"));
            footer.insert("epsilon".into(), json!(eps));
            search(ix, costs, SearchMode::Range(eps))?
        }
        QueryMode::Knn(k) => {
            footer.insert("mode".into(), json!("knn"));
            footer.insert("k".into(), json!(k));
            let h = search(ix, costs, SearchMode::Knn(k))?;
            footer.insert("radius".into(), json!(h.radius()));
            h
        }
        QueryMode::Evalue(e) => {
            footer.insert("mode".into(), json!("evalue"));
            footer.insert("evalue".into(), json!(e));
            let freq = ix.store().background_frequencies()?;
            let dist = ScoreDistribution::for_query(costs, freq, ix.len() as u64)?;
            let (t, eps) = match dist.score_threshold_for_evalue(e)? {
                Threshold::Score(t) => (Some(t), costs.epsilon_for_score(t)),
                Threshold::Unattainable => (None, None),
            };
            footer.insert("score_threshold".into(), json!(t));
            footer.insert("epsilon".into(), json!(eps));
            distribution = Some(dist);
            match eps {
                Some(eps) => search(ix, costs, SearchMode::Range(eps))?,
                None => HitList {
                    hits: Vec::new(),
                    stats: Default::default(),
                },
            }
        }
    };
    let s = &hits.stats;
    footer.insert("hits".into(), json!(hits.len()));
    footer.insert("nodes".into(), json!(s.nodes_visited));
    footer.insert("bins".into(), json!(s.bins_scanned));
    footer.insert("fragments".into(), json!(s.fragments_scanned));
    footer.insert("residues".into(), json!(s.residues_scanned));
    footer.insert("evaluations".into(), json!(s.distance_evaluations));
    footer.insert("access_overhead".into(), json!(round6(hits.access_overhead())));
    Ok(QueryResult {
        id: id.to_string(),
        hits,
        footer,
        distribution,
    })
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

pub const TSV_HEADER: &str = "#query\trecord\toffset\tfragment\tdistance\tscore";

fn plain(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Hit rows followed by a `#stats` line of `key=value` fields.
pub fn write_tsv(ix: &FsIndex, r: &QueryResult, out: &mut dyn Write) -> Result<()> {
    let store = ix.store();
    for h in &r.hits.hits {
        let score = h.score.map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.id,
            store.record_id(h.fragment),
            h.fragment.offset,
            store.fragment_text(h.fragment),
            h.distance,
            score
        )?;
    }
    let fields: Vec<String> = r.footer.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect();
    writeln!(out, "#stats\t{}", fields.join("\t"))?;
    Ok(())
}

pub fn write_json(ix: &FsIndex, r: &QueryResult, out: &mut dyn Write) -> Result<()> {
    let store = ix.store();
    for h in &r.hits.hits {
        let v = json!({
            "query": r.id,
            "record": store.record_id(h.fragment),
            "offset": h.fragment.offset,
            "fragment": store.fragment_text(h.fragment),
            "distance": h.distance,
            "score": h.score,
        });
        writeln!(out, "{v}")?;
    }
    writeln!(out, "{}", json!({ "stats": r.footer }))?;
    Ok(())
}

pub fn run(o: &SearchOpts, seed: u64, out: &mut dyn Write) -> Result<()> {
    let mode = QueryMode::from_opts(o)?;
    let sources = [
        o.pssm.is_some(),
        o.query.is_some(),
        o.queries.is_some(),
        o.random_queries.is_some(),
    ];
    if sources.iter().filter(|&&b| b).count() != 1 {
        return Err(CliError::usage(
            "give exactly one of --pssm, --query, --queries, --random-queries",
        ));
    }
    let ix = open_index(&o.fasta, &o.index, o.frag_len, &o.partitions)?;
    let m = ix.frag_len();
    let al = ix.store().alphabet().clone();

    let queries: Vec<(String, CostTable)> = if let Some(path) = &o.pssm {
        let p = Pssm::from_tsv(&read_file(path)?)?;
        if p.len() != m {
            return Err(fsindex_core::Error::LengthMismatch {
                expected: m,
                actual: p.len(),
            }
            .into());
        }
        let id = path
            .file_stem()
            .map_or_else(|| "pssm".into(), |s| s.to_string_lossy().into_owned());
        vec![(id, CostTable::for_pssm(&p))]
    } else {
        let measure = Measure::load(&o.matrix, &o.measure)?;
        let frags = if let Some(text) = &o.query {
            vec![encode_query(&al, "query", text, m)?]
        } else if let Some(path) = &o.queries {
            fasta_queries(&al, path, m)?
        } else {
            let count = o.random_queries.unwrap_or_default();
            random_queries(ix.store(), None, count, &mut fsindex_core::random::seeded(seed))?
        };
        frags
            .into_iter()
            .map(|q| Ok((q.id, measure.costs(&q.codes)?)))
            .collect::<Result<_>>()?
    };

    let json = o.json.unwrap_or(false);
    let mut buf: Vec<u8> = Vec::new();
    let mut dump = String::new();
    if !json {
        writeln!(buf, "{TSV_HEADER}")?;
    }
    for (id, costs) in &queries {
        let r = run_query(&ix, id, costs, mode)?;
        if json {
            write_json(&ix, &r, &mut buf)?;
        } else {
            write_tsv(&ix, &r, &mut buf)?;
        }
        if let Some(d) = &r.distribution {
            dump.push_str(&format!("# query={id}\n{}", d.survival_table()));
        }
    }
    if let Some(p) = &o.distribution_out {
        write_file(p, dump.as_bytes())?;
    }
    match &o.out {
        Some(p) => write_file(p, &buf),
        None => Ok(out.write_all(&buf)?),
    }
}
