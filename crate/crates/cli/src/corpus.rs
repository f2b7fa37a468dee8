//! Loading corpora, indexes, measures and queries from files and flags.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fsindex_core::fsindex::decode;
use fsindex_core::ingest::parse_fasta;
use fsindex_core::profile::DirichletMixture;
use fsindex_core::random::{mixture_fragments, BackgroundModel, SeededRng};
use fsindex_core::{
    Alphabet, CostTable, Error, FragmentStore, FsIndex, PartitionScheme, QuasiMetric, ScoreMatrix, SequenceRecord,
};

use crate::error::{read_bytes, read_file, CliError, Result};
use crate::options::required;

pub const DEFAULT_PARTITIONS: &str = "TSAN,ILVM,KR,DEQ,WFYH,GPC";
pub const DEFAULT_MATRIX: &str = "BLOSUM62";

pub fn read_fasta(path: &Path) -> Result<Vec<SequenceRecord>> {
    Ok(parse_fasta(&read_file(path)?)?)
}

/// Opens `index` against the corpus, or builds the index in memory when no
/// index file is given.
pub fn open_index(
    fasta: &Option<PathBuf>,
    index: &Option<PathBuf>,
    frag_len: Option<usize>,
    partitions: &Option<String>,
) -> Result<FsIndex> {
    let records = read_fasta(&required(fasta, "fasta")?)?;
    match index {
        Some(path) => {
            let detached = decode(&read_bytes(path)?)?;
            let m = detached.frag_len();
            if let Some(want) = frag_len.filter(|&f| f != m) {
                return Err(Error::FragmentLengthMismatch { index: m, store: want }.into());
            }
            let store = Arc::new(FragmentStore::build(records, m)?);
            Ok(detached.attach(store)?)
        }
        None => {
            let m = required(&frag_len, "frag-len")?;
            let store = Arc::new(FragmentStore::build(records, m)?);
            let spec = partitions.as_deref().unwrap_or(DEFAULT_PARTITIONS);
            let scheme = PartitionScheme::parse(spec, m, store.alphabet())?;
            Ok(FsIndex::build(store, scheme)?)
        }
    }
}

pub fn load_matrix(matrix: &Option<String>) -> Result<ScoreMatrix> {
    Ok(ScoreMatrix::resolve(matrix.as_deref().unwrap_or(DEFAULT_MATRIX))?)
}

/// Letter measure of a fragment query.
#[derive(Debug, Clone)]
pub enum Measure {
    Quasi(QuasiMetric),
    /// The associated metric `max(d(a, b), d(b, a))`; queries carry no score.
    Metric(QuasiMetric),
}

impl Measure {
    pub fn load(matrix: &Option<String>, measure: &Option<String>) -> Result<Self> {
        let q = QuasiMetric::from_scores(&load_matrix(matrix)?)?;
        match measure.as_deref().unwrap_or("quasi") {
            "quasi" => Ok(Measure::Quasi(q)),
            "metric" => Ok(Measure::Metric(q)),
            other => Err(CliError::usage(format!(
                "--measure must be 'quasi' or 'metric', not '{other}'"
            ))),
        }
    }

    pub fn costs(&self, omega: &[u8]) -> Result<CostTable> {
        Ok(match self {
            Measure::Quasi(q) => CostTable::for_fragment(q, omega)?,
            Measure::Metric(q) => CostTable::for_fragment_metric(q, omega)?,
        })
    }
}

/// A named, encoded query fragment.
#[derive(Debug, Clone)]
pub struct QueryFragment {
    pub id: String,
    pub codes: Vec<u8>,
}

pub fn encode_query(al: &Alphabet, id: &str, text: &str, m: usize) -> Result<QueryFragment> {
    let upper = text.trim().to_ascii_uppercase();
    let codes = al.encode(upper.as_bytes())?;
    if codes.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: codes.len(),
        }
        .into());
    }
    Ok(QueryFragment {
        id: id.to_string(),
        codes,
    })
}

pub fn fasta_queries(al: &Alphabet, path: &Path, m: usize) -> Result<Vec<QueryFragment>> {
    read_fasta(path)?
        .iter()
        .map(|r| encode_query(al, &r.id, &r.residues, m))
        .collect()
}

/// Random queries named `rand1`, `rand2`, ... drawn i.i.d. from the store's
/// background frequencies, or from a Dirichlet mixture when one is given.
pub fn random_queries(
    store: &FragmentStore,
    mixture: Option<&DirichletMixture>,
    count: usize,
    rng: &mut SeededRng,
) -> Result<Vec<QueryFragment>> {
    let m = store.frag_len();
    let frags = match mixture {
        Some(mx) => mixture_fragments(rng, mx, m, count),
        None => BackgroundModel::new(store.background_frequencies()?)?.fragments(rng, m, count),
    };
    Ok(frags
        .into_iter()
        .enumerate()
        .map(|(i, codes)| QueryFragment {
            id: format!("rand{}", i + 1),
            codes,
        })
        .collect())
}

pub fn load_mixture(path: &Option<PathBuf>, al: &Alphabet) -> Result<Option<DirichletMixture>> {
    path.as_ref()
        .map(|p| Ok(DirichletMixture::parse_ucsc(&read_file(p)?, al)?))
        .transpose()
}
