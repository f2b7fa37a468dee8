//! Command-line flags and the optional TOML config file.
//!
//! Every option is an `Option` so that a flag given on the command line can
//! be told apart from one that was left out; values missing from the command
//! line are taken from the config file section of the same subcommand.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::error::{read_file, CliError, Result};

macro_rules! options {
    ($(#[$m:meta])* pub struct $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty,)* }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, PartialEq, clap::Args, Deserialize)]
        #[serde(deny_unknown_fields, rename_all = "kebab-case")]
        pub struct $name {
            $($(#[$fm])* #[arg(long)] pub $field: Option<$ty>,)*
        }

        impl $name {
            /// Fills every unset field from `file`.
            pub fn or(self, file: Self) -> Self {
                $name { $($field: self.$field.or(file.$field),)* }
            }
        }
    };
}

#[derive(Debug, Parser)]
#[command(
    name = "fsindex",
    version,
    about = "Quasi-metric similarity search over protein fragments"
)]
pub struct Cli {
    /// TOML file with one table per subcommand; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index over the fragments of a FASTA file.
    Build(BuildOpts),
    /// Range, kNN, PSSM and E-value searches.
    Search(SearchOpts),
    /// Run random kNN and range searches and report search statistics.
    Bench(BenchOpts),
    /// Iterated profile searches for every window of a query sequence.
    Iterate(IterateOpts),
    /// Estimate the distance exponent of a point set.
    Distexp(DistExpOpts),
    /// List triples violating the triangle inequality.
    Audit(AuditOpts),
}

options! {
    pub struct BuildOpts {
        /// Sequence corpus.
        fasta: PathBuf,
        /// Fragment length m.
        frag_len: usize,
        /// Alphabet partitions, e.g. "TSAN,ILVM,KR,DEQ,WFYH,GPC".
        partitions: String,
        /// Index file to write.
        out: PathBuf,
        /// Build report destination (default stdout).
        report: PathBuf,
    }
}

options! {
    pub struct SearchOpts {
        /// Sequence corpus.
        fasta: PathBuf,
        /// Index built from --fasta; without it the index is built in memory.
        index: PathBuf,
        /// Fragment length m (needed without --index).
        frag_len: usize,
        /// Alphabet partitions (default "TSAN,ILVM,KR,DEQ,WFYH,GPC").
        partitions: String,
        /// Bundled matrix name or matrix file (default BLOSUM62).
        matrix: String,
        /// "quasi" (default) or "metric" for the associated metric.
        measure: String,
        /// PSSM file; searches by its valuation instead of a fragment.
        pssm: PathBuf,
        /// Inline query fragment.
        query: String,
        /// FASTA file of query fragments.
        queries: PathBuf,
        /// Number of random query fragments drawn from the background.
        random_queries: usize,
        /// Range search radius.
        epsilon: u64,
        /// Number of nearest neighbours.
        k: usize,
        /// Range search at the score threshold for this E-value.
        evalue: f64,
        /// One JSON object per line instead of TSV.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        json: bool,
        /// Output file (default stdout).
        out: PathBuf,
        /// Writes the score distribution of each E-value query here.
        distribution_out: PathBuf,
    }
}

options! {
    pub struct BenchOpts {
        /// Sequence corpus.
        fasta: PathBuf,
        /// Index built from --fasta; without it the index is built in memory.
        index: PathBuf,
        /// Fragment length m (needed without --index).
        frag_len: usize,
        /// Alphabet partitions (default "TSAN,ILVM,KR,DEQ,WFYH,GPC").
        partitions: String,
        /// Bundled matrix name or matrix file (default BLOSUM62).
        matrix: String,
        /// "quasi" (default) or "metric".
        measure: String,
        /// Number of random queries (default 5000).
        random_queries: usize,
        /// Comma-separated neighbour counts (default "1,10,50").
        k: String,
        /// Dirichlet mixture for drawing queries (default: background).
        mixture: PathBuf,
        /// Check every search against a sequential scan.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        verify: bool,
        /// Add wall-clock columns (makes the report non-reproducible).
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        timing: bool,
        /// Output file (default stdout).
        out: PathBuf,
    }
}

options! {
    pub struct IterateOpts {
        /// Sequence corpus.
        fasta: PathBuf,
        /// Index built from --fasta; without it the index is built in memory.
        index: PathBuf,
        /// Fragment length m (needed without --index).
        frag_len: usize,
        /// Alphabet partitions (default "TSAN,ILVM,KR,DEQ,WFYH,GPC").
        partitions: String,
        /// Measure for the first iteration (default BLOSUM62).
        matrix: String,
        /// Dirichlet mixture in UCSC format (default: one uniform component, alpha 1).
        mixture: PathBuf,
        /// Inline query protein sequence.
        sequence: String,
        /// FASTA file of query proteins.
        queries: PathBuf,
        /// Minimum hits to stay active (default 30).
        min_hits: usize,
        /// Comma-separated E-values per iteration (default "1,1,0.1,0.1,0.01").
        schedule: String,
        /// Maximum iterations per window (default 5).
        iterations: usize,
        /// Stop a window when its hits repeat (default true).
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        convergence: bool,
        /// Directory for the log and final PSSMs.
        out_dir: PathBuf,
    }
}

options! {
    pub struct DistExpOpts {
        /// "cube", "gaussian" or "sphere".
        generator: String,
        /// Ambient dimension of the generator.
        dim: usize,
        /// Number of generated points (default 5000).
        points: usize,
        /// "l1", "l2", "linf" (default) or "geodesic".
        metric: String,
        /// Pairwise distances to sample (default 200000).
        pairs: u64,
        /// Fragment dataset instead of a generator.
        fasta: PathBuf,
        /// Fragment length m (needed without --index).
        frag_len: usize,
        /// Quasi-metric whose associated metric is used for fragments.
        matrix: String,
        /// Log-log window end as a level of F (default 0.05).
        percentile_cap: f64,
        /// Log-log points need at least this many pairs (default 5).
        min_pairs: u64,
        /// Golden-section refinement of the monomial exponent.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        refine: bool,
        /// Writes the empirical distribution here.
        cdf_out: PathBuf,
        /// Output file (default stdout).
        out: PathBuf,
    }
}

options! {
    pub struct AuditOpts {
        /// Comma-separated matrix names or files (default: every bundled matrix).
        matrix: String,
        /// List every failing triple.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        triples: bool,
        /// Output file (default stdout).
        out: PathBuf,
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub build: BuildOpts,
    #[serde(default)]
    pub search: SearchOpts,
    #[serde(default)]
    pub bench: BenchOpts,
    #[serde(default)]
    pub iterate: IterateOpts,
    #[serde(default)]
    pub distexp: DistExpOpts,
    #[serde(default)]
    pub audit: AuditOpts,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
    }
}

/// Command-line options after the config file has been applied.
#[derive(Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub command: Command,
}

pub const DEFAULT_SEED: u64 = 1;

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let command = match cli.command {
            Command::Build(o) => Command::Build(o.or(file.build)),
            Command::Search(o) => Command::Search(o.or(file.search)),
            Command::Bench(o) => Command::Bench(o.or(file.bench)),
            Command::Iterate(o) => Command::Iterate(o.or(file.iterate)),
            Command::Distexp(o) => Command::Distexp(o.or(file.distexp)),
            Command::Audit(o) => Command::Audit(o.or(file.audit)),
        };
        Ok(RunConfig {
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            command,
        })
    }
}

pub(crate) fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

/// Parses "1,10,50"-style lists.
pub(crate) fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>> {
    let v: Vec<T> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("--{flag}: cannot parse '{x}'")))
        })
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(CliError::usage(format!("--{flag} is empty")));
    }
    Ok(v)
}
