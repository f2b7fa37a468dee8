use std::fmt::Write as _;
use std::io::Write;
use std::sync::Arc;

use fsindex_core::distexp::{
    estimate_log_log_slope, estimate_monomial_fit, fragment_distance_cdf, sample_distance_cdf, EmpiricalDistanceCdf,
    Generator, LogLogConfig, MonomialConfig, MonomialFit, PointMetric,
};
use fsindex_core::random::seeded;
use fsindex_core::{FragmentStore, QuasiMetric};

use crate::corpus::{load_matrix, read_fasta};
use crate::error::{write_file, CliError, Result};
use crate::options::{required, DistExpOpts};

pub const DEFAULT_POINTS: usize = 5000;
pub const DEFAULT_PAIRS: u64 = 200_000;

pub fn parse_generator(s: &str) -> Result<Generator> {
    match s {
        "cube" => Ok(Generator::Cube),
        "gaussian" => Ok(Generator::Gaussian),
        "sphere" => Ok(Generator::Sphere),
        _ => Err(CliError::usage(format!(
            "--generator must be cube, gaussian or sphere, not '{s}'"
        ))),
    }
}

pub fn parse_metric(s: &str) -> Result<PointMetric> {
    match s {
        "l1" => Ok(PointMetric::L1),
        "l2" => Ok(PointMetric::L2),
        "linf" => Ok(PointMetric::LInf),
        "geodesic" => Ok(PointMetric::Geodesic),
        _ => Err(CliError::usage(format!(
            "--metric must be l1, l2, linf or geodesic, not '{s}'"
        ))),
    }
}

/// Both estimates for one sampled distribution.
pub struct ExponentReport {
    pub source: String,
    pub cdf: EmpiricalDistanceCdf,
    pub log_log: Result<f64, fsindex_core::Error>,
    pub monomial: Result<MonomialFit, fsindex_core::Error>,
}

pub fn estimate(o: &DistExpOpts, seed: u64) -> Result<ExponentReport> {
    let pairs = o.pairs.unwrap_or(DEFAULT_PAIRS);
    let mut rng = seeded(seed);
    let (source, cdf) = match (&o.generator, &o.fasta) {
        (Some(g), None) => {
            let generator = parse_generator(g)?;
            let metric_name = o.metric.as_deref().unwrap_or("linf");
            let metric = parse_metric(metric_name)?;
            let dim = required(&o.dim, "dim")?;
            let points = generator.sample(&mut rng, dim, o.points.unwrap_or(DEFAULT_POINTS));
            let cdf = sample_distance_cdf(&points, |a, b| metric.distance(a, b), pairs, &mut rng)?;
            (
                format!("{g}\tdim={dim}\tmetric={metric_name}\tpoints={}", points.len()),
                cdf,
            )
        }
        (None, Some(path)) => {
            let m = required(&o.frag_len, "frag-len")?;
            let store = Arc::new(FragmentStore::build(read_fasta(path)?, m)?);
            let q = QuasiMetric::from_scores(&load_matrix(&o.matrix)?)?;
            let cdf = fragment_distance_cdf(&store, &q, pairs, &mut rng)?;
            (
                format!(
                    "fragments\tfrag_len={m}\tmetric=associated({})\tpoints={}",
                    q.name(),
                    store.len()
                ),
                cdf,
            )
        }
        _ => return Err(CliError::usage("give exactly one of --generator, --fasta")),
    };
    let ll = LogLogConfig {
        percentile_cap: o.percentile_cap.unwrap_or(LogLogConfig::default().percentile_cap),
        min_pairs: o.min_pairs.unwrap_or(LogLogConfig::default().min_pairs),
    };
    let mc = MonomialConfig {
        refine: o.refine.unwrap_or(false),
        ..Default::default()
    };
    Ok(ExponentReport {
        source,
        log_log: estimate_log_log_slope(&cdf, &ll),
        monomial: estimate_monomial_fit(&cdf, &mc),
        cdf,
    })
}

pub fn format_report(r: &ExponentReport) -> String {
    let mut s = String::new();
    writeln!(s, "source\t{}", r.source).unwrap();
    writeln!(s, "sampled_points\t{}", r.cdf.points).unwrap();
    writeln!(s, "pairs\t{}", r.cdf.pairs).unwrap();
    match &r.log_log {
        Ok(v) => writeln!(s, "loglog_slope\t{v:.6}").unwrap(),
        Err(e) => writeln!(s, "loglog_slope\t-\t{e}").unwrap(),
    }
    match &r.monomial {
        Ok(fit) => {
            writeln!(s, "monomial_estimate\t{}", fit.estimate).unwrap();
            writeln!(s, "#windows\nlevel\tend\tpoints\tbest\ttest_error").unwrap();
            for w in &fit.windows {
                let i = w
                    .errors
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map_or(0, |x| x.0);
                writeln!(
                    s,
                    "{}\t{:.6}\t{}\t{}\t{:.6e}",
                    w.level, w.end, w.points, w.best, w.errors[i]
                )
                .unwrap();
            }
        }
        Err(e) => writeln!(s, "monomial_estimate\t-\t{e}").unwrap(),
    }
    s
}

pub fn run(o: &DistExpOpts, seed: u64, out: &mut dyn Write) -> Result<()> {
    let r = estimate(o, seed)?;
    if let Some(p) = &o.cdf_out {
        write_file(p, r.cdf.to_table().as_bytes())?;
    }
    if let (Err(a), Err(_)) = (&r.log_log, &r.monomial) {
        return Err(CliError::Data(fsindex_core::Error::InsufficientData(format!(
            "no estimate: {a}"
        ))));
    }
    let text = format_report(&r);
    match &o.out {
        Some(p) => write_file(p, text.as_bytes()),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}
