use std::fmt::Write as _;
use std::io::Write;

use fsindex_core::profile::{DirichletMixture, IterationConfig, KeepAll, ProfileSearch, DEFAULT_MIN_HITS};
use fsindex_core::scoring::INVALID;
use fsindex_core::QuasiMetric;

use crate::corpus::{load_matrix, load_mixture, open_index, read_fasta};
use crate::error::{write_file, CliError, Result};
use crate::options::{parse_list, IterateOpts};

pub fn config_from(o: &IterateOpts) -> Result<IterationConfig> {
    let mut c = IterationConfig::default();
    if let Some(s) = &o.schedule {
        c.schedule = parse_list(s, "schedule")?;
        if c.schedule.iter().any(|e: &f64| !(*e > 0.0)) {
            return Err(CliError::usage("--schedule values must be positive"));
        }
    }
    c.min_hits = o.min_hits.unwrap_or(DEFAULT_MIN_HITS);
    if let Some(n) = o.iterations {
        c.max_iterations = n;
    }
    c.stop_on_convergence = o.convergence.unwrap_or(true);
    Ok(c)
}

pub fn run(o: &IterateOpts, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let queries: Vec<(String, String)> = match (&o.sequence, &o.queries) {
        (Some(s), None) => vec![("query".into(), s.trim().to_ascii_uppercase())],
        (None, Some(p)) => read_fasta(p)?.into_iter().map(|r| (r.id, r.residues)).collect(),
        _ => return Err(CliError::usage("give exactly one of --sequence, --queries")),
    };
    let config = config_from(o)?;
    let ix = open_index(&o.fasta, &o.index, o.frag_len, &o.partitions)?;
    let al = ix.store().alphabet().clone();
    let metric = QuasiMetric::from_scores(&load_matrix(&o.matrix)?)?;
    let mixture = load_mixture(&o.mixture, &al)?.unwrap_or_else(|| DirichletMixture::uniform(al.clone(), 1.0));
    let background = ix.store().background_frequencies()?.to_vec();
    let driver = ProfileSearch {
        index: &ix,
        metric: &metric,
        mixture: &mixture,
        background: &background,
        config: &config,
        filter: &KeepAll,
    };
    if let Some(dir) = &o.out_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::File {
            path: dir.clone(),
            source,
        })?;
    }

    let m = ix.frag_len();
    let mut log = String::new();
    for (id, residues) in &queries {
        let codes: Vec<u8> = residues.bytes().map(|b| al.code_or_invalid(b)).collect();
        if codes.len() < m {
            writeln!(
                err,
                "warning: query {id} has {} residues, fewer than the fragment length {m}",
                codes.len()
            )?;
            continue;
        }
        for w in 0..=codes.len() - m {
            let window = &codes[w..w + m];
            if window.contains(&INVALID) {
                writeln!(log, "query={id}\twindow={w}\tstatus=skipped").unwrap();
                continue;
            }
            let run = driver.run_window(w, window.to_vec())?;
            for rec in &run.log {
                writeln!(log, "query={id}\t{rec}").unwrap();
            }
            if let (Some(dir), Some(p)) = (&o.out_dir, run.state.pssm()) {
                write_file(&dir.join(pssm_file_name(id, w)), p.to_tsv().as_bytes())?;
            }
        }
    }
    if let Some(dir) = &o.out_dir {
        write_file(&dir.join("iterate.log"), log.as_bytes())?;
    }
    out.write_all(log.as_bytes())?;
    Ok(())
}

/// `<query>.w<window>.pssm`, with path separators in the id replaced.
pub fn pssm_file_name(id: &str, window: usize) -> String {
    let safe: String = id
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{safe}.w{window}.pssm")
}
