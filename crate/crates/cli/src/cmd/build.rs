use std::fmt::Write as _;
use std::io::Write;

use fsindex_core::FsIndex;

use crate::corpus::open_index;
use crate::error::{write_file, Result};
use crate::options::{required, BuildOpts};

pub fn run(o: &BuildOpts, out: &mut dyn Write) -> Result<()> {
    let dest = required(&o.out, "out")?;
    let frag_len = required(&o.frag_len, "frag-len")?;
    let ix = open_index(&o.fasta, &None, Some(frag_len), &o.partitions)?;
    write_file(&dest, &ix.to_bytes())?;
    let report = build_report(&ix);
    match &o.report {
        Some(p) => write_file(p, report.as_bytes()),
        None => Ok(out.write_all(report.as_bytes())?),
    }
}

/// Shape of the index and its bin-size histogram (empty bins included).
pub fn build_report(ix: &FsIndex) -> String {
    let s = ix.summary();
    let store = ix.store();
    let mut r = String::new();
    let mean = if s.non_empty_bins == 0 {
        0.0
    } else {
        s.fragments as f64 / s.non_empty_bins as f64
    };
    writeln!(r, "records\t{}", store.records().len()).unwrap();
    writeln!(r, "frag_len\t{}", ix.frag_len()).unwrap();
    writeln!(r, "partitions\t{}", ix.scheme().to_spec()).unwrap();
    writeln!(r, "fragments\t{}", s.fragments).unwrap();
    writeln!(r, "rejected_windows\t{}", store.rejected_windows()).unwrap();
    writeln!(r, "bins\t{}", s.bins).unwrap();
    writeln!(r, "non_empty_bins\t{}", s.non_empty_bins).unwrap();
    writeln!(r, "max_bin_size\t{}", s.max_bin_size).unwrap();
    writeln!(r, "mean_non_empty_bin_size\t{mean:.3}").unwrap();
    writeln!(r, "#histogram\nbin_size\tbins").unwrap();
    for (size, count) in &s.size_histogram {
        writeln!(r, "{size}\t{count}").unwrap();
    }
    r
}
