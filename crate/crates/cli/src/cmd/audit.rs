use std::fmt::Write as _;
use std::io::Write;

use fsindex_core::scoring::BUILTIN_MATRICES;
use fsindex_core::{QuasiMetric, ScoreMatrix};

use crate::error::{write_file, Result};
use crate::options::AuditOpts;

/// Failing ordered triples per matrix, and every triple with `--triples`.
pub fn audit_report(matrices: &[ScoreMatrix], triples: bool) -> Result<String> {
    let mut r = String::from("matrix\tfailures\n");
    let mut detail = String::from("#triples\nmatrix\ta\tb\tc\tmargin\n");
    for s in matrices {
        let q = QuasiMetric::from_scores(s)?;
        let fails = q.audit_triangle();
        writeln!(r, "{}\t{}", s.name(), fails.len()).unwrap();
        let al = q.alphabet();
        for f in &fails {
            let l = |c: u8| al.letter(c) as char;
            writeln!(detail, "{}\t{}\t{}\t{}\t{}", s.name(), l(f.a), l(f.b), l(f.c), f.margin).unwrap();
        }
    }
    if triples {
        r.push_str(&detail);
    }
    Ok(r)
}

pub fn run(o: &AuditOpts, out: &mut dyn Write) -> Result<()> {
    let matrices: Vec<ScoreMatrix> = match &o.matrix {
        Some(list) => list
            .split(',')
            .map(|m| ScoreMatrix::resolve(m.trim()))
            .collect::<Result<_, _>>()?,
        None => BUILTIN_MATRICES
            .iter()
            .map(|(n, _)| ScoreMatrix::builtin(n).expect("bundled"))
            .collect(),
    };
    let text = audit_report(&matrices, o.triples.unwrap_or(false))?;
    match &o.out {
        Some(p) => write_file(p, text.as_bytes()),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}
