use std::fs;
use std::path::{Path, PathBuf};

use fsindex_core::random::{mutate, seeded, BackgroundModel};
use fsindex_core::stats::{ScoreDistribution, Threshold};
use fsindex_core::{Alphabet, CostTable, QuasiMetric, ScoreMatrix};
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn fsindex(args: &[&str]) -> Out {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("fsindex").chain(args.iter().copied());
    let code = fsindex_cli::run(argv, &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let o = fsindex(args);
    assert_eq!(o.code, 0, "fsindex {args:?} failed: {}", o.stderr);
    o.stdout
}

/// `records` random proteins of length `len` written as FASTA.
fn corpus(dir: &Path, name: &str, records: usize, len: usize, seed: u64) -> PathBuf {
    let al = Alphabet::protein();
    let g = BackgroundModel::uniform(20);
    let mut rng = seeded(seed);
    let mut text = String::new();
    for (i, s) in g.fragments(&mut rng, len, records).iter().enumerate() {
        text.push_str(&format!(">p{i} random protein\n{}\n", al.decode(s)));
    }
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stats_lines(out: &str) -> Vec<&str> {
    out.lines().filter(|l| l.starts_with("#stats")).collect()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split('\t')
        .find_map(|f| f.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} in {line}"))
}

#[test]
fn build_reports_shape_and_is_reproducible() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 20, 60, 1);
    let (a, b) = (d.path().join("a.idx"), d.path().join("b.idx"));
    let spec = "ACDEFGH,IKLMNPQ,RSTVWY";
    let report = ok(&[
        "build",
        "--fasta",
        s(&fa),
        "--frag-len",
        "5",
        "--partitions",
        spec,
        "--out",
        s(&a),
    ]);
    ok(&[
        "build",
        "--fasta",
        s(&fa),
        "--frag-len",
        "5",
        "--partitions",
        spec,
        "--out",
        s(&b),
    ]);
    assert!(report.contains("fragments\t1120\n"), "{report}");
    assert!(report.contains("bins\t243\n"));
    assert!(report.contains("#histogram\nbin_size\tbins\n"));
    let hist: u64 = report
        .lines()
        .skip_while(|l| *l != "bin_size\tbins")
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(hist, 243);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn invalid_partition_names_the_letter() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 2, 20, 1);
    let o = fsindex(&[
        "build",
        "--fasta",
        s(&fa),
        "--frag-len",
        "4",
        "--partitions",
        "TSAN,ILVM,KR,DEQ,WFYH,GP",
        "--out",
        s(&d.path().join("x.idx")),
    ]);
    assert_ne!(o.code, 0);
    assert!(o.stderr.contains("'C'"), "{}", o.stderr);
}

#[test]
fn knn_finds_the_query_in_the_corpus() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 30, 80, 2);
    let text = fs::read_to_string(&fa).unwrap();
    let q = &text.lines().nth(1).unwrap()[10..17];
    let out = ok(&["search", "--fasta", s(&fa), "--frag-len", "7", "--query", q, "--k", "1"]);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(!rows.is_empty());
    for r in &rows {
        let c: Vec<&str> = r.split('\t').collect();
        assert_eq!(c[4], "0");
        assert_eq!(c[3], q);
    }
    assert!(rows.iter().any(|r| r.starts_with(&format!("query\tp0\t10\t{q}\t0\t"))));
}

#[test]
fn evalue_footer_matches_the_score_distribution() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 100, 100, 3);
    let idx = d.path().join("c.idx");
    ok(&["build", "--fasta", s(&fa), "--frag-len", "6", "--out", s(&idx)]);
    let out = ok(&[
        "search",
        "--fasta",
        s(&fa),
        "--index",
        s(&idx),
        "--query",
        "WCWMHW",
        "--evalue",
        "1.0",
    ]);
    let st = stats_lines(&out);
    assert_eq!(st.len(), 1);
    let t: i64 = field(st[0], "score_threshold").parse().unwrap();
    let eps: u64 = field(st[0], "epsilon").parse().unwrap();

    let records = fsindex_core::ingest::parse_fasta(&fs::read_to_string(&fa).unwrap()).unwrap();
    let store = fsindex_core::FragmentStore::build(records, 6).unwrap();
    let q = QuasiMetric::from_scores(&ScoreMatrix::blosum62()).unwrap();
    let omega = Alphabet::protein().encode(b"WCWMHW").unwrap();
    let costs = CostTable::for_fragment(&q, &omega).unwrap();
    let dist =
        ScoreDistribution::for_query(&costs, store.background_frequencies().unwrap(), store.len() as u64).unwrap();
    assert_eq!(dist.score_threshold_for_evalue(1.0).unwrap(), Threshold::Score(t));
    assert_eq!(costs.epsilon_for_score(t), Some(eps));
    assert!(dist.evalue(t) <= 1.0 && dist.evalue(t - 1) > 1.0);
    for row in out.lines().filter(|l| !l.starts_with('#')) {
        let c: Vec<&str> = row.split('\t').collect();
        assert!(c[5].parse::<i64>().unwrap() >= t);
        assert!(c[4].parse::<u64>().unwrap() <= eps);
    }
}

#[test]
fn batch_queries_keep_input_order() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 40, 60, 4);
    let al = Alphabet::protein();
    let mut rng = seeded(11);
    let qs = BackgroundModel::uniform(20).fragments(&mut rng, 5, 100);
    let text: String = qs
        .iter()
        .enumerate()
        .map(|(i, q)| format!(">q{i}\n{}\n", al.decode(q)))
        .collect();
    let qf = d.path().join("q.fa");
    fs::write(&qf, text).unwrap();
    let out = ok(&[
        "search",
        "--fasta",
        s(&fa),
        "--frag-len",
        "5",
        "--queries",
        s(&qf),
        "--epsilon",
        "6",
    ]);
    let st = stats_lines(&out);
    assert_eq!(st.len(), 100);
    for (i, line) in st.iter().enumerate() {
        assert_eq!(field(line, "query"), format!("q{i}"));
    }
}

#[test]
fn json_lines_parse() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 20, 60, 5);
    let out = ok(&[
        "search",
        "--fasta",
        s(&fa),
        "--frag-len",
        "4",
        "--query",
        "ACDE",
        "--k",
        "5",
        "--json",
    ]);
    let objs: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let stats = objs.last().unwrap()["stats"].clone();
    assert_eq!(stats["mode"], "knn");
    let hits = &objs[..objs.len() - 1];
    assert_eq!(stats["hits"].as_u64().unwrap() as usize, hits.len());
    assert!(hits.len() >= 5);
    assert!(hits
        .iter()
        .all(|h| h["query"] == "query" && h["fragment"].as_str().unwrap().len() == 4));
}

#[test]
fn metric_and_pssm_queries() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 20, 60, 6);
    let out = ok(&[
        "search",
        "--fasta",
        s(&fa),
        "--frag-len",
        "4",
        "--query",
        "ACDE",
        "--k",
        "3",
        "--measure",
        "metric",
    ]);
    assert!(out.lines().filter(|l| !l.starts_with('#')).all(|l| l.ends_with("\t-")));
    // A PSSM copied from the BLOSUM62 rows of the query gives the same hits.
    let s62 = ScoreMatrix::blosum62();
    let p = fsindex_core::Pssm::from_matrix_rows(&s62, &Alphabet::protein().encode(b"ACDE").unwrap());
    let pf = d.path().join("acde.pssm");
    fs::write(&pf, p.to_tsv()).unwrap();
    let a = ok(&[
        "search",
        "--fasta",
        s(&fa),
        "--frag-len",
        "4",
        "--query",
        "ACDE",
        "--epsilon",
        "12",
    ]);
    let b = ok(&[
        "search",
        "--fasta",
        s(&fa),
        "--frag-len",
        "4",
        "--pssm",
        s(&pf),
        "--epsilon",
        "12",
    ]);
    let body = |t: &str| {
        t.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_once('\t').unwrap().1.to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(body(&a), body(&b));
    assert!(!body(&a).is_empty());
}

#[test]
fn random_queries_are_seeded() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 30, 60, 7);
    let args = |seed: &'static str| {
        vec![
            "--seed",
            seed,
            "search",
            "--fasta",
            s(&fa),
            "--frag-len",
            "5",
            "--random-queries",
            "20",
            "--k",
            "2",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>()
    };
    let run = |seed| {
        let a = args(seed);
        ok(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}

#[test]
fn config_file_supplies_and_flags_override() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 20, 60, 8);
    let cfg = d.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "seed = 3\n[search]\nfasta = {:?}\nfrag-len = 5\nquery = \"ACDEF\"\nk = 4\n",
            s(&fa)
        ),
    )
    .unwrap();
    let from_file = ok(&["--config", s(&cfg), "search"]);
    assert_eq!(field(stats_lines(&from_file)[0], "k"), "4");
    let overridden = ok(&["--config", s(&cfg), "search", "--k", "7"]);
    assert_eq!(field(stats_lines(&overridden)[0], "k"), "7");
    fs::write(&cfg, "[search]\nbogus = 1\n").unwrap();
    assert_eq!(fsindex(&["--config", s(&cfg), "search"]).code, 1);
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 5, 30, 9);
    assert_eq!(fsindex(&["--help"]).code, 0);
    assert_eq!(fsindex(&["frobnicate"]).code, 1);
    assert_eq!(
        fsindex(&["search", "--fasta", s(&fa), "--frag-len", "4", "--query", "ACDE"]).code,
        1
    );
    assert_eq!(
        fsindex(&[
            "search",
            "--fasta",
            s(&fa),
            "--frag-len",
            "4",
            "--query",
            "ACXE",
            "--k",
            "1"
        ])
        .code,
        2
    );
    assert_eq!(
        fsindex(&[
            "search",
            "--fasta",
            "/nonexistent.fa",
            "--frag-len",
            "4",
            "--query",
            "ACDE",
            "--k",
            "1"
        ])
        .code,
        2
    );
    let idx = d.path().join("c.idx");
    ok(&["build", "--fasta", s(&fa), "--frag-len", "4", "--out", s(&idx)]);
    let o = fsindex(&[
        "search",
        "--fasta",
        s(&fa),
        "--index",
        s(&idx),
        "--frag-len",
        "5",
        "--query",
        "ACDEF",
        "--k",
        "1",
    ]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("fragment length"), "{}", o.stderr);
    let mut bad = fs::read(&idx).unwrap();
    bad[0] = b'X';
    fs::write(&idx, bad).unwrap();
    let o = fsindex(&[
        "search",
        "--fasta",
        s(&fa),
        "--index",
        s(&idx),
        "--query",
        "ACDE",
        "--k",
        "1",
    ]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("magic"), "{}", o.stderr);
}

#[test]
fn bench_rows_and_aggregates() {
    let d = TempDir::new().unwrap();
    let fa = corpus(d.path(), "c.fa", 10, 105, 10);
    let out = ok(&[
        "bench",
        "--fasta",
        s(&fa),
        "--frag-len",
        "6",
        "--random-queries",
        "50",
        "--k",
        "1,10",
        "--verify",
    ]);
    assert!(out.contains("fragments=1000\t"), "{}", &out[..200]);
    assert!(out.trim_end().ends_with("#verify\tsearches=200\tstatus=pass"));
    let rows: Vec<Vec<&str>> = out
        .lines()
        .skip_while(|l| *l != "#rows")
        .skip(2)
        .take_while(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').collect())
        .collect();
    assert_eq!(rows.len(), 200);
    for r in &rows {
        assert!(r[10].parse::<f64>().unwrap() >= 1.0, "overhead {r:?}");
        if r[2] == "range" {
            assert!(r[11].parse::<f64>().unwrap() >= 1.0, "bin ratio {r:?}");
        }
    }
    let agg: Vec<Vec<&str>> = out
        .lines()
        .skip_while(|l| *l != "#aggregate")
        .skip(2)
        .take_while(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').collect())
        .collect();
    assert_eq!(agg.len(), 4);
    for a in &agg {
        let g: Vec<&Vec<&str>> = rows.iter().filter(|r| r[1] == a[0] && r[2] == a[1]).collect();
        assert_eq!(a[2].parse::<usize>().unwrap(), g.len());
        for col in 4..=10 {
            let mean = g.iter().map(|r| r[col].parse::<f64>().unwrap()).sum::<f64>() / g.len() as f64;
            assert!((mean - a[col - 1].parse::<f64>().unwrap()).abs() < 1e-5, "column {col}");
        }
    }
    let again = ok(&[
        "bench",
        "--fasta",
        s(&fa),
        "--frag-len",
        "6",
        "--random-queries",
        "50",
        "--k",
        "1,10",
        "--verify",
    ]);
    assert_eq!(out, again);
}

#[test]
fn iterate_logs_and_writes_profiles() {
    let d = TempDir::new().unwrap();
    let al = Alphabet::protein();
    let motif = al.encode(b"WCWMHWCYW").unwrap();
    let mut rng = seeded(12);
    let mut frags = BackgroundModel::uniform(20).fragments(&mut rng, 9, 3000);
    frags.extend((0..50).map(|_| mutate(&mut rng, &motif, 20, 2)));
    let text: String = frags
        .iter()
        .enumerate()
        .map(|(i, f)| format!(">f{i}\n{}\n", al.decode(f)))
        .collect();
    let fa = d.path().join("c.fa");
    fs::write(&fa, text).unwrap();
    let dir = d.path().join("run");
    let out = ok(&[
        "iterate",
        "--fasta",
        s(&fa),
        "--frag-len",
        "9",
        "--sequence",
        "AWCWMHWCYWA",
        "--iterations",
        "3",
        "--out-dir",
        s(&dir),
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(fs::read_to_string(dir.join("iterate.log")).unwrap(), out);
    let motif_lines: Vec<&&str> = lines.iter().filter(|l| l.contains("\twindow=1\t")).collect();
    assert!(motif_lines.len() >= 2, "{out}");
    assert!(
        lines
            .iter()
            .any(|l| l.contains("\twindow=0\t") && l.ends_with("status=deactivated")),
        "{out}"
    );
    let p = fsindex_core::Pssm::from_tsv(&fs::read_to_string(dir.join("query.w1.pssm")).unwrap()).unwrap();
    assert_eq!(p.argmax(), motif);

    let short = fsindex(&["iterate", "--fasta", s(&fa), "--frag-len", "9", "--sequence", "ACDE"]);
    assert_eq!(short.code, 0);
    assert!(short.stdout.is_empty());
    assert!(short.stderr.contains("warning"));
}

#[test]
fn distexp_estimates() {
    let out = ok(&["distexp", "--generator", "cube", "--dim", "2", "--metric", "linf"]);
    assert!(out.contains("monomial_estimate\t2\n"), "{out}");
    let out = ok(&["distexp", "--generator", "cube", "--dim", "3"]);
    assert!(out.contains("monomial_estimate\t3\n"), "{out}");
    let d = TempDir::new().unwrap();
    let dump = d.path().join("cdf.tsv");
    ok(&[
        "distexp",
        "--generator",
        "cube",
        "--dim",
        "2",
        "--metric",
        "l2",
        "--cdf-out",
        s(&dump),
    ]);
    assert!(fs::read_to_string(&dump).unwrap().lines().count() > 100);

    let one = d.path().join("one.fa");
    fs::write(&one, ">a\nACDEF\n").unwrap();
    let o = fsindex(&["distexp", "--fasta", s(&one), "--frag-len", "5"]);
    assert_eq!(o.code, 2, "{}", o.stderr);
}

#[test]
fn audit_lists_failures() {
    let out = ok(&["audit"]);
    assert!(out.contains("BLOSUM62\t0\n"));
    assert!(out.contains("BLOSUM55\t2\n"));
    let out = ok(&["audit", "--matrix", "BLOSUM55", "--triples"]);
    let triples: Vec<&str> = out.lines().skip_while(|l| *l != "#triples").skip(2).collect();
    assert_eq!(triples.len(), 2);
    assert!(triples.iter().all(|t| {
        let mut c: Vec<&str> = t.split('\t').collect::<Vec<_>>()[1..4].to_vec();
        c.sort();
        c == ["A", "I", "V"]
    }));
}
