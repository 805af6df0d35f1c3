use std::fs;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use versidx::index::{Index, Method, MethodConfig, NonPosIndex, Scenario};
use versidx_bench::corpus::{self, CorpusSpec};
use versidx_bench::experiment::{default_configs, ratio_percent};
use versidx_bench::queries::{QueryItems, QueryKind, QuerySet};

fn small(seed: u64, base_docs: u32, versions: u32) -> CorpusSpec {
    CorpusSpec {
        seed,
        base_docs,
        versions,
        mutation_rate: 0.005,
        tokens: 300,
        vocab_size: 5000,
    }
}

fn repair_ratio(spec: &CorpusSpec) -> f64 {
    let c = corpus::generate(spec).unwrap();
    let idx = NonPosIndex::build(
        &c,
        MethodConfig::new(Method::RePair, Scenario::NonPositional),
    )
    .unwrap();
    let idx = Index::NonPos(idx);
    ratio_percent(idx.store().to_bytes().len() as u64, idx.collection_bytes())
}

#[test]
fn more_versions_compress_better() {
    // Same number of documents; only the share of near-duplicates differs.
    let flat = repair_ratio(&small(7, 200, 1));
    let versioned = repair_ratio(&small(7, 4, 50));
    assert!(
        versioned < flat,
        "versioned {versioned:.4}% vs flat {flat:.4}%"
    );
}

#[test]
fn generation_is_deterministic() {
    let spec = small(11, 3, 5);
    let a = corpus::generate(&spec).unwrap();
    let b = corpus::generate(&spec).unwrap();
    assert_eq!(a.text(), b.text());
    assert_eq!(a.starts(), b.starts());
    let c = corpus::generate(&small(12, 3, 5)).unwrap();
    assert_ne!(a.text(), c.text());
}

fn bench(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_versidx-bench"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .count()
}

#[test]
fn cli_pipeline_produces_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |s: &str| tmp.path().join(s);
    let s = |q: &Path| q.to_str().unwrap().to_string();
    bench(&[
        "gen-corpus",
        "--base-docs",
        "3",
        "--versions",
        "4",
        "--tokens",
        "200",
        "--vocab",
        "2000",
        "--out",
        &s(&p("corpus")),
    ]);

    // Single-configuration path: build, generate queries, search, report.
    let out = bench(&[
        "build",
        "--corpus",
        &s(&p("corpus")),
        "--scenario",
        "pos",
        "--method",
        "RePair-Skip-CM",
        "--param",
        "k=4",
        "--sample-ct",
        "8",
        "--out",
        &s(&p("idx")),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains('%'));
    bench(&[
        "gen-queries",
        "--index",
        &s(&p("idx")),
        "--kind",
        "phrase2",
        "--count",
        "20",
        "--out",
        &s(&p("q.txt")),
    ]);
    let set = QuerySet::read(&p("q.txt")).unwrap();
    assert_eq!(set.kind, QueryKind::Phrase2);
    assert_eq!(set.items.len(), 20);
    fs::create_dir(p("records")).unwrap();
    bench(&[
        "search",
        "--index",
        &s(&p("idx")),
        "--queries",
        &s(&p("q.txt")),
        "--reps",
        "1",
        "--out",
        &s(&p("records/one.json")),
    ]);
    bench(&["report", "--in", &s(&p("records")), "--out", &s(&p("rep1"))]);
    assert_eq!(data_rows(&p("rep1/pos.phrase2.dat")), 1);

    // Whole-scenario path: one row per default configuration in every file.
    bench(&[
        "run",
        "--corpus",
        &s(&p("corpus")),
        "--scenario",
        "nonpos",
        "--count",
        "10",
        "--reps",
        "1",
        "--work",
        &s(&p("work")),
        "--out",
        &s(&p("rep2")),
    ]);
    let n = default_configs(Scenario::NonPositional).len();
    for kind in ["wa", "wb", "phrase2", "phrase5"] {
        assert_eq!(
            data_rows(&p(&format!("rep2/nonpos.{kind}.dat"))),
            n,
            "{kind}"
        );
    }
    let table = fs::read_to_string(p("rep2/ratios.txt")).unwrap();
    assert!(table.contains("[nonpos]") && table.contains("Rice-Runs"));
    assert!(!table.contains("FAILED"));
}

#[test]
fn bad_arguments_fail() {
    let out = Command::new(env!("CARGO_BIN_EXE_versidx-bench"))
        .args([
            "build",
            "--corpus",
            "/nonexistent",
            "--scenario",
            "nonpos",
            "--method",
            "Rice",
            "--out",
            "/tmp/x",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_versidx-bench"))
        .args(["run", "--scenario", "sideways"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

fn query_set() -> impl Strategy<Value = QuerySet> {
    let words = prop::collection::vec("[a-z0-9]{1,8}( [a-z0-9]{1,8}){0,4}", 0..30)
        .prop_map(QueryItems::Patterns);
    let ranges = prop::collection::vec((any::<u32>(), any::<u32>()), 0..30).prop_map(|v| {
        QueryItems::Ranges(
            v.into_iter()
                .map(|(a, b)| (u64::from(a), u64::from(b)))
                .collect(),
        )
    });
    (
        prop::sample::select(QueryKind::ALL.to_vec()),
        words,
        ranges,
        prop::collection::vec("[a-z ]{1,20}", 0..3),
    )
        .prop_map(|(kind, w, r, warnings)| QuerySet {
            kind,
            items: if kind.is_extract() { r } else { w },
            warnings: warnings
                .into_iter()
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn query_files_roundtrip(set in query_set()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.txt");
        set.write(&path).unwrap();
        prop_assert_eq!(QuerySet::read(&path).unwrap(), set);
    }
}
