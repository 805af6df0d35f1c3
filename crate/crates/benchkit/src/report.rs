//! Plot-ready data files and a compression-ratio summary table.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::experiment::{Failure, Measurement, Record};
use crate::{BenchError, Result};

pub const RATIO_TABLE: &str = "ratios.txt";

/// Ordering key: method name, then parameterization with embedded numbers
/// compared by value (`k=4` before `k=32`).
fn key(method: &str, params: &str) -> (String, Vec<(String, u64)>) {
    let mut chunks = Vec::new();
    let mut rest = params;
    while !rest.is_empty() {
        let cut = rest
            .find(|c: char| c.is_ascii_digit())
            .unwrap_or(rest.len());
        let (text, tail) = rest.split_at(cut);
        let end = tail
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(tail.len());
        let (digits, tail) = tail.split_at(end);
        chunks.push((text.to_string(), digits.parse().unwrap_or(0)));
        rest = tail;
    }
    (method.to_string(), chunks)
}

/// Writes `<scenario>.<kind>.dat` (columns `label ratio_percent time_us`)
/// and the ratio table. Returns the files written.
pub fn write_report(ms: &[Measurement], failures: &[Failure], out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut files = Vec::new();

    let mut by_set: BTreeMap<(&str, &str), Vec<&Measurement>> = BTreeMap::new();
    for m in ms {
        by_set.entry((&m.scenario, &m.kind)).or_default().push(m);
    }
    for ((scenario, kind), mut rows) in by_set {
        rows.sort_by_key(|a| key(&a.method, &a.params));
        let mut s = String::from("# label ratio_percent time_us\n");
        for m in rows {
            s.push_str(&format!(
                "{} {:.4} {:.3}\n",
                m.label, m.ratio_percent, m.time_us
            ));
        }
        let f = out.join(format!("{scenario}.{kind}.dat"));
        fs::write(&f, s)?;
        files.push(f);
    }

    let f = out.join(RATIO_TABLE);
    fs::write(&f, ratio_table(ms, failures))?;
    files.push(f);
    Ok(files)
}

/// One row per built configuration and scenario: method, ratio,
/// parameterization. Failed builds appear as FAILED.
pub fn ratio_table(ms: &[Measurement], failures: &[Failure]) -> String {
    // scenario -> (method, params) -> ratio text
    type Key = (String, Vec<(String, u64)>);
    let mut rows: BTreeMap<&str, BTreeMap<Key, (String, String)>> = BTreeMap::new();
    for m in ms {
        rows.entry(&m.scenario).or_default().insert(
            key(&m.method, &m.params),
            (m.params.clone(), format!("{:.4}%", m.ratio_percent)),
        );
    }
    for f in failures {
        rows.entry(&f.scenario).or_default().insert(
            key(&f.method, &f.params),
            (f.params.clone(), "FAILED".into()),
        );
    }
    let mut s = String::from(
        "# Compression ratio = posting bytes / collection bytes x 100.\n\
         # No collection-specific scaling factor is applied.\n",
    );
    for (scenario, table) in rows {
        s.push_str(&format!(
            "\n[{scenario}]\n{:<16} {:>10}  {}\n",
            "Method", "Ratio", "Parameterization"
        ));
        for ((method, _), (params, ratio)) in table {
            s.push_str(format!("{method:<16} {ratio:>10}  {params}").trim_end());
            s.push('\n');
        }
    }
    s
}

/// Loads every `*.json` record in `dir` (one JSON record per line).
pub fn read_records(dir: &Path) -> Result<(Vec<Measurement>, Vec<Failure>)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut ms = Vec::new();
    let mut fs_ = Vec::new();
    for p in paths {
        for line in fs::read_to_string(&p)?
            .lines()
            .filter(|l| !l.trim().is_empty())
        {
            let rec: Record = serde_json::from_str(line).map_err(|e| BenchError::Format {
                what: "result record",
                msg: format!("{}: {e}", p.display()),
            })?;
            match rec {
                Record::Measurement(m) => ms.push(m),
                Record::Failure(f) => fs_.push(f),
            }
        }
    }
    Ok((ms, fs_))
}

/// Appends records as JSON lines.
pub fn write_records(path: &Path, records: &[Record]) -> Result<()> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("records serialize"));
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(method: &str, params: &str, kind: &str, ratio: f64) -> Measurement {
        Measurement {
            label: if params.is_empty() {
                method.into()
            } else {
                format!("{method}[{params}]")
            },
            method: method.into(),
            params: params.into(),
            scenario: "nonpos".into(),
            kind: kind.into(),
            ratio_percent: ratio,
            time_us: 1.5,
            queries: 10,
            results: 3,
            index_bytes: 1,
            collection_bytes: 100,
        }
    }

    #[test]
    fn files_rows_and_order() {
        let dir = tempfile::tempdir().unwrap();
        let ms = vec![
            m("Vbyte-CM", "k=32", "wa", 2.0),
            m("Vbyte-CM", "k=4", "wa", 3.0),
            m("Rice", "", "wa", 1.0),
            m("Rice", "", "wb", 1.0),
        ];
        let fail = Failure {
            label: "Vbyte-Lzend[ds=4]".into(),
            method: "Vbyte-Lzend".into(),
            params: "ds=4".into(),
            scenario: "nonpos".into(),
            error: "x".into(),
        };
        let files = write_report(&ms, &[fail], dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let wa = fs::read_to_string(dir.path().join("nonpos.wa.dat")).unwrap();
        let labels: Vec<&str> = wa
            .lines()
            .skip(1)
            .map(|l| l.split(' ').next().unwrap())
            .collect();
        assert_eq!(labels, ["Rice", "Vbyte-CM[k=4]", "Vbyte-CM[k=32]"]);
        let wb = fs::read_to_string(dir.path().join("nonpos.wb.dat")).unwrap();
        assert_eq!(wb.lines().count(), 2);
        let table = fs::read_to_string(dir.path().join(RATIO_TABLE)).unwrap();
        assert!(table.contains("scaling factor"));
        // Three built configurations plus one failure.
        let body: Vec<&str> = table
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .skip(2)
            .collect();
        assert_eq!(body.len(), 4);
        assert!(body.iter().any(|l| l.contains("FAILED")));
    }

    #[test]
    fn records_roundtrip_through_a_directory() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![Record::Measurement(m("Rice", "", "wa", 1.0))];
        write_records(&dir.path().join("a.json"), &recs).unwrap();
        let (ms, fs_) = read_records(dir.path()).unwrap();
        assert_eq!(ms.len(), 1);
        assert!(fs_.is_empty());
    }
}
