//! Builds index configurations over one corpus and times query sets
//! against them.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use versidx::index::{
    parse_query, Analysis, Corpus, Index, Method, MethodConfig, NonPosIndex, PosIndex, Scenario,
    POSTINGS_FILE,
};
use versidx::postings::IntersectStats;
use versidx::text::TextStore;

use crate::cpu;
use crate::queries::{QueryItems, QueryKind, QuerySet};
use crate::{BenchError, Result};

pub const DEFAULT_REPS: usize = 5;
pub const DEFAULT_SAMPLE_CT: u32 = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub label: String,
    pub method: String,
    pub params: String,
    pub scenario: String,
    pub kind: String,
    /// Index bytes over collection bytes, times 100.
    pub ratio_percent: f64,
    /// Median CPU user time per query, in microseconds.
    pub time_us: f64,
    pub queries: usize,
    /// Total answers over one pass of the set.
    pub results: u64,
    pub index_bytes: u64,
    pub collection_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub label: String,
    pub method: String,
    pub params: String,
    pub scenario: String,
    pub error: String,
}

/// One line of a results directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum Record {
    Measurement(Measurement),
    Failure(Failure),
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub measurements: Vec<Measurement>,
    pub failures: Vec<Failure>,
    pub warnings: Vec<String>,
}

pub fn ratio_percent(index_bytes: u64, collection_bytes: u64) -> f64 {
    index_bytes as f64 / collection_bytes.max(1) as f64 * 100.0
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// The configurations swept by a full run, per scenario.
pub fn default_configs(scenario: Scenario) -> Vec<MethodConfig> {
    let with = |m: Method, kv: &[(&str, &str)]| {
        let mut c = MethodConfig::new(m, scenario);
        for (k, v) in kv {
            c.set(k, v).expect("valid preset");
        }
        c
    };
    let plain = |m: Method| MethodConfig::new(m, scenario);
    match scenario {
        Scenario::NonPositional => vec![
            plain(Method::Rice),
            plain(Method::RiceB),
            plain(Method::RiceRuns),
            plain(Method::Vbyte),
            plain(Method::VbyteB),
            with(Method::VbyteCm, &[("k", "4")]),
            with(Method::VbyteCm, &[("k", "32")]),
            with(Method::VbyteCmB, &[("k", "4")]),
            with(Method::VbyteCmB, &[("k", "32")]),
            with(Method::VbyteSt, &[("B", "16")]),
            with(Method::VbyteSt, &[("B", "128")]),
            with(Method::VbyteStB, &[("B", "16")]),
            with(Method::VbyteStB, &[("B", "128")]),
            plain(Method::Simple9),
            plain(Method::PforDelta),
            plain(Method::VbyteLzma),
            with(Method::VbyteLzend, &[("ds", "4")]),
            with(Method::VbyteLzend, &[("ds", "16")]),
            with(Method::VbyteLzend, &[("ds", "64")]),
            with(Method::VbyteLzend, &[("ds", "256")]),
            plain(Method::RePair),
            plain(Method::RePairSkip),
            with(Method::RePairSkipCm, &[("k", "1")]),
            with(Method::RePairSkipCm, &[("k", "64")]),
            with(Method::RePairSkipSt, &[("B", "1024")]),
        ],
        Scenario::Positional => vec![
            plain(Method::Rice),
            plain(Method::Vbyte),
            with(Method::VbyteCm, &[("k", "4")]),
            with(Method::VbyteCm, &[("k", "32")]),
            with(Method::VbyteSt, &[("B", "16")]),
            with(Method::VbyteSt, &[("B", "64")]),
            with(Method::VbyteSt, &[("B", "128")]),
            plain(Method::Simple9),
            plain(Method::VbyteLzma),
            plain(Method::RePair),
            plain(Method::RePairSkip),
            with(Method::RePairSkipCm, &[("k", "1")]),
            with(Method::RePairSkipCm, &[("k", "64")]),
            with(Method::RePairSkipSt, &[("B", "256")]),
        ],
    }
}

/// Size of the serialized posting segment of a saved index.
pub fn postings_file_bytes(dir: &Path) -> Result<u64> {
    Ok(fs::metadata(dir.join(POSTINGS_FILE))?.len())
}

/// Runs a query set `reps` times and returns the median CPU time per query
/// in microseconds and the answer count of one pass.
///
/// Non-positional patterns are mapped to ids before timing starts, and
/// multi-word patterns are AND queries. Positional timing covers parsing,
/// intersection and mapping occurrences to documents.
pub fn time_query_set(index: &Index, set: &QuerySet, reps: usize) -> Result<(f64, u64)> {
    if set.items.is_empty() {
        return Ok((0.0, 0));
    }
    let reps = reps.max(1);
    let n = set.items.len() as f64;
    let mut totals = Vec::with_capacity(reps);
    let mut results = 0u64;
    match (index, &set.items) {
        (Index::NonPos(idx), QueryItems::Patterns(ps)) => {
            let ids: Vec<Vec<Option<u32>>> =
                ps.iter().map(|p| parse_query(p, &idx.vocab)).collect();
            for _ in 0..reps {
                let (r, t) = cpu::measure(|| -> Result<u64> {
                    let mut stats = IntersectStats::default();
                    let mut found = 0u64;
                    for q in &ids {
                        found += idx.locate_and(q, &mut stats)?.len() as u64;
                    }
                    Ok(found)
                });
                results = r?;
                totals.push(t.as_secs_f64());
            }
        }
        (Index::Pos(idx), QueryItems::Patterns(ps)) => {
            for _ in 0..reps {
                let (r, t) = cpu::measure(|| -> Result<u64> {
                    let mut stats = IntersectStats::default();
                    let mut found = 0u64;
                    for p in ps {
                        let q = parse_query(p, &idx.vocab);
                        found += idx.locate_phrase(&q, &mut stats)?.len() as u64;
                    }
                    Ok(found)
                });
                results = r?;
                totals.push(t.as_secs_f64());
            }
        }
        (Index::Pos(idx), QueryItems::Ranges(rs)) => {
            for _ in 0..reps {
                let (r, t) = cpu::measure(|| -> Result<u64> {
                    let mut bytes = 0u64;
                    for &(a, len) in rs {
                        bytes += idx.extract(a, a + len)?.len() as u64;
                    }
                    Ok(bytes)
                });
                results = r?;
                totals.push(t.as_secs_f64());
            }
        }
        (Index::NonPos(_), QueryItems::Ranges(_)) => {
            return Err(BenchError::Spec(
                "extraction needs a positional index".into(),
            ))
        }
    }
    Ok((median(totals) / n * 1e6, results))
}

pub struct Experiment<'a> {
    pub corpus: &'a Corpus,
    pub scenario: Scenario,
    pub configs: Vec<MethodConfig>,
    pub query_sets: Vec<QuerySet>,
    pub reps: usize,
    pub sample_ct: u32,
    /// Each configuration is saved under a subdirectory named by its label.
    pub work_dir: &'a Path,
}

impl Experiment<'_> {
    /// Builds and measures every configuration in turn. A configuration
    /// that fails to build or query becomes a failure record with a
    /// warning; the run carries on.
    pub fn run(&self) -> Result<Outcome> {
        let positional = self.scenario == Scenario::Positional;
        let analysis = Analysis::new(self.corpus, positional)?;
        let text = if positional {
            Some(TextStore::build(self.corpus.text(), self.sample_ct)?)
        } else {
            None
        };
        let mut out = Outcome::default();
        for set in &self.query_sets {
            if set.kind.is_extract() && !positional {
                out.warnings
                    .push(format!("skipping {} on a non-positional index", set.kind));
            }
            for w in &set.warnings {
                out.warnings.push(format!("{}: {w}", set.kind));
            }
        }
        for cfg in &self.configs {
            let label = cfg.label();
            let dir = self.work_dir.join(sanitize(&label));
            let measured = (|| -> Result<Vec<Measurement>> {
                let index = match &text {
                    Some(t) => Index::Pos(PosIndex::from_analysis(&analysis, *cfg, t.clone())?),
                    None => Index::NonPos(NonPosIndex::from_analysis(&analysis, *cfg)?),
                };
                index.save(&dir)?;
                let index_bytes = postings_file_bytes(&dir)?;
                let collection_bytes = index.collection_bytes();
                let mut ms = Vec::new();
                for set in &self.query_sets {
                    if set.kind.is_extract() && !positional {
                        continue;
                    }
                    let (time_us, results) = time_query_set(&index, set, self.reps)?;
                    ms.push(Measurement {
                        label: label.clone(),
                        method: cfg.method.name().to_string(),
                        params: cfg.params(),
                        scenario: self.scenario.name().to_string(),
                        kind: set.kind.name().to_string(),
                        ratio_percent: ratio_percent(index_bytes, collection_bytes),
                        time_us,
                        queries: set.items.len(),
                        results,
                        index_bytes,
                        collection_bytes,
                    });
                }
                Ok(ms)
            })();
            match measured {
                Ok(ms) => out.measurements.extend(ms),
                Err(e) => {
                    out.warnings.push(format!("{label} FAILED: {e}"));
                    out.failures.push(Failure {
                        label,
                        method: cfg.method.name().to_string(),
                        params: cfg.params(),
                        scenario: self.scenario.name().to_string(),
                        error: e.to_string(),
                    });
                }
            }
        }
        Ok(out)
    }
}

/// A directory-safe rendering of a configuration label.
pub fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Kinds that make sense for a scenario.
pub fn kinds_for(scenario: Scenario) -> Vec<QueryKind> {
    QueryKind::ALL
        .into_iter()
        .filter(|k| scenario == Scenario::Positional || !k.is_extract())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_and_ratio_arithmetic() {
        assert_eq!(median(vec![5.0, 1.0, 3.0, 9.0, 7.0]), 5.0);
        assert_eq!(median(vec![4.0, 2.0]), 3.0);
        assert_eq!(ratio_percent(5, 1000), 0.5);
        // 1,000 queries in 0.5 s is 500 µs each.
        assert_eq!(0.5 / 1000.0 * 1e6, 500.0);
    }

    #[test]
    fn labels_are_unique_per_scenario() {
        for s in [Scenario::NonPositional, Scenario::Positional] {
            let mut labels: Vec<String> =
                default_configs(s).iter().map(MethodConfig::label).collect();
            let n = labels.len();
            labels.sort();
            labels.dedup();
            assert_eq!(labels.len(), n);
        }
    }

    #[test]
    fn records_serialize_with_a_tag() {
        let f = Record::Failure(Failure {
            label: "x".into(),
            method: "Vbyte".into(),
            params: String::new(),
            scenario: "nonpos".into(),
            error: "boom".into(),
        });
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"record\":\"failure\""));
        assert_eq!(serde_json::from_str::<Record>(&s).unwrap(), f);
    }
}
