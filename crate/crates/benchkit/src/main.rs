use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use versidx::index::{
    Analysis, Corpus, Index, Method, MethodConfig, NonPosIndex, PosIndex, Scenario,
};
use versidx_bench::corpus::{self, CorpusSpec};
use versidx_bench::experiment::{
    postings_file_bytes, ratio_percent, time_query_set, Experiment, Measurement, Record,
    DEFAULT_REPS, DEFAULT_SAMPLE_CT,
};
use versidx_bench::queries::{gen_queries, QueryKind, QuerySet, QuerySource};
use versidx_bench::report::{read_records, write_records, write_report};
use versidx_bench::{BenchError, Result};

#[derive(Parser)]
#[command(
    name = "versidx-bench",
    about = "Versioned-collection index experiments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic versioned corpus.
    GenCorpus {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        base_docs: u32,
        #[arg(long, default_value_t = 50)]
        versions: u32,
        #[arg(long, default_value_t = 0.005)]
        mutation_rate: f64,
        #[arg(long, default_value_t = 2000)]
        tokens: u32,
        #[arg(long, default_value_t = 50_000)]
        vocab: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build one index configuration over a corpus.
    Build {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        scenario: Scenario,
        #[arg(long)]
        method: Method,
        /// Method parameter as KEY=VALUE; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Text sampling period for positional indexes.
        #[arg(long, default_value_t = DEFAULT_SAMPLE_CT)]
        sample_ct: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a query set from a built index.
    GenQueries {
        #[arg(long)]
        index: PathBuf,
        /// Corpus directory; needed for phrase and extract sets on a
        /// non-positional index, which keeps no text.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        kind: QueryKind,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time a query set against an index; writes one JSON record.
    Search {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn a directory of JSON records into data files and a ratio table.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and time every default configuration of a scenario, then report.
    Run {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        scenario: Scenario,
        /// Query files; defaults to freshly generated sets of every kind.
        #[arg(long = "queries")]
        queries: Vec<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_CT)]
        sample_ct: u32,
        /// Where built indexes go.
        #[arg(long)]
        work: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::GenCorpus {
            seed,
            base_docs,
            versions,
            mutation_rate,
            tokens,
            vocab,
            out,
        } => {
            let spec = CorpusSpec {
                seed,
                base_docs,
                versions,
                mutation_rate,
                tokens,
                vocab_size: vocab,
            };
            let c = corpus::generate(&spec)?;
            corpus::write(&out, &c, Some(&spec))?;
            println!("{} documents, {} bytes", c.num_docs(), c.text().len());
        }
        Cmd::Build {
            corpus: dir,
            scenario,
            method,
            params,
            sample_ct,
            out,
        } => {
            let c = corpus::read(&dir)?;
            let cfg = config(method, scenario, &params)?;
            let index = match scenario {
                Scenario::NonPositional => Index::NonPos(NonPosIndex::build(&c, cfg)?),
                Scenario::Positional => Index::Pos(PosIndex::build(&c, cfg, sample_ct)?),
            };
            index.save(&out)?;
            let bytes = postings_file_bytes(&out)?;
            println!(
                "{}: {bytes} posting bytes, ratio {:.4}%",
                cfg.label(),
                ratio_percent(bytes, index.collection_bytes())
            );
        }
        Cmd::GenQueries {
            index,
            corpus: corpus_dir,
            kind,
            count,
            seed,
            out,
        } => {
            let index = Index::load(&index)?;
            let set = queries_from(&index, corpus_dir.as_deref(), kind, count, seed)?;
            set.warnings.iter().for_each(|w| warn(w));
            set.write(&out)?;
            println!("{} {kind} queries", set.items.len());
        }
        Cmd::Search {
            index: dir,
            queries,
            reps,
            out,
        } => {
            let index = Index::load(&dir)?;
            let set = QuerySet::read(&queries)?;
            set.warnings.iter().for_each(|w| warn(w));
            let (time_us, results) = time_query_set(&index, &set, reps)?;
            let index_bytes = postings_file_bytes(&dir)?;
            let cfg = index.config();
            let m = Measurement {
                label: cfg.label(),
                method: cfg.method.name().to_string(),
                params: cfg.params(),
                scenario: index.scenario().name().to_string(),
                kind: set.kind.name().to_string(),
                ratio_percent: ratio_percent(index_bytes, index.collection_bytes()),
                time_us,
                queries: set.items.len(),
                results,
                index_bytes,
                collection_bytes: index.collection_bytes(),
            };
            println!(
                "{} {} {:.4} {:.3}",
                m.label, m.kind, m.ratio_percent, m.time_us
            );
            write_records(&out, &[Record::Measurement(m)])?;
        }
        Cmd::Report { input, out } => {
            let (ms, failures) = read_records(&input)?;
            if ms.is_empty() && failures.is_empty() {
                return Err(BenchError::Spec(format!(
                    "no records in {}",
                    input.display()
                )));
            }
            for f in &failures {
                warn(&format!("{} FAILED: {}", f.label, f.error));
            }
            for f in write_report(&ms, &failures, &out)? {
                println!("{}", f.display());
            }
        }
        Cmd::Run {
            corpus: dir,
            scenario,
            queries,
            count,
            seed,
            reps,
            sample_ct,
            work,
            out,
        } => {
            let c = corpus::read(&dir)?;
            let sets = if queries.is_empty() {
                generated_sets(&c, scenario, count, seed)?
            } else {
                queries
                    .iter()
                    .map(|q| QuerySet::read(q))
                    .collect::<Result<_>>()?
            };
            let exp = Experiment {
                corpus: &c,
                scenario,
                configs: versidx_bench::experiment::default_configs(scenario),
                query_sets: sets,
                reps,
                sample_ct,
                work_dir: &work,
            };
            let outcome = exp.run()?;
            fs::create_dir_all(&out)?;
            let records: Vec<Record> = outcome
                .measurements
                .iter()
                .cloned()
                .map(Record::Measurement)
                .chain(outcome.failures.iter().cloned().map(Record::Failure))
                .collect();
            write_records(&out.join(format!("{}.json", scenario.name())), &records)?;
            for f in write_report(&outcome.measurements, &outcome.failures, &out)? {
                println!("{}", f.display());
            }
            for w in &outcome.warnings {
                warn(w);
            }
            if !outcome.warnings.is_empty() {
                eprintln!("{} warnings", outcome.warnings.len());
            }
        }
    }
    Ok(())
}

fn config(method: Method, scenario: Scenario, params: &[String]) -> Result<MethodConfig> {
    let mut cfg = MethodConfig::new(method, scenario);
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| BenchError::Spec(format!("parameter {p:?} is not KEY=VALUE")))?;
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

fn queries_from(
    index: &Index,
    corpus_dir: Option<&Path>,
    kind: QueryKind,
    count: usize,
    seed: u64,
) -> Result<QuerySet> {
    let needs_text = kind != QueryKind::Wa && kind != QueryKind::Wb;
    let (text, starts): (Vec<u8>, Vec<u32>) = match (index, corpus_dir) {
        (_, Some(dir)) => {
            let c = corpus::read(dir)?;
            (c.text().to_vec(), c.starts().to_vec())
        }
        (Index::Pos(p), None) => (
            p.text.extract(0, p.text.len())?,
            p.docs.char_starts().to_vec(),
        ),
        (Index::NonPos(_), None) if needs_text => {
            return Err(BenchError::Spec(format!(
                "{kind} queries on a non-positional index need --corpus"
            )))
        }
        (Index::NonPos(_), None) => (Vec::new(), Vec::new()),
    };
    let src = QuerySource {
        vocab: index.vocab(),
        text: &text,
        doc_starts: &starts,
    };
    Ok(gen_queries(&src, kind, count, seed))
}

fn generated_sets(
    c: &Corpus,
    scenario: Scenario,
    count: usize,
    seed: u64,
) -> Result<Vec<QuerySet>> {
    let vocab = Analysis::new(c, false)?.vocab;
    let src = QuerySource {
        vocab: &vocab,
        text: c.text(),
        doc_starts: c.starts(),
    };
    Ok(versidx_bench::experiment::kinds_for(scenario)
        .into_iter()
        .enumerate()
        .map(|(i, k)| gen_queries(&src, k, count, seed + i as u64))
        .collect())
}
