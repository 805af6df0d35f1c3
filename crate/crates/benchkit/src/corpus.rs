//! Deterministic versioned corpora: base documents drawn from a Zipf-like
//! vocabulary, each followed by versions derived from its predecessor by
//! token substitutions, insertions and deletions.

use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use versidx::index::Corpus;

use crate::{BenchError, Result};

pub const TEXT_FILE: &str = "corpus.txt";
pub const MANIFEST_FILE: &str = "corpus.json";

/// Flattening of the frequency curve's head: rank `r` gets weight
/// `1 / (r + ZIPF_SHIFT)`, which leaves enough words on both sides of a
/// 1,000-occurrence threshold at desk scale.
const ZIPF_SHIFT: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub base_docs: u32,
    pub versions: u32,
    /// Fraction of a version's tokens edited relative to its predecessor.
    pub mutation_rate: f64,
    /// Tokens per base document.
    pub tokens: u32,
    pub vocab_size: u32,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            seed: 42,
            base_docs: 100,
            versions: 50,
            mutation_rate: 0.005,
            tokens: 2000,
            vocab_size: 50_000,
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_docs == 0 || self.versions == 0 || self.tokens == 0 || self.vocab_size == 0 {
            return Err(BenchError::Spec("counts must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(BenchError::Spec("mutation rate must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Word for vocabulary rank `r`: bijective base-26 over `a..z`, so frequent
/// words are short.
pub fn word(mut r: u32) -> String {
    let mut out = Vec::new();
    r += 1;
    while r > 0 {
        r -= 1;
        out.push(b'a' + (r % 26) as u8);
        r /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ASCII")
}

fn mutate(tokens: &mut Vec<u32>, edits: usize, rng: &mut ChaCha8Rng, dist: &WeightedIndex<f64>) {
    for _ in 0..edits {
        match rng.gen_range(0..3) {
            0 if !tokens.is_empty() => {
                let i = rng.gen_range(0..tokens.len());
                tokens[i] = dist.sample(rng) as u32;
            }
            1 => {
                let i = rng.gen_range(0..=tokens.len());
                tokens.insert(i, dist.sample(rng) as u32);
            }
            _ if tokens.len() > 1 => {
                let i = rng.gen_range(0..tokens.len());
                tokens.remove(i);
            }
            _ => {}
        }
    }
}

/// Documents in order: every base document followed by its later versions.
pub fn generate(spec: &CorpusSpec) -> Result<Corpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dist = WeightedIndex::new((0..spec.vocab_size).map(|r| 1.0 / (f64::from(r) + ZIPF_SHIFT)))
        .map_err(|e| BenchError::Spec(e.to_string()))?;
    let words: Vec<String> = (0..spec.vocab_size).map(word).collect();
    let mut text = Vec::new();
    let mut starts = Vec::new();
    for _ in 0..spec.base_docs {
        let mut tokens: Vec<u32> = (0..spec.tokens)
            .map(|_| dist.sample(&mut rng) as u32)
            .collect();
        for v in 0..spec.versions {
            if v > 0 {
                let edits = (spec.mutation_rate * tokens.len() as f64).ceil() as usize;
                mutate(&mut tokens, edits, &mut rng, &dist);
            }
            starts.push(text.len() as u32);
            for (i, &t) in tokens.iter().enumerate() {
                if i > 0 {
                    text.push(b' ');
                }
                text.extend_from_slice(words[t as usize].as_bytes());
            }
            text.push(b'\n');
        }
    }
    Ok(Corpus::new(text, starts)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    spec: Option<CorpusSpec>,
    bytes: u64,
    doc_starts: Vec<u32>,
}

pub fn write(dir: &Path, corpus: &Corpus, spec: Option<&CorpusSpec>) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(TEXT_FILE), corpus.text())?;
    let m = Manifest {
        spec: spec.cloned(),
        bytes: corpus.text().len() as u64,
        doc_starts: corpus.starts().to_vec(),
    };
    fs::write(
        dir.join(MANIFEST_FILE),
        serde_json::to_string(&m).map_err(|e| BenchError::Format {
            what: "corpus manifest",
            msg: e.to_string(),
        })?,
    )?;
    Ok(())
}

pub fn read(dir: &Path) -> Result<Corpus> {
    let text = fs::read(dir.join(TEXT_FILE))?;
    let m: Manifest = serde_json::from_slice(&fs::read(dir.join(MANIFEST_FILE))?).map_err(|e| {
        BenchError::Format {
            what: "corpus manifest",
            msg: e.to_string(),
        }
    })?;
    if m.bytes != text.len() as u64 {
        return Err(BenchError::Format {
            what: "corpus manifest",
            msg: format!("records {} bytes, text has {}", m.bytes, text.len()),
        });
    }
    Ok(Corpus::new(text, m.doc_starts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64, versions: u32, rate: f64) -> CorpusSpec {
        CorpusSpec {
            seed,
            base_docs: 3,
            versions,
            mutation_rate: rate,
            tokens: 200,
            vocab_size: 500,
        }
    }

    #[test]
    fn words_are_short_for_frequent_ranks() {
        assert_eq!(word(0), "a");
        assert_eq!(word(25), "z");
        assert_eq!(word(26), "aa");
        assert_eq!(word(26 + 26 * 26), "aaa");
    }

    #[test]
    fn single_version_gives_base_docs() {
        let c = generate(&small(1, 1, 0.1)).unwrap();
        assert_eq!(c.num_docs(), 3);
    }

    #[test]
    fn zero_rate_repeats_versions() {
        let c = generate(&small(1, 4, 0.0)).unwrap();
        assert_eq!(c.num_docs(), 12);
        for v in 1..4 {
            assert_eq!(c.doc(v), c.doc(0));
            assert_eq!(c.doc(4 + v), c.doc(4));
        }
        assert_ne!(c.doc(0), c.doc(4));
    }

    #[test]
    fn deterministic_and_persistent() {
        let spec = small(9, 5, 0.05);
        let a = generate(&spec).unwrap();
        assert_eq!(a, generate(&spec).unwrap());
        assert_ne!(a.doc(0), a.doc(1));
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), &a, Some(&spec)).unwrap();
        assert_eq!(read(dir.path()).unwrap(), a);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(generate(&small(1, 0, 0.1)).is_err());
        assert!(generate(&small(1, 2, 1.5)).is_err());
    }
}
