//! Query sets: single words split by frequency, phrases taken from the
//! text, and extraction intervals inside documents.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use versidx::index::{tokenize, Vocabulary};

use crate::{BenchError, Result};

/// Words below this many occurrences are low-frequency.
pub const FREQ_THRESHOLD: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QueryKind {
    Wa,
    Wb,
    Phrase2,
    Phrase5,
    Extract80,
    Extract13000,
}

impl QueryKind {
    pub const ALL: [QueryKind; 6] = [
        QueryKind::Wa,
        QueryKind::Wb,
        QueryKind::Phrase2,
        QueryKind::Phrase5,
        QueryKind::Extract80,
        QueryKind::Extract13000,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Wa => "wa",
            QueryKind::Wb => "wb",
            QueryKind::Phrase2 => "phrase2",
            QueryKind::Phrase5 => "phrase5",
            QueryKind::Extract80 => "extract80",
            QueryKind::Extract13000 => "extract13000",
        }
    }

    pub fn is_extract(self) -> bool {
        matches!(self, QueryKind::Extract80 | QueryKind::Extract13000)
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        QueryKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| BenchError::Spec(format!("unknown query kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryItems {
    Patterns(Vec<String>),
    /// (start, length) in characters.
    Ranges(Vec<(u64, u64)>),
}

impl QueryItems {
    pub fn len(&self) -> usize {
        match self {
            QueryItems::Patterns(p) => p.len(),
            QueryItems::Ranges(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySet {
    pub kind: QueryKind,
    pub items: QueryItems,
    pub warnings: Vec<String>,
}

/// What query generation needs from a collection.
pub struct QuerySource<'a> {
    pub vocab: &'a Vocabulary,
    pub text: &'a [u8],
    /// Character offset of each document.
    pub doc_starts: &'a [u32],
}

impl QuerySource<'_> {
    fn doc(&self, d: usize) -> (u64, u64) {
        let end = self
            .doc_starts
            .get(d + 1)
            .map_or(self.text.len() as u64, |&e| u64::from(e));
        (u64::from(self.doc_starts[d]), end)
    }
}

pub fn gen_queries(src: &QuerySource, kind: QueryKind, count: usize, seed: u64) -> QuerySet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut warnings = Vec::new();
    let items = match kind {
        QueryKind::Wa | QueryKind::Wb => {
            let low = kind == QueryKind::Wa;
            let eligible: Vec<u32> = (0..src.vocab.len() as u32)
                .filter(|&id| (src.vocab.freq(id) < FREQ_THRESHOLD) == low)
                .collect();
            if eligible.len() < count {
                warnings.push(format!(
                    "only {} eligible words for {kind}; emitting all of them",
                    eligible.len()
                ));
            }
            let n = count.min(eligible.len());
            QueryItems::Patterns(
                sample(&mut rng, eligible.len(), n)
                    .into_iter()
                    .map(|i| src.vocab.word(eligible[i]).to_string())
                    .collect(),
            )
        }
        QueryKind::Phrase2 | QueryKind::Phrase5 => {
            let k = if kind == QueryKind::Phrase2 { 2 } else { 5 };
            let docs: Vec<Vec<&[u8]>> = (0..src.doc_starts.len())
                .map(|d| {
                    let (s, e) = src.doc(d);
                    tokenize(&src.text[s as usize..e as usize])
                        .map(|t| t.word)
                        .collect()
                })
                .collect();
            let eligible: Vec<usize> = (0..docs.len()).filter(|&d| docs[d].len() >= k).collect();
            let mut out = Vec::with_capacity(count);
            if eligible.is_empty() {
                warnings.push(format!("no document has {k} words"));
            } else {
                for _ in 0..count {
                    let d = &docs[eligible[rng.gen_range(0..eligible.len())]];
                    let at = rng.gen_range(0..=d.len() - k);
                    let words: Vec<&str> = d[at..at + k]
                        .iter()
                        .map(|w| std::str::from_utf8(w).expect("ASCII token"))
                        .collect();
                    out.push(words.join(" "));
                }
            }
            QueryItems::Patterns(out)
        }
        QueryKind::Extract80 | QueryKind::Extract13000 => {
            let width = if kind == QueryKind::Extract80 {
                80
            } else {
                13_000
            };
            let mut out = Vec::with_capacity(count);
            let mut clamped = 0;
            if src.doc_starts.is_empty() {
                warnings.push("no documents".into());
            } else {
                for _ in 0..count {
                    let (s, e) = src.doc(rng.gen_range(0..src.doc_starts.len()));
                    if e - s >= width {
                        out.push((rng.gen_range(s..=e - width), width));
                    } else {
                        clamped += 1;
                        out.push((s, e - s));
                    }
                }
            }
            if clamped > 0 {
                warnings.push(format!("{clamped} intervals clamped to shorter documents"));
            }
            QueryItems::Ranges(out)
        }
    };
    QuerySet {
        kind,
        items,
        warnings,
    }
}

impl QuerySet {
    /// `# kind=<kind>` header, `# warning: ...` lines, then one pattern or
    /// one `start length` pair per line.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = format!("# kind={}\n", self.kind);
        for w in &self.warnings {
            s.push_str(&format!("# warning: {w}\n"));
        }
        match &self.items {
            QueryItems::Patterns(p) => p.iter().for_each(|q| {
                s.push_str(q);
                s.push('\n');
            }),
            QueryItems::Ranges(r) => r
                .iter()
                .for_each(|(a, l)| s.push_str(&format!("{a} {l}\n"))),
        }
        fs::write(path, s)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let bad = |msg: String| BenchError::Format {
            what: "query file",
            msg,
        };
        let mut lines = text.lines();
        let kind: QueryKind = lines
            .next()
            .and_then(|l| l.strip_prefix("# kind="))
            .ok_or_else(|| bad("missing kind header".into()))?
            .parse()?;
        let mut warnings = Vec::new();
        let mut patterns = Vec::new();
        let mut ranges = Vec::new();
        for l in lines {
            if let Some(w) = l.strip_prefix("# warning: ") {
                warnings.push(w.to_string());
            } else if l.starts_with('#') {
                continue;
            } else if kind.is_extract() {
                let mut it = l.split_whitespace().map(str::parse::<u64>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(a)), Some(Ok(n)), None) => ranges.push((a, n)),
                    _ => return Err(bad(format!("bad interval line {l:?}"))),
                }
            } else {
                patterns.push(l.to_string());
            }
        }
        Ok(QuerySet {
            kind,
            items: if kind.is_extract() {
                QueryItems::Ranges(ranges)
            } else {
                QueryItems::Patterns(patterns)
            },
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use versidx::index::{Analysis, Corpus};

    fn fixture() -> (Corpus, Vocabulary) {
        let docs: Vec<String> = (0..20)
            .map(|i| format!("common w{i} common x{} tail", i % 3))
            .collect();
        let c = Corpus::from_docs(&docs).unwrap();
        let v = Analysis::new(&c, false).unwrap().vocab;
        (c, v)
    }

    #[test]
    fn frequency_split_and_warning() {
        let (c, v) = fixture();
        let src = QuerySource {
            vocab: &v,
            text: c.text(),
            doc_starts: c.starts(),
        };
        let wa = gen_queries(&src, QueryKind::Wa, 5, 1);
        let QueryItems::Patterns(p) = &wa.items else {
            panic!()
        };
        assert_eq!(p.len(), 5);
        for w in p {
            assert!(v.freq(v.id(w).unwrap()) < FREQ_THRESHOLD);
        }
        // Nothing occurs 1,000 times here.
        let wb = gen_queries(&src, QueryKind::Wb, 5, 1);
        assert!(wb.items.is_empty());
        assert_eq!(wb.warnings.len(), 1);
    }

    #[test]
    fn phrases_occur_and_files_roundtrip() {
        let (c, v) = fixture();
        let src = QuerySource {
            vocab: &v,
            text: c.text(),
            doc_starts: c.starts(),
        };
        let text = String::from_utf8(c.text().to_vec()).unwrap();
        let ph = gen_queries(&src, QueryKind::Phrase2, 50, 3);
        let QueryItems::Patterns(p) = &ph.items else {
            panic!()
        };
        for q in p {
            assert!(text.contains(q.as_str()), "{q}");
        }
        let ex = gen_queries(&src, QueryKind::Extract80, 10, 3);
        assert_eq!(ex.warnings.len(), 1);
        let dir = tempfile::tempdir().unwrap();
        for set in [ph, ex] {
            let f = dir.path().join(set.kind.name());
            set.write(&f).unwrap();
            assert_eq!(QuerySet::read(&f).unwrap(), set);
        }
    }
}
