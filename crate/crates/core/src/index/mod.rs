//! Non-positional and positional inverted indexes over a document corpus.

pub mod method;
pub mod query;
pub mod vocab;

use std::collections::HashMap;
use std::fs;
use std::path::Path;

pub use method::{Method, MethodConfig, PostingStore, Scenario};
pub use vocab::{parse_query, tokenize, Token, Vocabulary};

use crate::codecs::MonotoneList;
use crate::postings::intersect::IntersectStats;
use crate::text::docmap::Unit;
use crate::text::{merge_occs_to_docs, DocMap, TextStore};
use crate::{Error, Result};

/// Concatenated documents and the byte offset where each one starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    text: Vec<u8>,
    starts: Vec<u32>,
}

impl Corpus {
    pub fn new(text: Vec<u8>, starts: Vec<u32>) -> Result<Self> {
        if starts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if text.len() > u32::MAX as usize {
            return Err(Error::Config("corpus exceeds 32-bit offsets".into()));
        }
        if starts[0] != 0
            || starts.windows(2).any(|w| w[0] > w[1])
            || *starts.last().unwrap() as usize > text.len()
        {
            return Err(Error::Config(
                "document starts must be ascending from 0".into(),
            ));
        }
        Ok(Self { text, starts })
    }

    pub fn from_docs<D: AsRef<[u8]>>(docs: &[D]) -> Result<Self> {
        let mut text = Vec::new();
        let mut starts = Vec::with_capacity(docs.len());
        for d in docs {
            starts.push(text.len() as u32);
            text.extend_from_slice(d.as_ref());
        }
        Self::new(text, starts)
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn starts(&self) -> &[u32] {
        &self.starts
    }

    pub fn num_docs(&self) -> usize {
        self.starts.len()
    }

    pub fn doc(&self, d: usize) -> &[u8] {
        let end = self
            .starts
            .get(d + 1)
            .map_or(self.text.len(), |&e| e as usize);
        &self.text[self.starts[d] as usize..end]
    }
}

/// Vocabulary and raw posting lists of a corpus, shared by every index
/// built from it.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub vocab: Vocabulary,
    /// Per term, 1-based ids of the documents containing it.
    pub doc_lists: Vec<MonotoneList>,
    /// Per term, 1-based absolute word positions (positional only).
    pub pos_lists: Option<Vec<MonotoneList>>,
    pub docs: DocMap,
}

impl Analysis {
    pub fn new(corpus: &Corpus, positional: bool) -> Result<Self> {
        // Tokens never cross document boundaries.
        let mut first_id: HashMap<&[u8], u32> = HashMap::new();
        let mut words: Vec<&[u8]> = Vec::new();
        let mut tokens: Vec<u32> = Vec::new();
        let mut word_starts = Vec::with_capacity(corpus.num_docs());
        for d in 0..corpus.num_docs() {
            word_starts.push(tokens.len() as u32);
            for t in tokenize(corpus.doc(d)) {
                let id = *first_id.entry(t.word).or_insert_with(|| {
                    words.push(t.word);
                    words.len() as u32 - 1
                });
                tokens.push(id);
            }
        }
        if tokens.len() >= u32::MAX as usize {
            return Err(Error::Config("corpus has too many words".into()));
        }
        let mut order: Vec<u32> = (0..words.len() as u32).collect();
        order.sort_unstable_by_key(|&i| words[i as usize]);
        let mut rank = vec![0u32; words.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i as usize] = r as u32;
        }
        let nterms = words.len();
        let total_words = tokens.len() as u32;
        let mut doc_lists: Vec<Vec<u32>> = vec![Vec::new(); nterms];
        let mut pos_lists: Vec<Vec<u32>> = vec![Vec::new(); if positional { nterms } else { 0 }];
        let mut freq = vec![0u64; nterms];
        for d in 0..corpus.num_docs() {
            let (lo, hi) = (
                word_starts[d] as usize,
                word_starts.get(d + 1).map_or(tokens.len(), |&x| x as usize),
            );
            let doc_id = d as u32 + 1;
            for (p, &t) in tokens.iter().enumerate().take(hi).skip(lo) {
                let t = rank[t as usize] as usize;
                freq[t] += 1;
                if doc_lists[t].last() != Some(&doc_id) {
                    doc_lists[t].push(doc_id);
                }
                if positional {
                    pos_lists[t].push(p as u32 + 1);
                }
            }
        }
        let vocab = Vocabulary::new(
            order
                .iter()
                .map(|&i| String::from_utf8(words[i as usize].to_vec()).expect("ASCII token"))
                .collect(),
            freq,
            doc_lists.iter().map(|l| l.len() as u32).collect(),
        )?;
        let ndocs = corpus.num_docs() as u32;
        let docs = DocMap::new(
            corpus.starts().to_vec(),
            word_starts,
            corpus.text().len() as u32,
            total_words,
        )?;
        let wrap = |lists: Vec<Vec<u32>>, u: u32| -> Result<Vec<MonotoneList>> {
            lists.into_iter().map(|l| MonotoneList::new(l, u)).collect()
        };
        Ok(Self {
            vocab,
            doc_lists: wrap(doc_lists, ndocs)?,
            pos_lists: if positional {
                Some(wrap(pos_lists, total_words.max(1))?)
            } else {
                None
            },
            docs,
        })
    }
}

/// Document-level index: one list of document ids per term.
#[derive(Debug, Clone, PartialEq)]
pub struct NonPosIndex {
    pub vocab: Vocabulary,
    pub config: MethodConfig,
    pub store: PostingStore,
    /// Size in bytes of the indexed text, for compression ratios.
    pub collection_bytes: u64,
}

impl NonPosIndex {
    pub fn build(corpus: &Corpus, config: MethodConfig) -> Result<Self> {
        Self::from_analysis(&Analysis::new(corpus, false)?, config)
    }

    pub fn from_analysis(a: &Analysis, config: MethodConfig) -> Result<Self> {
        let universe = a.docs.num_docs() as u32;
        Ok(Self {
            vocab: a.vocab.clone(),
            config,
            store: config.build(&a.doc_lists, universe)?,
            collection_bytes: u64::from(a.docs.total(Unit::Char)),
        })
    }

    pub fn num_docs(&self) -> u32 {
        self.store.universe()
    }

    /// 1-based ids of the documents containing every term; empty if any
    /// term is out of vocabulary.
    pub fn locate_and(
        &self,
        terms: &[Option<u32>],
        stats: &mut IntersectStats,
    ) -> Result<Vec<u32>> {
        let Some(ids) = resolve(terms) else {
            return Ok(Vec::new());
        };
        match ids.as_slice() {
            [] => Ok(Vec::new()),
            [one] => self.store.fetch(*one),
            _ => query::shifted_intersection(&self.store, &ids, &vec![0; ids.len()], stats),
        }
    }
}

fn resolve(terms: &[Option<u32>]) -> Option<Vec<usize>> {
    terms.iter().map(|t| t.map(|x| x as usize)).collect()
}

/// Word-level index with the compressed text and document map.
#[derive(Debug, Clone, PartialEq)]
pub struct PosIndex {
    pub vocab: Vocabulary,
    pub config: MethodConfig,
    pub store: PostingStore,
    pub docs: DocMap,
    pub text: TextStore,
}

/// A phrase occurrence: 0-based document index and word offset in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occurrence {
    pub doc: u32,
    pub offset: u32,
}

impl PosIndex {
    pub fn build(corpus: &Corpus, config: MethodConfig, sample_ct: u32) -> Result<Self> {
        let text = TextStore::build(corpus.text(), sample_ct)?;
        Self::from_analysis(&Analysis::new(corpus, true)?, config, text)
    }

    /// Reuses an already compressed text.
    pub fn from_analysis(a: &Analysis, config: MethodConfig, text: TextStore) -> Result<Self> {
        let lists = a
            .pos_lists
            .as_ref()
            .ok_or_else(|| Error::Config("analysis lacks positional lists".into()))?;
        if text.len() != u64::from(a.docs.total(Unit::Char)) {
            return Err(Error::Config("text store does not match the corpus".into()));
        }
        let universe = a.docs.total(Unit::Word).max(1);
        Ok(Self {
            vocab: a.vocab.clone(),
            config,
            store: config.build(lists, universe)?,
            docs: a.docs.clone(),
            text,
        })
    }

    /// 1-based start positions of the phrase, including ones that cross
    /// document boundaries.
    pub fn phrase_positions(
        &self,
        terms: &[Option<u32>],
        stats: &mut IntersectStats,
    ) -> Result<Vec<u32>> {
        let Some(ids) = resolve(terms) else {
            return Ok(Vec::new());
        };
        match ids.as_slice() {
            [] => Ok(Vec::new()),
            [one] => self.store.fetch(*one),
            _ => {
                let shifts: Vec<u32> = (0..ids.len() as u32).collect();
                query::shifted_intersection(&self.store, &ids, &shifts, stats)
            }
        }
    }

    /// Occurrences of the phrase that lie within a single document.
    pub fn locate_phrase(
        &self,
        terms: &[Option<u32>],
        stats: &mut IntersectStats,
    ) -> Result<Vec<Occurrence>> {
        let starts = self.phrase_positions(terms, stats)?;
        let zero: Vec<u32> = starts.iter().map(|p| p - 1).collect();
        let k = terms.len() as u32;
        let mapped = merge_occs_to_docs(&zero, &self.docs, Unit::Word)?;
        Ok(mapped
            .into_iter()
            .filter(|&(d, off)| {
                let (s, e) = self.docs.word_range(d as usize);
                off + k <= e - s
            })
            .map(|(doc, offset)| Occurrence { doc, offset })
            .collect())
    }

    /// Characters `[a, b)` of the collection.
    pub fn extract(&self, a: u64, b: u64) -> Result<Vec<u8>> {
        self.text.extract(a, b)
    }
}

/// Either kind of index, with directory persistence.
#[derive(Debug, Clone, PartialEq)]
pub enum Index {
    NonPos(NonPosIndex),
    Pos(PosIndex),
}

pub const MANIFEST: &str = "manifest";
pub const POSTINGS_FILE: &str = "postings.bin";
pub const VOCAB_FILE: &str = "vocab.bin";
pub const DOCS_FILE: &str = "docs.bin";
pub const TEXT_FILE: &str = "text.bin";
const FORMAT_TAG: &str = "versidx-index 1";

impl Index {
    pub fn scenario(&self) -> Scenario {
        match self {
            Index::NonPos(_) => Scenario::NonPositional,
            Index::Pos(_) => Scenario::Positional,
        }
    }

    pub fn config(&self) -> &MethodConfig {
        match self {
            Index::NonPos(i) => &i.config,
            Index::Pos(i) => &i.config,
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        match self {
            Index::NonPos(i) => &i.vocab,
            Index::Pos(i) => &i.vocab,
        }
    }

    /// Size in bytes of the indexed text.
    pub fn collection_bytes(&self) -> u64 {
        match self {
            Index::NonPos(i) => i.collection_bytes,
            Index::Pos(i) => i.text.len(),
        }
    }

    pub fn store(&self) -> &PostingStore {
        match self {
            Index::NonPos(i) => &i.store,
            Index::Pos(i) => &i.store,
        }
    }

    /// Writes the segments and a `key=value` manifest into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let c = self.config();
        let store = self.store();
        let mut m = vec![
            format!("format={FORMAT_TAG}"),
            format!("scenario={}", self.scenario().name()),
            format!("method={}", c.method.name()),
            format!("k={}", c.k),
            format!("B={}", c.b),
            format!("ds={}", c.ds),
            format!("lenBitmapDiv={}", c.len_bitmap_div),
            format!("repairBreak={:e}", c.repair_break),
            format!("minbcssize={}", c.min_bcs_size),
            format!("terms={}", self.vocab().len()),
            format!("universe={}", store.universe()),
            format!("collection_bytes={}", self.collection_bytes()),
        ];
        fs::write(dir.join(POSTINGS_FILE), store.to_bytes())?;
        fs::write(dir.join(VOCAB_FILE), self.vocab().to_bytes())?;
        if let Index::Pos(p) = self {
            m.push(format!("docs={}", p.docs.num_docs()));
            m.push(format!("sample_ct={}", p.text.sample_ct()));
            fs::write(dir.join(DOCS_FILE), p.docs.to_bytes())?;
            fs::write(dir.join(TEXT_FILE), p.text.to_bytes())?;
        } else {
            m.push(format!("docs={}", store.universe()));
        }
        m.push(String::new());
        fs::write(dir.join(MANIFEST), m.join("\n"))?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = fs::read_to_string(dir.join(MANIFEST))?;
        let kv: HashMap<&str, &str> = manifest.lines().filter_map(|l| l.split_once('=')).collect();
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| Error::corrupt(format!("manifest lacks {k}")))
        };
        if get("format")? != FORMAT_TAG {
            return Err(Error::corrupt("unknown index format"));
        }
        let scenario: Scenario = get("scenario")?.parse()?;
        let method: Method = get("method")?.parse()?;
        let mut config = MethodConfig::new(method, scenario);
        for key in ["k", "B", "ds", "lenBitmapDiv", "repairBreak", "minbcssize"] {
            config.set(key, get(key)?)?;
        }
        let store = PostingStore::from_bytes(&fs::read(dir.join(POSTINGS_FILE))?, &config)?;
        let vocab = Vocabulary::from_bytes(&fs::read(dir.join(VOCAB_FILE))?)?;
        if store.num_lists() != vocab.len() {
            return Err(Error::corrupt("vocabulary and postings disagree"));
        }
        Ok(match scenario {
            Scenario::NonPositional => Index::NonPos(NonPosIndex {
                vocab,
                config,
                store,
                collection_bytes: get("collection_bytes")?
                    .parse()
                    .map_err(|_| Error::corrupt("bad collection_bytes"))?,
            }),
            Scenario::Positional => Index::Pos(PosIndex {
                vocab,
                config,
                store,
                docs: DocMap::from_bytes(&fs::read(dir.join(DOCS_FILE))?)?,
                text: TextStore::from_bytes(&fs::read(dir.join(TEXT_FILE))?)?,
            }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &Vocabulary, words: &str) -> Vec<Option<u32>> {
        parse_query(words, v)
    }

    #[test]
    fn small_examples() {
        let c = Corpus::from_docs(&["a b", "b c"]).unwrap();
        for m in Method::ALL {
            let np = NonPosIndex::build(&c, MethodConfig::new(m, Scenario::NonPositional)).unwrap();
            let b = np.vocab.id("b").unwrap() as usize;
            assert_eq!(np.store.fetch(b).unwrap(), vec![1, 2], "{m}");
            let mut st = IntersectStats::default();
            assert_eq!(
                np.locate_and(&ids(&np.vocab, "a c"), &mut st).unwrap(),
                vec![] as Vec<u32>
            );
            assert_eq!(
                np.locate_and(&ids(&np.vocab, "b c"), &mut st).unwrap(),
                vec![2]
            );
            assert!(np
                .locate_and(&ids(&np.vocab, "b zz"), &mut st)
                .unwrap()
                .is_empty());
            let p = PosIndex::build(&c, MethodConfig::new(m, Scenario::Positional), 2).unwrap();
            assert_eq!(p.store.fetch(b).unwrap(), vec![2, 3], "{m}");
            // "b b" spans the document boundary.
            assert_eq!(
                p.phrase_positions(&ids(&p.vocab, "b b"), &mut st).unwrap(),
                vec![2]
            );
            assert!(p
                .locate_phrase(&ids(&p.vocab, "b b"), &mut st)
                .unwrap()
                .is_empty());
            assert_eq!(
                p.locate_phrase(&ids(&p.vocab, "b c"), &mut st).unwrap(),
                vec![Occurrence { doc: 1, offset: 0 }]
            );
        }
    }

    #[test]
    fn repeated_phrase_in_one_doc() {
        let c = Corpus::from_docs(&["x y", "a b a b"]).unwrap();
        let p = PosIndex::build(
            &c,
            MethodConfig::new(Method::Vbyte, Scenario::Positional),
            1,
        )
        .unwrap();
        let mut st = IntersectStats::default();
        assert_eq!(
            p.locate_phrase(&ids(&p.vocab, "a b"), &mut st).unwrap(),
            vec![
                Occurrence { doc: 1, offset: 0 },
                Occurrence { doc: 1, offset: 2 }
            ]
        );
        assert!(p
            .locate_phrase(&ids(&p.vocab, "a b a b a"), &mut st)
            .unwrap()
            .is_empty());
        assert_eq!(p.extract(3, 6).unwrap(), b"a b");
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(matches!(
            Corpus::from_docs::<&str>(&[]),
            Err(Error::EmptyCorpus)
        ));
    }
}
