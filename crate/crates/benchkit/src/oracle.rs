//! Brute-force answers straight from the corpus text, with a tokenizer
//! independent of the index's.

use std::collections::HashMap;

use regex::bytes::Regex;
use versidx::index::Corpus;

pub struct Oracle {
    /// Every token's word id, all documents back to back.
    tokens: Vec<u32>,
    /// Index in `tokens` of each document's first token.
    doc_starts: Vec<u32>,
    ids: HashMap<String, u32>,
    /// Per word id, 0-based global token positions.
    positions: Vec<Vec<u32>>,
}

impl Oracle {
    pub fn new(corpus: &Corpus) -> Self {
        let re = Regex::new("[A-Za-z0-9]+").expect("valid regex");
        let mut o = Self {
            tokens: Vec::new(),
            doc_starts: Vec::with_capacity(corpus.num_docs()),
            ids: HashMap::new(),
            positions: Vec::new(),
        };
        for d in 0..corpus.num_docs() {
            o.doc_starts.push(o.tokens.len() as u32);
            for m in re.find_iter(corpus.doc(d)) {
                let w = std::str::from_utf8(m.as_bytes()).expect("ASCII match");
                let id = match o.ids.get(w) {
                    Some(&id) => id,
                    None => {
                        let id = o.positions.len() as u32;
                        o.ids.insert(w.to_string(), id);
                        o.positions.push(Vec::new());
                        id
                    }
                };
                o.positions[id as usize].push(o.tokens.len() as u32);
                o.tokens.push(id);
            }
        }
        o
    }

    pub fn word_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn freq(&self, word: &str) -> usize {
        self.ids
            .get(word)
            .map_or(0, |&id| self.positions[id as usize].len())
    }

    fn doc_of(&self, p: u32) -> usize {
        self.doc_starts.partition_point(|&s| s <= p) - 1
    }

    fn doc_end(&self, d: usize) -> u32 {
        self.doc_starts
            .get(d + 1)
            .copied()
            .unwrap_or(self.tokens.len() as u32)
    }

    fn words(pattern: &str) -> Vec<&str> {
        pattern
            .split(|c: char| !c.is_ascii_alphanumeric())
            .filter(|w| !w.is_empty())
            .collect()
    }

    /// 1-based ids of documents containing every word of the pattern.
    pub fn and_docs(&self, pattern: &str) -> Vec<u32> {
        let words = Self::words(pattern);
        let mut acc: Option<Vec<u32>> = None;
        for w in words {
            let Some(&id) = self.ids.get(w) else {
                return Vec::new();
            };
            let mut docs: Vec<u32> = self.positions[id as usize]
                .iter()
                .map(|&p| self.doc_of(p) as u32 + 1)
                .collect();
            docs.dedup();
            acc = Some(match acc {
                None => docs,
                Some(prev) => prev
                    .into_iter()
                    .filter(|d| docs.binary_search(d).is_ok())
                    .collect(),
            });
        }
        acc.unwrap_or_default()
    }

    /// (0-based document, word offset) of every occurrence of the phrase
    /// lying inside one document, found by checking each window starting
    /// with the first word.
    pub fn phrase(&self, pattern: &str) -> Vec<(u32, u32)> {
        let words = Self::words(pattern);
        let Some(ids) = words
            .iter()
            .map(|w| self.ids.get(*w).copied())
            .collect::<Option<Vec<u32>>>()
        else {
            return Vec::new();
        };
        let Some(&first) = ids.first() else {
            return Vec::new();
        };
        let k = ids.len() as u32;
        let mut out = Vec::new();
        for &p in &self.positions[first as usize] {
            let d = self.doc_of(p);
            if p + k > self.doc_end(d) {
                continue;
            }
            if (0..k).all(|i| self.tokens[(p + i) as usize] == ids[i as usize]) {
                out.push((d as u32, p - self.doc_starts[d]));
            }
        }
        out
    }
}
