use crate::bytes::{ByteReader, ByteWriter};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"VXVC";

/// One token: a maximal run of ASCII alphanumerics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub word: &'a [u8],
    pub char_offset: u32,
    pub word_offset: u32,
}

/// Iterator over the tokens of a byte text.
pub struct Tokens<'a> {
    text: &'a [u8],
    pos: usize,
    words: u32,
}

pub fn tokenize(text: &[u8]) -> Tokens<'_> {
    Tokens {
        text,
        pos: 0,
        words: 0,
    }
}

impl<'a> Iterator for Tokens<'a> {
    type Item = Token<'a>;

    fn next(&mut self) -> Option<Token<'a>> {
        let t = self.text;
        while self.pos < t.len() && !t[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        if self.pos == t.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < t.len() && t[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let tok = Token {
            word: &t[start..self.pos],
            char_offset: start as u32,
            word_offset: self.words,
        };
        self.words += 1;
        Some(tok)
    }
}

/// Terms in lexicographic order; a term's id is its rank.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    words: Vec<String>,
    freq: Vec<u64>,
    doc_freq: Vec<u32>,
}

impl Vocabulary {
    /// `words` must be strictly increasing.
    pub fn new(words: Vec<String>, freq: Vec<u64>, doc_freq: Vec<u32>) -> Result<Self> {
        if words.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "vocabulary words must be sorted and distinct".into(),
            ));
        }
        if freq.len() != words.len() || doc_freq.len() != words.len() {
            return Err(Error::Config("vocabulary arrays differ in length".into()));
        }
        Ok(Self {
            words,
            freq,
            doc_freq,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.words
            .binary_search_by(|w| w.as_str().cmp(word))
            .ok()
            .map(|i| i as u32)
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Number of occurrences of term `id`.
    pub fn freq(&self, id: u32) -> u64 {
        self.freq[id as usize]
    }

    /// Number of documents containing term `id`.
    pub fn doc_freq(&self, id: u32) -> u32 {
        self.doc_freq[id as usize]
    }

    /// Header: magic, term count u32; per term varint byte length, the
    /// bytes, varint frequency and varint document frequency.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.bytes(MAGIC);
        w.u32(self.words.len() as u32);
        for i in 0..self.words.len() {
            w.varint(self.words[i].len() as u64);
            w.bytes(self.words[i].as_bytes());
            w.varint(self.freq[i]);
            w.varint(u64::from(self.doc_freq[i]));
        }
        w.into_inner()
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        r.expect_magic(MAGIC)?;
        let n = r.u32()? as usize;
        let cap = n.min(r.remaining());
        let (mut words, mut freq, mut df) = (
            Vec::with_capacity(cap),
            Vec::with_capacity(cap),
            Vec::with_capacity(cap),
        );
        for _ in 0..n {
            let len = r.varint_usize()?;
            let w = std::str::from_utf8(r.take(len)?)
                .map_err(|_| Error::corrupt("term is not UTF-8"))?;
            words.push(w.to_string());
            freq.push(r.varint()?);
            df.push(r.varint_u32()?);
        }
        if !r.is_at_end() {
            return Err(Error::corrupt("trailing bytes after vocabulary"));
        }
        Self::new(words, freq, df).map_err(|e| Error::corrupt(e.to_string()))
    }
}

/// Term ids of a pattern; `None` marks a word missing from the vocabulary.
pub fn parse_query(pattern: &str, vocab: &Vocabulary) -> Vec<Option<u32>> {
    tokenize(pattern.as_bytes())
        .map(|t| vocab.id(std::str::from_utf8(t.word).expect("ASCII token")))
        .collect()
}
