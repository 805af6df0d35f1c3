use crate::bytes::{ByteReader, ByteWriter};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"VXDM";

/// First character and first word offset of every document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DocMap {
    char_starts: Vec<u32>,
    word_starts: Vec<u32>,
    total_chars: u32,
    total_words: u32,
}

/// Unit of the positions handed to [`merge_occs_to_docs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Char,
    Word,
}

impl DocMap {
    pub fn new(
        char_starts: Vec<u32>,
        word_starts: Vec<u32>,
        total_chars: u32,
        total_words: u32,
    ) -> Result<Self> {
        let check = |v: &[u32], total: u32, what: &str| -> Result<()> {
            if v.first().is_some_and(|&x| x != 0) {
                return Err(Error::Config(format!("{what} starts must begin at 0")));
            }
            if v.windows(2).any(|w| w[0] > w[1]) || v.last().is_some_and(|&x| x > total) {
                return Err(Error::Config(format!(
                    "{what} starts must be non-decreasing"
                )));
            }
            Ok(())
        };
        check(&char_starts, total_chars, "char")?;
        check(&word_starts, total_words, "word")?;
        if char_starts.len() != word_starts.len() {
            return Err(Error::Config("start arrays differ in length".into()));
        }
        Ok(Self {
            char_starts,
            word_starts,
            total_chars,
            total_words,
        })
    }

    pub fn num_docs(&self) -> usize {
        self.char_starts.len()
    }

    pub fn char_starts(&self) -> &[u32] {
        &self.char_starts
    }

    pub fn word_starts(&self) -> &[u32] {
        &self.word_starts
    }

    pub fn total(&self, unit: Unit) -> u32 {
        match unit {
            Unit::Char => self.total_chars,
            Unit::Word => self.total_words,
        }
    }

    pub fn starts(&self, unit: Unit) -> &[u32] {
        match unit {
            Unit::Char => &self.char_starts,
            Unit::Word => &self.word_starts,
        }
    }

    /// Character range `[start, end)` of document `d`.
    pub fn char_range(&self, d: usize) -> (u32, u32) {
        let end = self
            .char_starts
            .get(d + 1)
            .copied()
            .unwrap_or(self.total_chars);
        (self.char_starts[d], end)
    }

    /// Word range `[start, end)` of document `d`.
    pub fn word_range(&self, d: usize) -> (u32, u32) {
        let end = self
            .word_starts
            .get(d + 1)
            .copied()
            .unwrap_or(self.total_words);
        (self.word_starts[d], end)
    }

    /// Header: magic, document count u32, total chars u32, total words u32;
    /// then both start arrays as u32 values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.bytes(MAGIC);
        w.u32(self.char_starts.len() as u32);
        w.u32(self.total_chars);
        w.u32(self.total_words);
        w.u32_slice(&self.char_starts);
        w.u32_slice(&self.word_starts);
        w.into_inner()
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        r.expect_magic(MAGIC)?;
        let n = r.u32()? as usize;
        let (tc, tw) = (r.u32()?, r.u32()?);
        let cs = r.u32_vec(n)?;
        let ws = r.u32_vec(n)?;
        if !r.is_at_end() {
            return Err(Error::corrupt("trailing bytes after document map"));
        }
        Self::new(cs, ws, tc, tw).map_err(|e| Error::corrupt(e.to_string()))
    }
}

/// Maps ascending 0-based absolute positions to (document index, offset in
/// document) in one merge pass over the document starts.
pub fn merge_occs_to_docs(positions: &[u32], map: &DocMap, unit: Unit) -> Result<Vec<(u32, u32)>> {
    let starts = map.starts(unit);
    let total = map.total(unit);
    let mut out = Vec::with_capacity(positions.len());
    let mut d = 0usize;
    for &p in positions {
        if p >= total || starts.is_empty() {
            return Err(Error::OutOfRange {
                what: "position",
                index: u64::from(p),
                limit: u64::from(total),
            });
        }
        while d + 1 < starts.len() && starts[d + 1] <= p {
            d += 1;
        }
        out.push((d as u32, p - starts[d]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn example_mapping_and_boundary() {
        let m = DocMap::new(vec![0, 100, 250], vec![0, 10, 20], 300, 30).unwrap();
        assert_eq!(
            merge_occs_to_docs(&[10, 105, 260], &m, Unit::Char).unwrap(),
            vec![(0, 10), (1, 5), (2, 10)]
        );
        assert_eq!(
            merge_occs_to_docs(&[100], &m, Unit::Char).unwrap(),
            vec![(1, 0)]
        );
        assert!(merge_occs_to_docs(&[300], &m, Unit::Char).is_err());
        assert_eq!(DocMap::from_bytes(&m.to_bytes()).unwrap(), m);
    }

    #[test]
    fn matches_binary_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut starts = vec![0u32];
        for _ in 0..500 {
            let last = *starts.last().unwrap();
            starts.push(last + rng.gen_range(1..200));
        }
        let total = starts.last().unwrap() + 50;
        let m = DocMap::new(starts.clone(), starts.clone(), total, total).unwrap();
        let mut pos: Vec<u32> = (0..10_000).map(|_| rng.gen_range(0..total)).collect();
        pos.sort_unstable();
        let got = merge_occs_to_docs(&pos, &m, Unit::Word).unwrap();
        for (&p, &(d, off)) in pos.iter().zip(&got) {
            let want = starts.partition_point(|&s| s <= p) - 1;
            assert_eq!((d as usize, off), (want, p - starts[want]));
            assert_eq!(starts[d as usize] + off, p);
        }
    }
}
