//! Byte text compressed with Re-Pair. Every `sample_ct`-th symbol of the
//! final sequence records where its expansion starts in the text, so any
//! range can be decoded by expanding forward from the nearest sample.

use crate::bytes::{ByteReader, ByteWriter};
use crate::repair::engine::{repair, RePairParams};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"VXTS";
const FIRST_RULE: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextStore {
    text_len: u64,
    sample_ct: u32,
    rules: Vec<(u32, u32)>,
    sequence: Vec<u32>,
    /// Text position where sequence symbol `j * sample_ct` starts.
    samples: Vec<u32>,
}

/// Work done by one extraction: bytes expanded before the range start.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractStats {
    pub skipped: u64,
}

impl TextStore {
    pub fn build(text: &[u8], sample_ct: u32) -> Result<Self> {
        if sample_ct == 0 {
            return Err(Error::Config("sample_ct must be at least 1".into()));
        }
        if text.len() as u64 > u64::from(u32::MAX) {
            return Err(Error::Config("text exceeds 32-bit positions".into()));
        }
        let out = repair(
            text.iter().map(|&b| u32::from(b)).collect(),
            RePairParams {
                separator: None,
                first_rule_id: FIRST_RULE,
                repair_break: 0.0,
            },
        )?;
        Self::from_grammar(out.rules, out.sequence, sample_ct)
    }

    /// Reuses an existing grammar with a different sampling period.
    pub fn resample(&self, sample_ct: u32) -> Result<Self> {
        if sample_ct == 0 {
            return Err(Error::Config("sample_ct must be at least 1".into()));
        }
        Self::from_grammar(self.rules.clone(), self.sequence.clone(), sample_ct)
    }

    fn from_grammar(rules: Vec<(u32, u32)>, sequence: Vec<u32>, sample_ct: u32) -> Result<Self> {
        let lens = rule_lengths(&rules)?;
        let mut samples = Vec::with_capacity(sequence.len().div_ceil(sample_ct as usize));
        let mut pos = 0u64;
        for (j, &s) in sequence.iter().enumerate() {
            if j % sample_ct as usize == 0 {
                samples.push(pos as u32);
            }
            pos += symbol_len(&lens, s)?;
        }
        Ok(Self {
            text_len: pos,
            sample_ct,
            rules,
            sequence,
            samples,
        })
    }

    pub fn len(&self) -> u64 {
        self.text_len
    }

    pub fn is_empty(&self) -> bool {
        self.text_len == 0
    }

    pub fn sample_ct(&self) -> u32 {
        self.sample_ct
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn sequence_len(&self) -> usize {
        self.sequence.len()
    }

    pub fn extract(&self, a: u64, b: u64) -> Result<Vec<u8>> {
        self.extract_with_stats(a, b, &mut ExtractStats::default())
    }

    /// Text `[a, b)`: expands from the greatest sample at or before `a`
    /// and discards the prefix.
    pub fn extract_with_stats(&self, a: u64, b: u64, stats: &mut ExtractStats) -> Result<Vec<u8>> {
        if a > b || b > self.text_len {
            return Err(Error::OutOfRange {
                what: "text range end",
                index: b.max(a),
                limit: self.text_len,
            });
        }
        let mut out = Vec::with_capacity((b - a) as usize);
        if a == b {
            return Ok(out);
        }
        let j = self.samples.partition_point(|&p| u64::from(p) <= a) - 1;
        let mut pos = u64::from(self.samples[j]);
        let mut stack = Vec::new();
        'outer: for &s in &self.sequence[j * self.sample_ct as usize..] {
            stack.push(s);
            while let Some(sym) = stack.pop() {
                if sym < FIRST_RULE {
                    if pos >= a {
                        out.push(sym as u8);
                        if pos + 1 == b {
                            break 'outer;
                        }
                    } else {
                        stats.skipped += 1;
                    }
                    pos += 1;
                } else {
                    let (l, r) = self.rules[(sym - FIRST_RULE) as usize];
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        Ok(out)
    }

    /// Header: magic, text length u64, sample_ct u32, rule count u32,
    /// sequence length u32. Then rules as plain u32 pairs, the sequence
    /// bit-packed, and the samples as u32 values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.bytes(MAGIC);
        w.u64(self.text_len);
        w.u32(self.sample_ct);
        w.u32(self.rules.len() as u32);
        w.u32(self.sequence.len() as u32);
        for &(l, r) in &self.rules {
            w.u32(l);
            w.u32(r);
        }
        w.packed(&self.sequence);
        w.u32_slice(&self.samples);
        w.into_inner()
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        r.expect_magic(MAGIC)?;
        let text_len = r.u64()?;
        let sample_ct = r.u32()?;
        let nrules = r.u32()? as usize;
        let nseq = r.u32()? as usize;
        if sample_ct == 0 {
            return Err(Error::corrupt("sample_ct is zero"));
        }
        let flat = r.u32_vec(nrules.checked_mul(2).ok_or(Error::corrupt("rule count"))?)?;
        let rules: Vec<(u32, u32)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let sequence = r.packed(nseq)?;
        let samples = r.u32_vec(nseq.div_ceil(sample_ct as usize))?;
        if !r.is_at_end() {
            return Err(Error::corrupt("trailing bytes after text store"));
        }
        let rebuilt = Self::from_grammar(rules, sequence, sample_ct)
            .map_err(|_| Error::corrupt("invalid text grammar"))?;
        if rebuilt.samples != samples || rebuilt.text_len != text_len {
            return Err(Error::corrupt("text samples disagree with grammar"));
        }
        Ok(rebuilt)
    }
}

/// Expansion length of every rule; rejects rules that refer forward.
fn rule_lengths(rules: &[(u32, u32)]) -> Result<Vec<u64>> {
    let mut lens: Vec<u64> = Vec::with_capacity(rules.len());
    for (i, &(l, r)) in rules.iter().enumerate() {
        let limit = FIRST_RULE + i as u32;
        if l >= limit || r >= limit {
            return Err(Error::UnknownSymbol(l.max(r)));
        }
        let len = symbol_len(&lens, l)? + symbol_len(&lens, r)?;
        lens.push(len);
    }
    Ok(lens)
}

fn symbol_len(lens: &[u64], s: u32) -> Result<u64> {
    if s < FIRST_RULE {
        Ok(1)
    } else {
        lens.get((s - FIRST_RULE) as usize)
            .copied()
            .ok_or(Error::UnknownSymbol(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn abab_forms_one_rule() {
        let t = TextStore::build(b"abab", 1).unwrap();
        assert_eq!(t.rules, vec![(u32::from(b'a'), u32::from(b'b'))]);
        assert_eq!(t.sequence, vec![256, 256]);
        assert_eq!(t.samples, vec![0, 2]);
        assert_eq!(t.extract(0, 4).unwrap(), b"abab");
    }

    #[test]
    fn sparse_sampling_keeps_one_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let text: Vec<u8> = (0..1024).map(|_| rng.gen_range(b'a'..=b'z')).collect();
        let t = TextStore::build(&text, 4096).unwrap();
        assert_eq!(t.samples, vec![0]);
        assert_eq!(t.extract(0, 1024).unwrap(), text);
        assert_eq!(t.extract(5, 5).unwrap(), b"");
        assert!(t.extract(0, 1025).is_err());
        assert!(t.extract(6, 5).is_err());
    }

    #[test]
    fn windows_match_and_work_shrinks_with_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base: Vec<u8> = (0..3000).map(|_| rng.gen_range(b'a'..=b'h')).collect();
        let mut text = Vec::new();
        for _ in 0..8 {
            let mut v = base.clone();
            for _ in 0..10 {
                let i = rng.gen_range(0..v.len());
                v[i] = b'#';
            }
            text.extend(v);
        }
        let stores: Vec<TextStore> = [4096, 256, 32, 8, 1]
            .iter()
            .map(|&s| TextStore::build(&text, s).unwrap())
            .collect();
        for s in &stores {
            assert_eq!(TextStore::from_bytes(&s.to_bytes()).unwrap(), *s);
        }
        for _ in 0..300 {
            let a = rng.gen_range(0..text.len() as u64);
            let b = (a + 80).min(text.len() as u64);
            let mut prev = u64::MAX;
            for s in &stores {
                let mut st = ExtractStats::default();
                assert_eq!(
                    s.extract_with_stats(a, b, &mut st).unwrap(),
                    &text[a as usize..b as usize]
                );
                assert!(st.skipped <= prev);
                prev = st.skipped;
            }
        }
        let sizes: Vec<usize> = stores.iter().map(|s| s.to_bytes().len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
    }

    #[test]
    fn corrupt_store_is_rejected() {
        let t = TextStore::build(b"abcabcabcabc", 2).unwrap();
        let bytes = t.to_bytes();
        for cut in 0..bytes.len() {
            assert!(TextStore::from_bytes(&bytes[..cut]).is_err());
        }
        let mut bad = bytes.clone();
        bad[25] = 0xff; // first rule's left child
        assert!(TextStore::from_bytes(&bad).is_err());
    }
}
