//! Vbyte lists individually compressed with a general LZ backend. Lists
//! whose Vbyte stream is shorter than `minbcssize` bytes are kept raw.

use super::backend::{LzBackend, Lzma};
use crate::bytes::{ByteReader, ByteWriter};
use crate::codecs::{self, vbyte, MonotoneList};
use crate::{Error, Result};

pub const DEFAULT_MIN_BCS_SIZE: u32 = 10;
const MAGIC: &[u8; 4] = b"VXLZ";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VLzIndex<B: LzBackend = Lzma> {
    backend: B,
    min_bcs_size: u32,
    universe: u32,
    lens: Vec<u32>,
    raw_lens: Vec<u32>,
    flags: Vec<bool>,
    offsets: Vec<u64>,
    payload: Vec<u8>,
}

impl VLzIndex<Lzma> {
    pub fn build(lists: &[MonotoneList], universe: u32, min_bcs_size: u32) -> Result<Self> {
        Self::build_with(Lzma::default(), lists, universe, min_bcs_size)
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        Self::from_bytes_with(Lzma::default(), buf)
    }
}

impl<B: LzBackend> VLzIndex<B> {
    pub fn build_with(
        backend: B,
        lists: &[MonotoneList],
        universe: u32,
        min_bcs_size: u32,
    ) -> Result<Self> {
        let mut idx = Self {
            backend,
            min_bcs_size,
            universe,
            lens: Vec::with_capacity(lists.len()),
            raw_lens: Vec::with_capacity(lists.len()),
            flags: Vec::with_capacity(lists.len()),
            offsets: vec![0],
            payload: Vec::new(),
        };
        for l in lists {
            if l.universe() != universe {
                return Err(Error::UniverseMismatch(
                    u64::from(universe),
                    u64::from(l.universe()),
                ));
            }
            let raw = vbyte::encode(&codecs::to_gaps(l.values())?.0);
            let compress = raw.len() >= min_bcs_size as usize;
            if compress {
                let c = idx.backend.compress(&raw)?;
                idx.payload.extend_from_slice(&c);
            } else {
                idx.payload.extend_from_slice(&raw);
            }
            idx.lens.push(l.len() as u32);
            idx.raw_lens.push(raw.len() as u32);
            idx.flags.push(compress);
            idx.offsets.push(idx.payload.len() as u64);
        }
        Ok(idx)
    }

    pub fn num_lists(&self) -> usize {
        self.lens.len()
    }

    pub fn list_len(&self, i: usize) -> usize {
        self.lens[i] as usize
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn is_compressed(&self, i: usize) -> bool {
        self.flags[i]
    }

    pub fn fetch(&self, i: usize) -> Result<Vec<u32>> {
        if i >= self.num_lists() {
            return Err(Error::OutOfRange {
                what: "list",
                index: i as u64,
                limit: self.num_lists() as u64,
            });
        }
        let stored = &self.payload[self.offsets[i] as usize..self.offsets[i + 1] as usize];
        let gaps = if self.flags[i] {
            let raw = self.backend.decompress(stored, self.raw_lens[i] as usize)?;
            vbyte::decode(&raw, self.lens[i] as usize)?
        } else {
            vbyte::decode(stored, self.lens[i] as usize)?
        };
        codecs::from_gaps(&gaps).map_err(|_| Error::corrupt("list values overflow"))
    }

    /// Header: magic, minbcssize u32, universe u32, list count u32; flag
    /// bitmap (LSB first); per list varint length, varint Vbyte length and
    /// varint stored length; then the payloads back to back.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.bytes(MAGIC);
        w.u32(self.min_bcs_size);
        w.u32(self.universe);
        w.u32(self.lens.len() as u32);
        let mut bits = vec![0u8; self.flags.len().div_ceil(8)];
        for (i, &f) in self.flags.iter().enumerate() {
            if f {
                bits[i / 8] |= 1 << (i % 8);
            }
        }
        w.bytes(&bits);
        for i in 0..self.lens.len() {
            w.varint(u64::from(self.lens[i]));
            if self.flags[i] {
                w.varint(u64::from(self.raw_lens[i]));
            }
            w.varint(self.offsets[i + 1] - self.offsets[i]);
        }
        w.bytes(&self.payload);
        w.into_inner()
    }

    pub fn from_bytes_with(backend: B, buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        r.expect_magic(MAGIC)?;
        let min_bcs_size = r.u32()?;
        let universe = r.u32()?;
        let n = r.u32()? as usize;
        let bits = r.take(n.div_ceil(8))?;
        let flags: Vec<bool> = (0..n).map(|i| bits[i / 8] >> (i % 8) & 1 == 1).collect();
        let mut lens = Vec::with_capacity(n);
        let mut raw_lens = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u64);
        for &f in &flags {
            lens.push(r.varint_u32()?);
            let stored = r.varint()?;
            let raw = if f {
                let raw = stored;
                let stored = r.varint()?;
                offsets.push(offsets.last().unwrap() + stored);
                raw
            } else {
                offsets.push(offsets.last().unwrap() + stored);
                stored
            };
            raw_lens.push(u32::try_from(raw).map_err(|_| Error::corrupt("list too long"))?);
        }
        let total = *offsets.last().unwrap() as usize;
        let payload = r.take(total)?.to_vec();
        if !r.is_at_end() {
            return Err(Error::corrupt("trailing bytes after payloads"));
        }
        for i in 0..n {
            if flags[i] != (raw_lens[i] >= min_bcs_size) {
                return Err(Error::corrupt("compression flag disagrees with threshold"));
            }
        }
        Ok(Self {
            backend,
            min_bcs_size,
            universe,
            lens,
            raw_lens,
            flags,
            offsets,
            payload,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn threshold_and_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = 100_000;
        let mut lists = vec![
            MonotoneList::new(vec![1], u).unwrap(),
            MonotoneList::new((1..=10).collect(), u).unwrap(),
            MonotoneList::new(vec![], u).unwrap(),
        ];
        for _ in 0..200 {
            let mut v: Vec<u32> = (0..rng.gen_range(1..400))
                .map(|_| rng.gen_range(1..=u))
                .collect();
            v.sort_unstable();
            v.dedup();
            lists.push(MonotoneList::new(v, u).unwrap());
        }
        let idx = VLzIndex::build(&lists, u, DEFAULT_MIN_BCS_SIZE).unwrap();
        assert!(!idx.is_compressed(0));
        assert!(idx.is_compressed(1));
        assert!(!idx.is_compressed(2));
        let back = VLzIndex::from_bytes(&idx.to_bytes()).unwrap();
        assert_eq!(back, idx);
        for (i, l) in lists.iter().enumerate() {
            assert_eq!(back.fetch(i).unwrap(), l.values());
        }
        assert!(back.fetch(lists.len()).is_err());
    }
}
