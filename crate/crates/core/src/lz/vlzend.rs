//! All lists' Vbyte streams concatenated and LZ-End compressed as one text;
//! a list is fetched by extracting its byte range.

use super::lzend::LzEndParse;
use crate::bytes::{ByteReader, ByteWriter};
use crate::codecs::{self, vbyte, MonotoneList};
use crate::postings::cursor::SliceCursor;
use crate::postings::intersect::{self, IntersectStats};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"VXVE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VLzEndIndex {
    universe: u32,
    lens: Vec<u32>,
    offsets: Vec<u64>,
    parse: LzEndParse,
}

impl VLzEndIndex {
    pub fn build(lists: &[MonotoneList], universe: u32, ds: u32) -> Result<Self> {
        let mut text = Vec::new();
        let mut lens = Vec::with_capacity(lists.len());
        let mut offsets = vec![0u64];
        for l in lists {
            if l.universe() != universe {
                return Err(Error::UniverseMismatch(
                    u64::from(universe),
                    u64::from(l.universe()),
                ));
            }
            for g in codecs::to_gaps(l.values())?.0 {
                vbyte::write(&mut text, g);
            }
            lens.push(l.len() as u32);
            offsets.push(text.len() as u64);
        }
        Ok(Self {
            universe,
            lens,
            offsets,
            parse: LzEndParse::build(&text, ds)?,
        })
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

    pub fn parse(&self) -> &LzEndParse {
        &self.parse
    }

    pub fn fetch(&self, i: usize) -> Result<Vec<u32>> {
        if i >= self.num_lists() {
            return Err(Error::OutOfRange {
                what: "list",
                index: i as u64,
                limit: self.num_lists() as u64,
            });
        }
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        let raw = self.parse.extract(s, e - s)?;
        codecs::from_gaps(&vbyte::decode(&raw, self.lens[i] as usize)?)
            .map_err(|_| Error::corrupt("list values overflow"))
    }

    /// Fetches every list, then merges.
    pub fn intersect(&self, ids: &[usize], stats: &mut IntersectStats) -> Result<Vec<u32>> {
        let lists = ids
            .iter()
            .map(|&i| self.fetch(i))
            .collect::<Result<Vec<_>>>()?;
        let mut cs: Vec<SliceCursor> = lists.iter().map(|l| SliceCursor::new(l)).collect();
        intersect::merge(&mut cs, stats)
    }

    /// Header: magic, universe u32, list count u32; per list varint length
    /// and varint Vbyte byte length; then the LZ-End parse.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.bytes(MAGIC);
        w.u32(self.universe);
        w.u32(self.lens.len() as u32);
        for (i, &l) in self.lens.iter().enumerate() {
            w.varint(u64::from(l));
            w.varint(self.offsets[i + 1] - self.offsets[i]);
        }
        self.parse.write_to(&mut w);
        w.into_inner()
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        r.expect_magic(MAGIC)?;
        let universe = r.u32()?;
        let n = r.u32()? as usize;
        let mut lens = Vec::with_capacity(n.min(1 << 20));
        let mut offsets = vec![0u64];
        for _ in 0..n {
            lens.push(r.varint_u32()?);
            let b = r.varint()?;
            let next = offsets
                .last()
                .unwrap()
                .checked_add(b)
                .ok_or(Error::corrupt("offset overflow"))?;
            offsets.push(next);
        }
        let parse = LzEndParse::read_from(&mut r)?;
        if !r.is_at_end() {
            return Err(Error::corrupt("trailing bytes after index"));
        }
        if *offsets.last().unwrap() != parse.text_len() {
            return Err(Error::corrupt("list directory disagrees with parse length"));
        }
        Ok(Self {
            universe,
            lens,
            offsets,
            parse,
        })
    }
}
