//! Gap codecs for strictly increasing integer lists.
//!
//! Lists are turned into gap sequences (`gaps[0] = values[0]`, then
//! successive differences), and gaps are coded by one of the [`CodecId`]
//! layouts. A standalone stream carries an 8-byte header so it can be decoded
//! without outside context; see `FORMATS.md` at the repository root.

pub mod bits;
pub mod pfor;
pub mod rice;
pub mod simple9;
pub mod vbyte;

use crate::bytes::ByteReader;
use crate::{Error, Result};
use bits::BitReader;

/// Strictly increasing values `>= 1` with a universe bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneList {
    values: Vec<u32>,
    universe: u32,
}

impl MonotoneList {
    pub fn new(values: Vec<u32>, universe: u32) -> Result<Self> {
        validate_increasing(&values)?;
        if let Some(&last) = values.last() {
            if last > universe {
                return Err(Error::InvalidList {
                    index: values.len() - 1,
                    reason: "value exceeds universe",
                });
            }
        }
        Ok(Self { values, universe })
    }

    /// Uses the last value as the universe.
    pub fn from_values(values: Vec<u32>) -> Result<Self> {
        let u = values.last().copied().unwrap_or(0);
        Self::new(values, u)
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }
}

pub fn validate_increasing(values: &[u32]) -> Result<()> {
    if values.first() == Some(&0) {
        return Err(Error::InvalidList {
            index: 0,
            reason: "values must be >= 1",
        });
    }
    if let Some(i) = values.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::InvalidList {
            index: i + 1,
            reason: "values must be strictly increasing",
        });
    }
    Ok(())
}

/// Gap form of a [`MonotoneList`]; every gap is `>= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GapSequence(pub Vec<u32>);

impl GapSequence {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn to_gaps(values: &[u32]) -> Result<GapSequence> {
    validate_increasing(values)?;
    let mut prev = 0;
    Ok(GapSequence(
        values
            .iter()
            .map(|&v| {
                let g = v - prev;
                prev = v;
                g
            })
            .collect(),
    ))
}

pub fn from_gaps(gaps: &[u32]) -> Result<Vec<u32>> {
    let mut acc = 0u32;
    gaps.iter()
        .enumerate()
        .map(|(i, &g)| {
            if g == 0 {
                return Err(Error::InvalidGaps {
                    index: i,
                    reason: "gap must be >= 1",
                });
            }
            acc = acc.checked_add(g).ok_or(Error::InvalidGaps {
                index: i,
                reason: "prefix sum exceeds 32 bits",
            })?;
            Ok(acc)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum CodecId {
    Vbyte = 1,
    Rice = 2,
    Simple9 = 3,
    PforDelta = 4,
    RiceRuns = 5,
}

impl CodecId {
    pub const ALL: [CodecId; 5] = [
        CodecId::Vbyte,
        CodecId::Rice,
        CodecId::Simple9,
        CodecId::PforDelta,
        CodecId::RiceRuns,
    ];

    pub fn from_u8(v: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| *c as u8 == v)
            .ok_or_else(|| Error::corrupt(format!("unknown codec id {v}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            CodecId::Vbyte => "Vbyte",
            CodecId::Rice => "Rice",
            CodecId::Simple9 => "Simple9",
            CodecId::PforDelta => "PforDelta",
            CodecId::RiceRuns => "Rice-Runs",
        }
    }

    /// Parameter used when the caller does not pick one: the Rice family
    /// selects per list, PforDelta uses its block length.
    pub fn default_param(self, gaps: &[u32]) -> Result<u16> {
        if gaps.is_empty() && matches!(self, CodecId::Rice | CodecId::RiceRuns) {
            return Ok(0);
        }
        Ok(match self {
            CodecId::Vbyte | CodecId::Simple9 => 0,
            CodecId::Rice => u16::from(rice::select_param(gaps)?),
            CodecId::RiceRuns => u16::from(rice::select_param(&rice::run_tokens(gaps))?),
            CodecId::PforDelta => pfor::DEFAULT_THRESHOLD,
        })
    }
}

fn rice_param(param: u16) -> Result<u8> {
    if param > u16::from(rice::MAX_PARAM) {
        return Err(Error::Config(format!("Rice parameter {param} exceeds 62")));
    }
    Ok(param as u8)
}

/// Encodes gaps with `codec`. `param` is the Rice `b` or the PforDelta block
/// length; other codecs ignore it.
pub fn encode(gaps: &[u32], codec: CodecId, param: u16) -> Result<Vec<u8>> {
    if let Some(i) = gaps.iter().position(|&g| g == 0) {
        return Err(Error::InvalidGaps {
            index: i,
            reason: "gap must be >= 1",
        });
    }
    match codec {
        CodecId::Vbyte => Ok(vbyte::encode(gaps)),
        CodecId::Rice => Ok(rice::encode(gaps, rice_param(param)?)),
        CodecId::RiceRuns => Ok(rice::encode_runs(gaps, rice_param(param)?)),
        CodecId::Simple9 => simple9::encode(gaps),
        CodecId::PforDelta => pfor::encode(gaps, param),
    }
}

pub fn decode(buf: &[u8], codec: CodecId, n: usize, param: u16) -> Result<Vec<u32>> {
    match codec {
        CodecId::Vbyte => vbyte::decode(buf, n),
        CodecId::Rice => rice::decode(buf, n, rice_param(param)?),
        CodecId::RiceRuns => rice::decode_runs(buf, n, rice_param(param)?),
        CodecId::Simple9 => simple9::decode(buf, n),
        CodecId::PforDelta => pfor::decode(buf, n, param),
    }
}

pub fn rice_param_select(gaps: &[u32]) -> Result<u8> {
    rice::select_param(gaps)
}

/// Self-describing stream: 8-byte header followed by the codec body.
///
/// Header: codec id (u8), reserved (u8, zero), element count (u32 LE),
/// parameter (u16 LE).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedStream {
    pub codec: CodecId,
    pub n: u32,
    pub param: u16,
    pub body: Vec<u8>,
}

pub const STREAM_HEADER_LEN: usize = 8;

impl EncodedStream {
    /// Encodes with the codec's default parameter.
    pub fn encode(gaps: &GapSequence, codec: CodecId) -> Result<Self> {
        let param = codec.default_param(gaps.as_slice())?;
        Self::encode_with(gaps, codec, param)
    }

    pub fn encode_with(gaps: &GapSequence, codec: CodecId, param: u16) -> Result<Self> {
        let n =
            u32::try_from(gaps.len()).map_err(|_| Error::Config("more than 2^32 gaps".into()))?;
        Ok(Self {
            codec,
            n,
            param,
            body: encode(gaps.as_slice(), codec, param)?,
        })
    }

    pub fn decode(&self) -> Result<GapSequence> {
        decode(&self.body, self.codec, self.n as usize, self.param).map(GapSequence)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(STREAM_HEADER_LEN + self.body.len());
        out.push(self.codec as u8);
        out.push(0);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.param.to_le_bytes());
        out.extend_from_slice(&self.body);
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        let codec = CodecId::from_u8(r.u8()?)?;
        let _reserved = r.u8()?;
        let n = r.u32()?;
        let param = r.u16()?;
        Ok(Self {
            codec,
            n,
            param,
            body: buf[STREAM_HEADER_LEN..].to_vec(),
        })
    }
}

/// Incremental decoder yielding `(gap, repeat)` runs. Only Rice-Runs yields
/// repeats above one; it lets list cursors cross a unit-gap run in one step.
pub struct GapReader<'a> {
    state: ReaderState<'a>,
    remaining: usize,
}

enum ReaderState<'a> {
    Vbyte {
        buf: &'a [u8],
        pos: usize,
    },
    Rice {
        bits: BitReader<'a>,
        b: u8,
    },
    RiceRuns {
        bits: BitReader<'a>,
        b: u8,
    },
    Simple9 {
        buf: &'a [u8],
        pos: usize,
        block: Vec<u32>,
        at: usize,
    },
    Pfor {
        reader: ByteReader<'a>,
        block_len: usize,
        block: Vec<u32>,
        at: usize,
    },
}

impl<'a> GapReader<'a> {
    pub fn new(buf: &'a [u8], codec: CodecId, n: usize, param: u16) -> Result<Self> {
        let state = match codec {
            CodecId::Vbyte => ReaderState::Vbyte { buf, pos: 0 },
            CodecId::Rice => ReaderState::Rice {
                bits: BitReader::new(buf),
                b: rice_param(param)?,
            },
            CodecId::RiceRuns => ReaderState::RiceRuns {
                bits: BitReader::new(buf),
                b: rice_param(param)?,
            },
            CodecId::Simple9 => ReaderState::Simple9 {
                buf,
                pos: 0,
                block: Vec::with_capacity(28),
                at: 0,
            },
            CodecId::PforDelta => {
                if param == 0 || param > pfor::MAX_THRESHOLD {
                    return Err(Error::Config(format!("bad pfdThreshold {param}")));
                }
                ReaderState::Pfor {
                    reader: ByteReader::new(buf),
                    block_len: param as usize,
                    block: Vec::new(),
                    at: 0,
                }
            }
        };
        Ok(Self {
            state,
            remaining: n,
        })
    }

    /// Vbyte reader positioned at byte `offset` with `remaining` values left.
    pub fn vbyte_at(buf: &'a [u8], offset: usize, remaining: usize) -> Self {
        Self {
            state: ReaderState::Vbyte { buf, pos: offset },
            remaining,
        }
    }

    /// Byte offset of the next value (Vbyte only).
    pub fn byte_offset(&self) -> Option<usize> {
        match &self.state {
            ReaderState::Vbyte { pos, .. } => Some(*pos),
            _ => None,
        }
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// Next `(gap, repeat)`; `None` once `n` values have been produced.
    #[inline]
    pub fn next_run(&mut self) -> Result<Option<(u32, u32)>> {
        if self.remaining == 0 {
            return Ok(None);
        }
        let (gap, k) = match &mut self.state {
            ReaderState::Vbyte { buf, pos } => (vbyte::read(buf, pos)?, 1),
            ReaderState::Rice { bits, b } => (rice::read_code(bits, *b)?, 1),
            ReaderState::RiceRuns { bits, b } => rice::read_run(bits, *b)?,
            ReaderState::Simple9 {
                buf,
                pos,
                block,
                at,
            } => {
                if *at == block.len() {
                    block.clear();
                    *at = 0;
                    let word = buf
                        .get(*pos..*pos + 4)
                        .ok_or_else(|| Error::corrupt("simple9 stream truncated"))?;
                    *pos += 4;
                    let word = u32::from_le_bytes(word.try_into().unwrap());
                    simple9::unpack_word(word, self.remaining.min(28), block)?;
                }
                let g = block[*at];
                *at += 1;
                (g, 1)
            }
            ReaderState::Pfor {
                reader,
                block_len,
                block,
                at,
            } => {
                if *at == block.len() {
                    block.clear();
                    *at = 0;
                    let len = (*block_len).min(self.remaining);
                    pfor::decode_block(reader, len, block)?;
                }
                let g = block[*at];
                *at += 1;
                (g, 1)
            }
        };
        if gap == 0 {
            return Err(Error::corrupt("zero gap"));
        }
        if k == 0 || k as usize > self.remaining {
            return Err(Error::corrupt("run length exceeds element count"));
        }
        self.remaining -= k as usize;
        Ok(Some((gap, k)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_examples() {
        assert_eq!(to_gaps(&[3, 7, 8]).unwrap().0, vec![3, 4, 1]);
        assert_eq!(to_gaps(&[1]).unwrap().0, vec![1]);
        assert_eq!(to_gaps(&[5, 6, 7, 8]).unwrap().0, vec![5, 1, 1, 1]);
        assert_eq!(from_gaps(&[3, 4, 1]).unwrap(), vec![3, 7, 8]);
        assert_eq!(from_gaps(&[1]).unwrap(), vec![1]);
        assert_eq!(from_gaps(&[2, 2, 2]).unwrap(), vec![2, 4, 6]);
    }

    #[test]
    fn gap_errors() {
        assert!(matches!(
            to_gaps(&[3, 3]),
            Err(Error::InvalidList { index: 1, .. })
        ));
        assert!(matches!(to_gaps(&[5, 2]), Err(Error::InvalidList { .. })));
        assert!(matches!(
            to_gaps(&[0, 2]),
            Err(Error::InvalidList { index: 0, .. })
        ));
        assert!(matches!(
            from_gaps(&[1, 0]),
            Err(Error::InvalidGaps { index: 1, .. })
        ));
        assert!(matches!(
            from_gaps(&[u32::MAX, 1]),
            Err(Error::InvalidGaps { .. })
        ));
        assert!(MonotoneList::new(vec![1, 9], 8).is_err());
    }

    #[test]
    fn stream_header_layout() {
        let s = EncodedStream::encode(&GapSequence(vec![128]), CodecId::Vbyte).unwrap();
        assert_eq!(s.to_bytes(), vec![1, 0, 1, 0, 0, 0, 0, 0, 0x00, 0x81]);
        let back = EncodedStream::from_bytes(&s.to_bytes()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.decode().unwrap().0, vec![128]);
        assert!(EncodedStream::from_bytes(&[9, 0, 0, 0, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn encode_rejects_zero_gaps_and_wide_simple9() {
        assert!(encode(&[1, 0], CodecId::Vbyte, 0).is_err());
        assert!(matches!(
            encode(&[(1 << 28) + 1], CodecId::Simple9, 0),
            Err(Error::ValueTooLarge { .. })
        ));
    }

    #[test]
    fn reader_matches_bulk_decode() {
        let gaps: Vec<u32> = (0..500u32)
            .map(|i| if i % 7 < 4 { 1 } else { 1 + i * 13 })
            .collect();
        for codec in CodecId::ALL {
            let param = codec.default_param(&gaps).unwrap();
            let body = encode(&gaps, codec, param).unwrap();
            let mut r = GapReader::new(&body, codec, gaps.len(), param).unwrap();
            let mut out = Vec::new();
            while let Some((g, k)) = r.next_run().unwrap() {
                out.extend(std::iter::repeat_n(g, k as usize));
            }
            assert_eq!(out, gaps, "{codec:?}");
        }
    }
}
