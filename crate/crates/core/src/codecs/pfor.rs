//! PforDelta over blocks of `threshold` gaps.
//!
//! Block layout:
//!
//! ```text
//! b: u8 | exceptions: varint | L*b bits (MSB first, byte padded) | exception words
//! ```
//!
//! `b` is the smallest width holding at least 90% of the block's `gap - 1`
//! values. Values that do not fit keep their low `b` bits in place; their
//! `(position delta, high bits)` pairs go to a Simple9-variant word stream
//! (with the escape selector for values past 28 bits). Position deltas are
//! `pos + 1` for the first exception and `pos - prev` afterwards, so every
//! coded value is at least 1.

use super::bits::{BitReader, BitWriter};
use super::simple9;
use crate::bytes::{ByteReader, ByteWriter};
use crate::{Error, Result};

pub const DEFAULT_THRESHOLD: u16 = 100;
pub const MAX_THRESHOLD: u16 = 4096;
pub const EXCEPTION_FRACTION: f64 = 0.10;

/// Smallest width such that at least `ceil(0.9 * len)` values fit.
pub fn block_width(xs: &[u32]) -> u32 {
    let need = xs.len() - max_exceptions_floor(xs.len());
    let mut by_width = [0usize; 33];
    for &x in xs {
        by_width[(32 - x.leading_zeros()) as usize] += 1;
    }
    let mut fit = 0;
    for (w, &c) in by_width.iter().enumerate() {
        fit += c;
        if fit >= need {
            return w as u32;
        }
    }
    32
}

/// Largest exception count a block of `len` values may carry.
fn max_exceptions_floor(len: usize) -> usize {
    // floor(0.1 * len) computed exactly.
    len / 10
}

pub fn max_exceptions(len: usize) -> usize {
    (len as f64 * EXCEPTION_FRACTION).ceil() as usize
}

fn check_threshold(threshold: u16) -> Result<usize> {
    if threshold == 0 || threshold > MAX_THRESHOLD {
        return Err(Error::Config(format!(
            "pfdThreshold must be in 1..={MAX_THRESHOLD}, got {threshold}"
        )));
    }
    Ok(threshold as usize)
}

fn encode_block(gaps: &[u32], w: &mut ByteWriter) -> Result<usize> {
    let xs: Vec<u32> = gaps.iter().map(|&g| g - 1).collect();
    let b = block_width(&xs);
    let limit = if b == 32 { u64::MAX } else { (1u64 << b) - 1 };
    let mut bits = BitWriter::new();
    let mut exceptions = Vec::new();
    let mut prev: Option<usize> = None;
    for (pos, &x) in xs.iter().enumerate() {
        if b > 0 {
            bits.push_bits(u64::from(x) & limit, b);
        }
        if u64::from(x) > limit {
            let delta = match prev {
                None => pos + 1,
                Some(p) => pos - p,
            };
            exceptions.push(delta as u32);
            exceptions.push(x >> b);
            prev = Some(pos);
        }
    }
    let count = exceptions.len() / 2;
    w.u8(b as u8);
    w.varint(count as u64);
    w.bytes(&bits.into_bytes());
    if count > 0 {
        let words = simple9::pack(&exceptions, true)?;
        w.bytes(&simple9::words_to_bytes(&words));
    }
    Ok(count)
}

pub fn encode(gaps: &[u32], threshold: u16) -> Result<Vec<u8>> {
    let block = check_threshold(threshold)?;
    let mut w = ByteWriter::new();
    for chunk in gaps.chunks(block) {
        encode_block(chunk, &mut w)?;
    }
    Ok(w.into_inner())
}

/// Decodes one block of `len` gaps, appending to `out`.
pub fn decode_block(r: &mut ByteReader<'_>, len: usize, out: &mut Vec<u32>) -> Result<()> {
    let b = u32::from(r.u8()?);
    if b > 32 {
        return Err(Error::corrupt(format!("pfor width {b} exceeds 32")));
    }
    let count = r.varint_usize()?;
    if count > len {
        return Err(Error::corrupt("pfor block has more exceptions than values"));
    }
    let packed = r.take((len * b as usize).div_ceil(8))?;
    let base = out.len();
    let mut bits = BitReader::new(packed);
    for _ in 0..len {
        let x = if b > 0 { bits.read_bits(b)? } else { 0 };
        out.push(x as u32);
    }
    if count > 0 {
        // Exception words carry no byte length; the value count delimits them.
        let mut vals = Vec::with_capacity(count * 2);
        simple9::unpack_from(|| r.u32(), count * 2, &mut vals)?;
        let mut at: Option<usize> = None;
        for pair in vals.chunks_exact(2) {
            let pos = match at {
                None => pair[0] as usize - 1,
                Some(p) => p + pair[0] as usize,
            };
            if pos >= len {
                return Err(Error::corrupt("pfor exception position out of block"));
            }
            let high = u64::from(pair[1]) << b;
            let x = high | u64::from(out[base + pos]);
            out[base + pos] =
                u32::try_from(x).map_err(|_| Error::corrupt("pfor exception exceeds 32 bits"))?;
            at = Some(pos);
        }
    }
    for x in &mut out[base..] {
        *x = x
            .checked_add(1)
            .ok_or_else(|| Error::corrupt("pfor gap exceeds 32 bits"))?;
    }
    Ok(())
}

pub fn decode(buf: &[u8], n: usize, threshold: u16) -> Result<Vec<u32>> {
    let block = check_threshold(threshold)?;
    let mut r = ByteReader::new(buf);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let len = block.min(n - out.len());
        decode_block(&mut r, len, &mut out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_covers_ninety_percent() {
        let mut xs = vec![3u32; 90];
        xs.extend([1000u32; 10]);
        assert_eq!(block_width(&xs), 2);
        xs.push(1000);
        // 11 of 101 now exceed two bits; floor(10.1) = 10 exceptions allowed.
        assert_eq!(block_width(&xs), 10);
        assert_eq!(block_width(&[0, 0, 0]), 0);
    }

    #[test]
    fn exceptions_roundtrip() {
        let mut gaps: Vec<u32> = (0..100).map(|i| 1 + (i % 4)).collect();
        gaps[3] = 5000;
        gaps[50] = u32::MAX;
        gaps[99] = 1 << 29;
        let enc = encode(&gaps, 100).unwrap();
        assert_eq!(decode(&enc, gaps.len(), 100).unwrap(), gaps);
    }

    #[test]
    fn partial_last_block() {
        let gaps: Vec<u32> = (1..=257).collect();
        for t in [1, 7, 100, 128, 4096] {
            let enc = encode(&gaps, t).unwrap();
            assert_eq!(decode(&enc, gaps.len(), t).unwrap(), gaps, "t={t}");
        }
    }

    #[test]
    fn invalid_threshold_and_truncation() {
        assert!(encode(&[1], 0).is_err());
        assert!(encode(&[1], 4097).is_err());
        let enc = encode(&[9, 9, 9, 9], 100).unwrap();
        assert!(decode(&enc[..enc.len() - 1], 4, 100).is_err());
    }
}
