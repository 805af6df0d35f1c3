//! Vbyte: 7 payload bits per byte, least significant group first, and the
//! high bit set only on the final byte of each value.

use crate::{Error, Result};

#[inline]
pub fn write(out: &mut Vec<u8>, mut v: u32) {
    while v >= 0x80 {
        out.push((v & 0x7f) as u8);
        v >>= 7;
    }
    out.push(v as u8 | 0x80);
}

pub fn encoded_len(v: u32) -> usize {
    match v {
        0..=0x7f => 1,
        0x80..=0x3fff => 2,
        0x4000..=0x1f_ffff => 3,
        0x20_0000..=0x0fff_ffff => 4,
        _ => 5,
    }
}

/// Reads one value starting at `*pos`, advancing it past the terminator.
#[inline]
pub fn read(buf: &[u8], pos: &mut usize) -> Result<u32> {
    let mut v = 0u64;
    let mut shift = 0u32;
    loop {
        let Some(&b) = buf.get(*pos) else {
            return Err(Error::corrupt("vbyte stream truncated"));
        };
        *pos += 1;
        v |= u64::from(b & 0x7f) << shift;
        if b & 0x80 != 0 {
            return u32::try_from(v).map_err(|_| Error::corrupt("vbyte value exceeds 32 bits"));
        }
        shift += 7;
        if shift > 28 {
            return Err(Error::corrupt("vbyte value longer than 5 bytes"));
        }
    }
}

pub fn encode(gaps: &[u32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(gaps.len());
    for &g in gaps {
        write(&mut out, g);
    }
    out
}

pub fn decode(buf: &[u8], n: usize) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(n);
    let mut pos = 0;
    for _ in 0..n {
        let g = read(buf, &mut pos)?;
        if g == 0 {
            return Err(Error::corrupt("vbyte gap of zero"));
        }
        out.push(g);
    }
    Ok(out)
}

/// Decodes every value in `buf`; used where the element count is implied by
/// the byte length (per-list payloads of the LZ stores).
pub fn decode_all(buf: &[u8]) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(buf.len());
    let mut pos = 0;
    while pos < buf.len() {
        let g = read(buf, &mut pos)?;
        if g == 0 {
            return Err(Error::corrupt("vbyte gap of zero"));
        }
        out.push(g);
    }
    Ok(out)
}
