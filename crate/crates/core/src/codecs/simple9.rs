//! Simple9: 32-bit words with a 4-bit selector in the high nibble and 28
//! payload bits split into equal slots. Slot `i` occupies bits
//! `i * width .. (i + 1) * width`. Each slot stores `gap - 1`; unused slots
//! are zero and the element count tells the decoder where data ends.
//!
//! The exception streams of PforDelta use a variant with a tenth selector
//! ([`ESCAPE`]) whose word is followed by one raw 32-bit value, so values
//! beyond 28 bits can still be coded there.

use crate::{Error, Result};

/// `(slots, width)` for selectors `0..9`.
pub const SELECTORS: [(u32, u32); 9] = [
    (28, 1),
    (14, 2),
    (9, 3),
    (7, 4),
    (5, 5),
    (4, 7),
    (3, 9),
    (2, 14),
    (1, 28),
];

/// Selector of the PforDelta exception variant: the next word holds `v - 1`.
pub const ESCAPE: u32 = 9;

const MAX_SLOT: u64 = 1 << 28;

/// Packs values (each `>= 1`) into words. `escape` enables the raw-word
/// selector; without it a value above `2^28` is an error.
pub fn pack(values: &[u32], escape: bool) -> Result<Vec<u32>> {
    let mut words = Vec::with_capacity(values.len() / 4 + 1);
    let mut i = 0;
    'outer: while i < values.len() {
        let remaining = values.len() - i;
        for (sel, &(slots, width)) in SELECTORS.iter().enumerate() {
            let take = remaining.min(slots as usize);
            let limit = 1u64 << width;
            if values[i..i + take]
                .iter()
                .all(|&v| u64::from(v - 1) < limit)
            {
                let mut word = (sel as u32) << 28;
                for (slot, &v) in values[i..i + take].iter().enumerate() {
                    word |= (v - 1) << (slot as u32 * width);
                }
                words.push(word);
                i += take;
                continue 'outer;
            }
        }
        let v = values[i];
        debug_assert!(u64::from(v - 1) >= MAX_SLOT);
        if !escape {
            return Err(Error::ValueTooLarge {
                value: u64::from(v),
                codec: "Simple9",
            });
        }
        words.push(ESCAPE << 28);
        words.push(v - 1);
        i += 1;
    }
    Ok(words)
}

/// Decodes up to `want` slots of one non-escape word.
#[inline]
pub fn unpack_word(word: u32, want: usize, out: &mut Vec<u32>) -> Result<()> {
    let sel = word >> 28;
    let Some(&(slots, width)) = SELECTORS.get(sel as usize) else {
        return Err(Error::corrupt(format!("invalid simple9 selector {sel}")));
    };
    let mask = (1u32 << width) - 1;
    for slot in 0..(slots as usize).min(want) {
        out.push(((word >> (slot as u32 * width)) & mask) + 1);
    }
    Ok(())
}

/// Decodes exactly `n` values, pulling words from `next_word` as needed.
pub fn unpack_from<F>(mut next_word: F, n: usize, out: &mut Vec<u32>) -> Result<()>
where
    F: FnMut() -> Result<u32>,
{
    let target = out.len() + n;
    while out.len() < target {
        let word = next_word()?;
        let sel = word >> 28;
        if sel == ESCAPE {
            let raw = next_word()?;
            if raw == u32::MAX {
                return Err(Error::corrupt("simple9 escaped value exceeds 32 bits"));
            }
            out.push(raw + 1);
            continue;
        }
        unpack_word(word, target - out.len(), out)?;
    }
    Ok(())
}

/// Decodes exactly `n` values from `words[*pos..]`, advancing `*pos`.
pub fn unpack_into(words: &[u32], pos: &mut usize, n: usize, out: &mut Vec<u32>) -> Result<()> {
    unpack_from(
        || {
            let w = words
                .get(*pos)
                .copied()
                .ok_or_else(|| Error::corrupt("simple9 stream truncated"))?;
            *pos += 1;
            Ok(w)
        },
        n,
        out,
    )
}

pub fn words_to_bytes(words: &[u32]) -> Vec<u8> {
    words.iter().flat_map(|w| w.to_le_bytes()).collect()
}

pub fn bytes_to_words(buf: &[u8]) -> Result<Vec<u32>> {
    if !buf.len().is_multiple_of(4) {
        return Err(Error::corrupt("simple9 stream is not word aligned"));
    }
    Ok(buf
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn encode(gaps: &[u32]) -> Result<Vec<u8>> {
    Ok(words_to_bytes(&pack(gaps, false)?))
}

pub fn decode(buf: &[u8], n: usize) -> Result<Vec<u32>> {
    let words = bytes_to_words(buf)?;
    let mut out = Vec::with_capacity(n);
    let mut pos = 0;
    unpack_into(&words, &mut pos, n, &mut out)?;
    Ok(out)
}
