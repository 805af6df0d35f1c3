//! Sample directories over Vbyte-coded lists.
//!
//! - CM (list sampling): every `p = max(1, k * ceil(log2 len))` elements,
//!   the element's value and the byte offset of its code.
//! - ST (domain sampling): the universe is cut into buckets of width
//!   `s = 2^ceil(log2(u * B / len))`; bucket `j` points at the first element
//!   `>= j * s` together with the value preceding it.

use crate::codecs::rice::ceil_log2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CmEntry {
    pub value: u32,
    pub offset: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmSamples {
    pub k: u32,
    pub period: u32,
    pub entries: Vec<CmEntry>,
}

/// `max(1, k * ceil(log2 len))`.
pub fn cm_period(k: u32, len: usize) -> u32 {
    (k.saturating_mul(ceil_log2(len as u64))).max(1)
}

impl CmSamples {
    /// `offsets[i]` is the byte offset of element `i`'s code.
    pub fn build(k: u32, values: &[u32], offsets: &[u32]) -> Self {
        let period = cm_period(k, values.len());
        let entries = (0..values.len())
            .step_by(period as usize)
            .map(|i| CmEntry {
                value: values[i],
                offset: offsets[i],
            })
            .collect();
        Self { k, period, entries }
    }

    pub fn count_for(len: usize, period: u32) -> usize {
        len.div_ceil(period as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StEntry {
    /// Index of the first element `>= j * s` (list length when none).
    pub idx: u32,
    /// Byte offset of that element's code (stream length when none).
    pub offset: u32,
    /// Value of the element before `idx` (0 at the start).
    pub prev: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StSamples {
    pub b: u32,
    pub shift: u32,
    pub buckets: Vec<StEntry>,
}

/// Exponent `e` of the bucket width `2^e`: smallest `e` with
/// `2^e >= u * B / len`.
pub fn st_shift(universe: u32, b: u32, len: usize) -> u32 {
    let target = u128::from(universe) * u128::from(b);
    let len = len.max(1) as u128;
    let mut e = 0;
    while (len << e) < target {
        e += 1;
    }
    e
}

/// `ceil(u / s) + 1`.
pub fn st_bucket_count(universe: u32, shift: u32) -> usize {
    let s = 1u64 << shift;
    (u64::from(universe).div_ceil(s) + 1) as usize
}

impl StSamples {
    pub fn build(b: u32, universe: u32, values: &[u32], offsets: &[u32], end_offset: u32) -> Self {
        let shift = st_shift(universe, b, values.len());
        let nb = st_bucket_count(universe, shift);
        let mut buckets = Vec::with_capacity(nb);
        let mut i = 0usize;
        for j in 0..nb {
            let lo = (j as u64) << shift;
            while i < values.len() && u64::from(values[i]) < lo {
                i += 1;
            }
            buckets.push(StEntry {
                idx: i as u32,
                offset: offsets.get(i).copied().unwrap_or(end_offset),
                prev: if i == 0 { 0 } else { values[i - 1] },
            });
        }
        Self { b, shift, buckets }
    }

    #[inline]
    pub fn bucket_of(&self, x: u32) -> usize {
        ((x as u64 >> self.shift) as usize).min(self.buckets.len() - 1)
    }

    pub fn width(&self) -> u64 {
        1 << self.shift
    }
}
