//! Rice codes and the run-length Rice variant.
//!
//! A gap `v >= 1` is coded from `x = v - 1`: the quotient `x >> b` in unary
//! (ones closed by a zero) followed by the low `b` bits of `x`, MSB first.
//!
//! Rice-Runs replaces every maximal run of `k` unit gaps by the pair
//! `ricecode(1), ricecode(k)`. A decoded `1` is therefore always followed by
//! a run length, which keeps the decoder stateless.

use super::bits::{BitReader, BitWriter};
use crate::{Error, Result};

pub const MAX_PARAM: u8 = 62;

#[inline]
pub fn write_code(w: &mut BitWriter, v: u32, b: u8) {
    let x = u64::from(v) - 1;
    w.push_unary(x >> b);
    if b > 0 {
        w.push_bits(x & ((1u64 << b) - 1), u32::from(b));
    }
}

#[inline]
pub fn read_code(r: &mut BitReader<'_>, b: u8) -> Result<u32> {
    let q = r.read_unary()?;
    let rem = if b > 0 { r.read_bits(u32::from(b))? } else { 0 };
    let x = q
        .checked_shl(u32::from(b))
        .filter(|s| s >> b == q)
        .map(|s| s | rem)
        .ok_or_else(|| Error::corrupt("rice quotient overflow"))?;
    u32::try_from(x + 1).map_err(|_| Error::corrupt("rice value exceeds 32 bits"))
}

/// Bits used by one Rice code word.
#[inline]
pub fn code_len(v: u32, b: u8) -> u64 {
    ((u64::from(v) - 1) >> b) + 1 + u64::from(b)
}

pub fn cost(values: &[u32], b: u8) -> u64 {
    values.iter().map(|&v| code_len(v, b)).sum()
}

/// Rice parameter minimizing total code length over `values`, scanning
/// `b` in `0..=ceil(log2(max))` and keeping the smallest `b` on ties.
pub fn select_param(values: &[u32]) -> Result<u8> {
    let max = *values.iter().max().ok_or(Error::InvalidGaps {
        index: 0,
        reason: "cannot select a Rice parameter for an empty sequence",
    })?;
    let hi = ceil_log2(u64::from(max)) as u8;
    let mut best = (u64::MAX, 0u8);
    for b in 0..=hi {
        let c = cost(values, b);
        if c < best.0 {
            best = (c, b);
        }
    }
    Ok(best.1)
}

pub(crate) fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

pub fn encode(gaps: &[u32], b: u8) -> Vec<u8> {
    let mut w = BitWriter::new();
    for &g in gaps {
        write_code(&mut w, g, b);
    }
    w.into_bytes()
}

pub fn decode(buf: &[u8], n: usize, b: u8) -> Result<Vec<u32>> {
    let mut r = BitReader::new(buf);
    (0..n).map(|_| read_code(&mut r, b)).collect()
}

/// The token sequence Rice-Runs actually codes: unit-gap runs collapse to
/// `1, k`.
pub fn run_tokens(gaps: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(gaps.len());
    let mut i = 0;
    while i < gaps.len() {
        if gaps[i] == 1 {
            let start = i;
            while i < gaps.len() && gaps[i] == 1 {
                i += 1;
            }
            out.push(1);
            out.push((i - start) as u32);
        } else {
            out.push(gaps[i]);
            i += 1;
        }
    }
    out
}

pub fn encode_runs(gaps: &[u32], b: u8) -> Vec<u8> {
    encode(&run_tokens(gaps), b)
}

/// Reads the next `(gap, repeat)` pair of a Rice-Runs stream.
#[inline]
pub fn read_run(r: &mut BitReader<'_>, b: u8) -> Result<(u32, u32)> {
    let v = read_code(r, b)?;
    if v == 1 {
        Ok((1, read_code(r, b)?))
    } else {
        Ok((v, 1))
    }
}

pub fn decode_runs(buf: &[u8], n: usize, b: u8) -> Result<Vec<u32>> {
    let mut r = BitReader::new(buf);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (gap, k) = read_run(&mut r, b)?;
        if k as usize > n - out.len() {
            return Err(Error::corrupt("rice-runs run exceeds element count"));
        }
        out.extend(std::iter::repeat_n(gap, k as usize));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(bytes: &[u8], n: usize) -> String {
        let mut r = BitReader::new(bytes);
        (0..n)
            .map(|_| if r.read_bit().unwrap() { '1' } else { '0' })
            .collect()
    }

    #[test]
    fn rice_b2_gap5_is_1000() {
        let mut w = BitWriter::new();
        write_code(&mut w, 5, 2);
        assert_eq!(w.bit_len(), 4);
        assert_eq!(bits_of(&w.into_bytes(), 4), "1000");
    }

    #[test]
    fn unary_only_decoding() {
        // "110" with b = 0 is x = 2, i.e. gap 3.
        assert_eq!(decode(&[0b1100_0000], 1, 0).unwrap(), vec![3]);
    }

    #[test]
    fn runs_token_layout() {
        assert_eq!(run_tokens(&[5, 1, 1, 1, 1, 2]), vec![5, 1, 4, 2]);
        assert_eq!(run_tokens(&[1]), vec![1, 1]);
        assert_eq!(run_tokens(&[2, 1, 3]), vec![2, 1, 1, 3]);
        let b = 1;
        let mut w = BitWriter::new();
        for t in [5, 1, 4, 2] {
            write_code(&mut w, t, b);
        }
        assert_eq!(encode_runs(&[5, 1, 1, 1, 1, 2], b), w.into_bytes());
    }

    #[test]
    fn runs_roundtrip_and_overrun_detection() {
        let gaps = vec![1, 1, 1, 7, 1, 9, 1, 1];
        for b in 0..4 {
            let enc = encode_runs(&gaps, b);
            assert_eq!(decode_runs(&enc, gaps.len(), b).unwrap(), gaps);
        }
        // Stream claims a run of 3 but only 2 elements are expected.
        let enc = encode_runs(&[1, 1, 1], 0);
        assert!(decode_runs(&enc, 2, 0).is_err());
    }

    /// Brute-force oracle: evaluate every `b` the selector is allowed to
    /// consider, written independently of `cost`.
    fn oracle_param(values: &[u32]) -> u8 {
        let max = *values.iter().max().unwrap() as f64;
        let hi = max.log2().ceil() as u8;
        (0..=hi)
            .map(|b| {
                let bits: u64 = values
                    .iter()
                    .map(|&v| (u64::from(v - 1) / (1u64 << b)) + 1 + u64::from(b))
                    .sum();
                (bits, b)
            })
            .min()
            .unwrap()
            .1
    }

    #[test]
    fn param_selection_examples() {
        assert_eq!(select_param(&[1; 50]).unwrap(), 0);
        // 1024 costs 11 bits at both b = 9 and b = 10; the tie goes to 9.
        let all_1024 = vec![1024u32; 16];
        assert_eq!(cost(&all_1024, 9), cost(&all_1024, 10));
        assert_eq!(oracle_param(&all_1024), 9);
        assert_eq!(select_param(&all_1024).unwrap(), 9);
        let mixed = [1, 1, 1, 1000];
        assert_eq!(oracle_param(&mixed), 7);
        assert_eq!(select_param(&mixed).unwrap(), 7);
        assert!(select_param(&[]).is_err());
    }

    #[test]
    fn runs_beat_plain_rice_on_long_runs() {
        let mut gaps = vec![40u32, 1, 1, 1, 1, 1, 1, 1, 1, 33];
        gaps.extend([1; 20]);
        for b in 1..6u8 {
            assert!(encode_runs(&gaps, b).len() <= encode(&gaps, b).len());
            let rr: u64 = run_tokens(&gaps).iter().map(|&t| code_len(t, b)).sum();
            assert!(rr < cost(&gaps, b), "b={b}");
        }
    }
}
