//! LZ-End parsing: every phrase copies a string that ends exactly where an
//! earlier phrase ends, followed by one literal byte. That restriction lets
//! any substring be extracted without decompressing from the start.

use std::collections::BTreeMap;

use crate::bytes::{ByteReader, ByteWriter};
use crate::codecs::vbyte;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"VXLE";

/// One phrase: `copy_len` bytes copied from the text ending at the end of
/// phrase `source`, then `trailing`. Only the final phrase may lack a
/// trailing byte (when the input ends inside a copy).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phrase {
    pub source: Option<u32>,
    pub copy_len: u32,
    pub trailing: Option<u8>,
}

impl Phrase {
    pub fn len(&self) -> u32 {
        self.copy_len + u32::from(self.trailing.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Maximum of a static array over ranges: per-block maxima plus a sparse
/// table over blocks; partial blocks are scanned.
struct BlockMax<'a> {
    vals: &'a [u32],
    table: Vec<Vec<u32>>,
}

const RMQ_BLOCK: usize = 64;

impl<'a> BlockMax<'a> {
    fn new(vals: &'a [u32]) -> Self {
        let base: Vec<u32> = vals
            .chunks(RMQ_BLOCK)
            .map(|c| c.iter().copied().max().unwrap_or(0))
            .collect();
        let mut table = vec![base];
        let mut w = 1;
        while 2 * w <= table[0].len() {
            let prev = table.last().unwrap();
            let next: Vec<u32> = (0..prev.len() - w)
                .map(|i| prev[i].max(prev[i + w]))
                .collect();
            table.push(next);
            w *= 2;
        }
        Self { vals, table }
    }

    fn blocks_max(&self, lo: usize, hi: usize) -> u32 {
        let lvl = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        self.table[lvl][lo].max(self.table[lvl][hi - (1 << lvl)])
    }

    /// Whether some value in `vals[lo..hi]` is at least `t`.
    fn any_at_least(&self, lo: usize, hi: usize, t: u32) -> bool {
        let (bl, bh) = (lo.div_ceil(RMQ_BLOCK), hi / RMQ_BLOCK);
        if bl >= bh {
            return self.vals[lo..hi].iter().any(|&v| v >= t);
        }
        self.vals[lo..bl * RMQ_BLOCK].iter().any(|&v| v >= t)
            || self.vals[bh * RMQ_BLOCK..hi].iter().any(|&v| v >= t)
            || self.blocks_max(bl, bh) >= t
    }
}

/// FM-index of the reversed text with an explicit empty suffix at rank 0.
/// Prepending a byte to a pattern of the reversed text appends it to the
/// forward pattern, so the forward phrase grows one byte per step.
struct ReverseFm {
    sa: Vec<u32>,
    isa: Vec<u32>,
    c: [u32; 256],
    /// BWT bytes; the row of the suffix at position 0 holds a dummy byte
    /// that is excluded from counts via `dummy_row`.
    bwt: Vec<u8>,
    dummy_row: u32,
    /// Occurrences of each byte before every `OCC_BLOCK`-th row.
    occ: Vec<[u32; 256]>,
}

const OCC_BLOCK: usize = 256;

impl ReverseFm {
    fn new(text: &[u8]) -> Self {
        let n = text.len();
        let rev: Vec<u8> = text.iter().rev().copied().collect();
        let mut raw = vec![0i32; n];
        divsufsort::sort_in_place(&rev, &mut raw);
        let mut sa = Vec::with_capacity(n + 1);
        sa.push(n as u32);
        sa.extend(raw.iter().map(|&p| p as u32));
        drop(raw);
        let mut isa = vec![0u32; n];
        for (k, &p) in sa.iter().enumerate().skip(1) {
            isa[p as usize] = k as u32;
        }
        let mut counts = [0u32; 256];
        for &b in &rev {
            counts[b as usize] += 1;
        }
        let mut c = [0u32; 256];
        let mut acc = 1;
        for (b, &cnt) in counts.iter().enumerate() {
            c[b] = acc;
            acc += cnt;
        }
        let mut bwt = Vec::with_capacity(n + 1);
        let mut dummy_row = 0;
        for (k, &p) in sa.iter().enumerate() {
            if p == 0 {
                dummy_row = k as u32;
                bwt.push(0);
            } else {
                bwt.push(rev[p as usize - 1]);
            }
        }
        let mut occ = Vec::with_capacity(bwt.len() / OCC_BLOCK + 2);
        let mut run = [0u32; 256];
        for (k, &b) in bwt.iter().enumerate() {
            if k % OCC_BLOCK == 0 {
                occ.push(run);
            }
            if k as u32 != dummy_row {
                run[b as usize] += 1;
            }
        }
        occ.push(run);
        Self {
            sa,
            isa,
            c,
            bwt,
            dummy_row,
            occ,
        }
    }

    /// Occurrences of `b` in rows `[0, k)`.
    fn rank(&self, b: u8, k: u32) -> u32 {
        let k = k as usize;
        let blk = k / OCC_BLOCK;
        let lo = blk * OCC_BLOCK;
        let hi = (lo + OCC_BLOCK).min(self.bwt.len());
        let dummy = self.dummy_row as usize;
        let fix = |a: usize, z: usize| u32::from(b == 0 && (a..z).contains(&dummy));
        let count = |a: usize, z: usize| self.bwt[a..z].iter().filter(|&&x| x == b).count() as u32;
        if k - lo <= hi - k || blk + 1 >= self.occ.len() {
            self.occ[blk][b as usize] + count(lo, k) - fix(lo, k)
        } else {
            self.occ[blk + 1][b as usize] + fix(k, hi) - count(k, hi)
        }
    }

    fn step(&self, b: u8, sp: u32, ep: u32) -> (u32, u32) {
        let base = self.c[b as usize];
        (base + self.rank(b, sp), base + self.rank(b, ep))
    }
}

/// Suffix ranges at most this wide are finished by direct comparison.
const DIRECT_WIDTH: u32 = 128;

/// Length of the longest common prefix of two equal-length slices.
fn lce(a: &[u8], b: &[u8]) -> usize {
    let mut k = 0;
    while k + 16 <= a.len() && a[k..k + 16] == b[k..k + 16] {
        k += 16;
    }
    while k < a.len() && a[k] == b[k] {
        k += 1;
    }
    k
}

/// Greedy LZ-End parse: backward search over the reversed text extends the
/// phrase while some earlier occurrence remains, and the longest extension
/// whose range holds a marked phrase end wins. Narrow ranges are finished
/// by comparing the remaining occurrences directly.
pub fn parse(text: &[u8]) -> Vec<Phrase> {
    let n = text.len();
    if n == 0 {
        return Vec::new();
    }
    assert!(
        n < u32::MAX as usize,
        "input too large for 32-bit positions"
    );
    let fm = ReverseFm::new(text);
    let rmq = BlockMax::new(&fm.sa);
    let mut marked: BTreeMap<u32, u32> = BTreeMap::new();
    let mut ends: Vec<u32> = Vec::new();
    let mut phrases = Vec::new();
    let mut i = 0;
    while i < n {
        let (mut sp, mut ep) = (0u32, n as u32 + 1);
        let mut l = 0;
        let mut best = (0usize, None);
        // Reversed-text occurrences starting at or after n - i end before i.
        let min_pos = (n - i) as u32;
        while i + l < n {
            if ep - sp <= DIRECT_WIDTH {
                // Few occurrences left: extend each directly and take the
                // farthest phrase end it reaches.
                for &p in &fm.sa[sp as usize..ep as usize] {
                    if p < min_pos {
                        continue;
                    }
                    // The occurrence ends just before `next` in the text.
                    let next = n - p as usize;
                    let room = (i - next).min(n - i - l);
                    let d = lce(&text[next..next + room], &text[i + l..i + l + room]);
                    let idx = ends.partition_point(|&x| (x as usize) < next + d);
                    if idx > 0 && ends[idx - 1] as usize >= next {
                        let reach = l + (ends[idx - 1] as usize + 1 - next);
                        if reach > best.0 {
                            best = (reach, Some(idx as u32 - 1));
                        }
                    }
                }
                break;
            }
            let (s2, e2) = fm.step(text[i + l], sp, ep);
            if s2 >= e2 || !rmq.any_at_least(s2 as usize, e2 as usize, min_pos) {
                break;
            }
            (sp, ep) = (s2, e2);
            l += 1;
            if let Some((_, &id)) = marked.range(sp..ep).next() {
                best = (l, Some(id));
            }
        }
        let (copy, source) = best;
        let trailing = (i + copy < n).then(|| text[i + copy]);
        let len = copy + usize::from(trailing.is_some());
        let end = i + len - 1;
        marked.insert(fm.isa[n - 1 - end], phrases.len() as u32);
        ends.push(end as u32);
        phrases.push(Phrase {
            source,
            copy_len: copy as u32,
            trailing,
        });
        i += len;
    }
    phrases
}

/// Reference parser: tries every length from longest down against every
/// earlier phrase end. Cubic; for small inputs only.
pub fn parse_quadratic(text: &[u8]) -> Vec<Phrase> {
    let n = text.len();
    let mut ends: Vec<usize> = Vec::new();
    let mut phrases = Vec::new();
    let mut i = 0;
    while i < n {
        let mut best = (0, None);
        'search: for l in (1..=n - i).rev() {
            for (id, &e) in ends.iter().enumerate() {
                if e + 1 >= l && text[e + 1 - l..=e] == text[i..i + l] {
                    best = (l, Some(id as u32));
                    break 'search;
                }
            }
        }
        let (copy, source) = best;
        let trailing = (i + copy < n).then(|| text[i + copy]);
        let len = copy + usize::from(trailing.is_some());
        ends.push(i + len - 1);
        phrases.push(Phrase {
            source,
            copy_len: copy as u32,
            trailing,
        });
        i += len;
    }
    phrases
}

/// Structural validity: sources precede the phrase, copies fit inside the
/// text ending at the source's end, and only the last phrase may omit its
/// trailing byte.
pub fn validate(phrases: &[Phrase]) -> Result<()> {
    let mut ends: Vec<u64> = Vec::with_capacity(phrases.len());
    let mut pos = 0u64;
    for (k, p) in phrases.iter().enumerate() {
        if p.trailing.is_none() && k + 1 != phrases.len() {
            return Err(Error::corrupt(format!("phrase {k} lacks a trailing byte")));
        }
        if p.is_empty() {
            return Err(Error::corrupt(format!("phrase {k} is empty")));
        }
        match p.source {
            None if p.copy_len > 0 => {
                return Err(Error::corrupt(format!(
                    "phrase {k} copies without a source"
                )));
            }
            Some(s) => {
                let end = *ends.get(s as usize).ok_or_else(|| {
                    Error::corrupt(format!("phrase {k} source {s} is not earlier"))
                })?;
                if u64::from(p.copy_len) > end + 1 || p.copy_len == 0 {
                    return Err(Error::corrupt(format!(
                        "phrase {k} copy length out of range"
                    )));
                }
            }
            None => {}
        }
        pos += u64::from(p.len());
        ends.push(pos - 1);
    }
    Ok(())
}

/// Forward expansion of a validated phrase list.
pub fn expand(phrases: &[Phrase]) -> Result<Vec<u8>> {
    validate(phrases)?;
    let mut out: Vec<u8> = Vec::new();
    let mut ends = Vec::with_capacity(phrases.len());
    for p in phrases {
        if let Some(s) = p.source {
            let end: usize = ends[s as usize];
            let from = end + 1 - p.copy_len as usize;
            out.extend_from_within(from..=end);
        }
        out.extend(p.trailing);
        ends.push(out.len() - 1);
    }
    Ok(out)
}

/// Compact parse: phrase lengths and source distances as Vbyte streams,
/// each with absolute samples every `ds` phrases, plus the trailing bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LzEndParse {
    ds: u32,
    num_phrases: u32,
    text_len: u64,
    final_trailing: bool,
    lens: Vec<u8>,
    len_samples: Vec<(u32, u32)>,
    srcs: Vec<u8>,
    src_samples: Vec<u32>,
    trailing: Vec<u8>,
}

impl LzEndParse {
    pub fn build(text: &[u8], ds: u32) -> Result<Self> {
        Self::from_phrases(&parse(text), ds)
    }

    pub fn from_phrases(phrases: &[Phrase], ds: u32) -> Result<Self> {
        if ds == 0 {
            return Err(Error::Config("ds must be at least 1".into()));
        }
        validate(phrases)?;
        let mut p = Self {
            ds,
            num_phrases: phrases.len() as u32,
            text_len: 0,
            final_trailing: phrases.last().is_none_or(|p| p.trailing.is_some()),
            lens: Vec::new(),
            len_samples: Vec::new(),
            srcs: Vec::new(),
            src_samples: Vec::new(),
            trailing: Vec::with_capacity(phrases.len()),
        };
        for (k, ph) in phrases.iter().enumerate() {
            if k % ds as usize == 0 {
                let start = u32::try_from(p.text_len)
                    .map_err(|_| Error::Config("input exceeds 32-bit positions".into()))?;
                p.len_samples.push((start, p.lens.len() as u32));
                p.src_samples.push(p.srcs.len() as u32);
            }
            vbyte::write(&mut p.lens, ph.len());
            vbyte::write(&mut p.srcs, ph.source.map_or(0, |s| k as u32 - s));
            p.trailing.extend(ph.trailing);
            p.text_len += u64::from(ph.len());
        }
        if p.text_len > u64::from(u32::MAX) {
            return Err(Error::Config("input exceeds 32-bit positions".into()));
        }
        Ok(p)
    }

    pub fn ds(&self) -> u32 {
        self.ds
    }

    pub fn num_phrases(&self) -> usize {
        self.num_phrases as usize
    }

    pub fn text_len(&self) -> u64 {
        self.text_len
    }

    /// Bytes spent on the two sample directories.
    pub fn sample_bytes(&self) -> usize {
        self.len_samples.len() * 8 + self.src_samples.len() * 4
    }

    fn has_trailing(&self, k: u32) -> bool {
        k + 1 != self.num_phrases || self.final_trailing
    }

    /// Start position and length of phrase `k`.
    fn span(&self, k: u32) -> (u32, u32) {
        let (mut start, off) = self.len_samples[(k / self.ds) as usize];
        let mut pos = off as usize;
        for _ in 0..k % self.ds {
            start += vbyte::read(&self.lens, &mut pos).expect("validated stream");
        }
        (
            start,
            vbyte::read(&self.lens, &mut pos).expect("validated stream"),
        )
    }

    /// Phrase containing text position `x`, with its start and length.
    fn locate(&self, x: u32) -> (u32, u32, u32) {
        let j = self.len_samples.partition_point(|s| s.0 <= x) - 1;
        let (mut start, off) = self.len_samples[j];
        let mut pos = off as usize;
        let mut k = j as u32 * self.ds;
        loop {
            let len = vbyte::read(&self.lens, &mut pos).expect("validated stream");
            if x < start + len {
                return (k, start, len);
            }
            start += len;
            k += 1;
        }
    }

    fn source(&self, k: u32) -> Option<u32> {
        let mut pos = self.src_samples[(k / self.ds) as usize] as usize;
        for _ in 0..k % self.ds {
            vbyte::read(&self.srcs, &mut pos).expect("validated stream");
        }
        match vbyte::read(&self.srcs, &mut pos).expect("validated stream") {
            0 => None,
            d => Some(k - d),
        }
    }

    fn trailing_index(&self, k: u32) -> usize {
        // Every phrase but possibly the last has a trailing byte.
        k as usize
    }

    /// Bytes `[start, start + len)` of the original input, extracted right
    /// to left by following copies back to their sources.
    pub fn extract(&self, start: u64, len: u64) -> Result<Vec<u8>> {
        let end = start
            .checked_add(len)
            .filter(|&e| e <= self.text_len)
            .ok_or(Error::OutOfRange {
                what: "byte range end",
                index: start.saturating_add(len),
                limit: self.text_len,
            })?;
        let mut out = Vec::with_capacity(len as usize);
        let mut stack: Vec<(u32, u32)> = Vec::new();
        if len > 0 {
            stack.push(((end - 1) as u32, len as u32));
        }
        while let Some((e, l)) = stack.pop() {
            if l == 0 {
                continue;
            }
            let (k, ps, plen) = self.locate(e);
            let last = ps + plen - 1;
            let has_t = self.has_trailing(k);
            if has_t && e == last {
                out.push(self.trailing[self.trailing_index(k)]);
                if l > 1 {
                    stack.push((e - 1, l - 1));
                }
                continue;
            }
            let src = self.source(k).expect("copy part implies a source");
            let (ss, slen) = self.span(src);
            let copy_last = last - u32::from(has_t);
            let mapped = ss + slen - 1 - (copy_last - e);
            let m = l.min(e - ps + 1);
            if l > m {
                stack.push((e - m, l - m));
            }
            stack.push((mapped, m));
        }
        out.reverse();
        Ok(out)
    }

    /// Decodes the phrase list.
    pub fn phrases(&self) -> Vec<Phrase> {
        let (mut lp, mut sp) = (0usize, 0usize);
        (0..self.num_phrases)
            .map(|k| {
                let len = vbyte::read(&self.lens, &mut lp).expect("validated stream");
                let d = vbyte::read(&self.srcs, &mut sp).expect("validated stream");
                let has_t = self.has_trailing(k);
                Phrase {
                    source: (d != 0).then(|| k - d),
                    copy_len: len - u32::from(has_t),
                    trailing: has_t.then(|| self.trailing[self.trailing_index(k)]),
                }
            })
            .collect()
    }

    /// Header: magic, ds u32, phrase count u32, text length u64, final
    /// trailing flag u8. Then the length stream (block) with (start u32,
    /// offset u32) samples, the distance stream (block) with offset u32
    /// samples, and the trailing bytes (block).
    pub fn write_to(&self, w: &mut ByteWriter) {
        w.bytes(MAGIC);
        w.u32(self.ds);
        w.u32(self.num_phrases);
        w.u64(self.text_len);
        w.u8(u8::from(self.final_trailing));
        w.block(&self.lens);
        for &(s, o) in &self.len_samples {
            w.u32(s);
            w.u32(o);
        }
        w.block(&self.srcs);
        w.u32_slice(&self.src_samples);
        w.block(&self.trailing);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        self.write_to(&mut w);
        w.into_inner()
    }

    pub fn read_from(r: &mut ByteReader) -> Result<Self> {
        r.expect_magic(MAGIC)?;
        let ds = r.u32()?;
        let num_phrases = r.u32()?;
        let text_len = r.u64()?;
        let final_trailing = match r.u8()? {
            0 => false,
            1 => true,
            _ => return Err(Error::corrupt("bad trailing flag")),
        };
        if ds == 0 {
            return Err(Error::corrupt("ds is zero"));
        }
        let nsamples = num_phrases.div_ceil(ds) as usize;
        let lens = r.block()?.to_vec();
        let mut len_samples = Vec::with_capacity(nsamples);
        for _ in 0..nsamples {
            len_samples.push((r.u32()?, r.u32()?));
        }
        let srcs = r.block()?.to_vec();
        let src_samples = r.u32_vec(nsamples)?;
        let trailing = r.block()?.to_vec();
        let parsed = Self {
            ds,
            num_phrases,
            text_len,
            final_trailing,
            lens,
            len_samples,
            srcs,
            src_samples,
            trailing,
        };
        parsed.check()?;
        Ok(parsed)
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        let p = Self::read_from(&mut r)?;
        if !r.is_at_end() {
            return Err(Error::corrupt("trailing bytes after parse"));
        }
        Ok(p)
    }

    /// Re-derives everything from the streams and compares with the stored
    /// samples, so later accesses cannot go out of bounds.
    fn check(&self) -> Result<()> {
        let n = self.num_phrases as usize;
        let ntrail = if n > 0 && !self.final_trailing {
            n - 1
        } else {
            n
        };
        if self.trailing.len() != ntrail {
            return Err(Error::corrupt("trailing byte count mismatch"));
        }
        let (mut lp, mut sp) = (0usize, 0usize);
        let mut phrases = Vec::with_capacity(n);
        let mut start = 0u64;
        for k in 0..n as u32 {
            if k % self.ds == 0 {
                let j = (k / self.ds) as usize;
                if self.len_samples[j] != (start as u32, lp as u32)
                    || self.src_samples[j] != sp as u32
                {
                    return Err(Error::corrupt("sample directory disagrees with streams"));
                }
            }
            let len = vbyte::read(&self.lens, &mut lp)?;
            let d = vbyte::read(&self.srcs, &mut sp)?;
            let has_t = self.has_trailing(k);
            if d > k || len < u32::from(has_t) {
                return Err(Error::corrupt(format!("phrase {k} is malformed")));
            }
            phrases.push(Phrase {
                source: (d != 0).then(|| k - d),
                copy_len: len - u32::from(has_t),
                trailing: has_t.then_some(0),
            });
            start += u64::from(len);
        }
        if lp != self.lens.len() || sp != self.srcs.len() || start != self.text_len {
            return Err(Error::corrupt("phrase streams disagree with header"));
        }
        if start > u64::from(u32::MAX) {
            return Err(Error::corrupt("text too long"));
        }
        validate(&phrases)
    }
}
