//! Re-Pair over the concatenated gap sequences of all posting lists.
//!
//! Each list is preceded by the separator `0` before pairing, so no rule
//! spans two lists; the stored sequence drops the separators and keeps a
//! per-list offset instead. Skip variants store, per rule, the sum and the
//! number of gaps below it, letting a cursor step over whole non-terminals.

pub mod engine;

use crate::bytes::{ByteReader, ByteWriter};
use crate::codecs::GapSequence;
use crate::postings::intersect::{self, IntersectStats};
use crate::postings::samples::{cm_period, st_bucket_count, st_shift};
use crate::postings::Cursor;
use crate::{Error, Result};
use engine::RePairParams;

pub const SEPARATOR: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpVariant {
    Plain,
    Skip,
    SkipCm { k: u32 },
    SkipSt { b: u32 },
}

impl RpVariant {
    pub fn has_skip(self) -> bool {
        self != RpVariant::Plain
    }

    fn parts(self) -> (u8, u32) {
        match self {
            RpVariant::Plain => (0, 0),
            RpVariant::Skip => (1, 0),
            RpVariant::SkipCm { k } => (2, k),
            RpVariant::SkipSt { b } => (3, b),
        }
    }

    fn from_parts(kind: u8, factor: u32) -> Result<Self> {
        Ok(match kind {
            0 => RpVariant::Plain,
            1 => RpVariant::Skip,
            2 => RpVariant::SkipCm { k: factor },
            3 => RpVariant::SkipSt { b: factor },
            _ => return Err(Error::corrupt(format!("unknown Re-Pair variant {kind}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RePairConfig {
    pub variant: RpVariant,
    pub repair_break: f64,
}

impl RePairConfig {
    pub fn new(variant: RpVariant, repair_break: f64) -> Self {
        Self {
            variant,
            repair_break,
        }
    }
}

/// A sample at a symbol boundary: the symbols of the list before sequence
/// position `pos` expand to gaps summing to `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RpSample {
    pub base: u32,
    pub pos: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    config: RePairConfig,
    universe: u32,
    /// Length of the separator-joined input.
    n: u64,
    first_rule: u32,
    lefts: Vec<u32>,
    rights: Vec<u32>,
    sums: Vec<u32>,
    counts: Vec<u32>,
    seq: Vec<u32>,
    list_offsets: Vec<u32>,
    list_lens: Vec<u32>,
    /// Per-list sample directories (empty unless sampled).
    samples: Vec<Vec<RpSample>>,
    /// ST bucket shift per list.
    shifts: Vec<u32>,
}

impl Grammar {
    pub fn build(lists: &[GapSequence], universe: u32, config: RePairConfig) -> Result<Self> {
        let total: usize = lists.iter().map(|l| l.len() + 1).sum();
        let mut concat = Vec::with_capacity(total);
        let mut max_terminal = 0;
        for (li, l) in lists.iter().enumerate() {
            concat.push(SEPARATOR);
            let mut sum = 0u64;
            for (i, &g) in l.as_slice().iter().enumerate() {
                if g == SEPARATOR {
                    return Err(Error::ReservedSymbol { list: li, index: i });
                }
                sum += u64::from(g);
                max_terminal = max_terminal.max(g);
                concat.push(g);
            }
            if sum > u64::from(universe) {
                return Err(Error::UniverseMismatch(u64::from(universe), sum));
            }
        }
        let first_rule = max_terminal + 1;
        let out = engine::repair(
            concat,
            RePairParams {
                separator: Some(SEPARATOR),
                first_rule_id: first_rule,
                repair_break: config.repair_break,
            },
        )?;
        let mut seq = Vec::with_capacity(out.sequence.len());
        let mut list_offsets = Vec::with_capacity(lists.len() + 1);
        for s in out.sequence {
            if s == SEPARATOR {
                list_offsets.push(seq.len() as u32);
            } else {
                seq.push(s);
            }
        }
        list_offsets.push(seq.len() as u32);
        let (lefts, rights) = out.rules.into_iter().unzip();
        let mut g = Self {
            config,
            universe,
            n: total as u64,
            first_rule,
            lefts,
            rights,
            sums: Vec::new(),
            counts: Vec::new(),
            seq,
            list_offsets,
            list_lens: lists.iter().map(|l| l.len() as u32).collect(),
            samples: Vec::new(),
            shifts: Vec::new(),
        };
        if config.variant.has_skip() {
            g.compute_skip()?;
        }
        g.build_samples();
        Ok(g)
    }

    fn compute_skip(&mut self) -> Result<()> {
        let r = self.lefts.len();
        self.sums = Vec::with_capacity(r);
        self.counts = Vec::with_capacity(r);
        for i in 0..r {
            let (l, rr) = (self.lefts[i], self.rights[i]);
            let sum = u64::from(self.sum_of(l)) + u64::from(self.sum_of(rr));
            let count = u64::from(self.count_of(l)) + u64::from(self.count_of(rr));
            self.sums.push(
                u32::try_from(sum).map_err(|_| Error::Config("rule sum exceeds 32 bits".into()))?,
            );
            self.counts.push(count as u32);
        }
        Ok(())
    }

    fn build_samples(&mut self) {
        let nl = self.list_lens.len();
        match self.config.variant {
            RpVariant::Plain | RpVariant::Skip => {}
            RpVariant::SkipCm { k } => {
                self.samples = (0..nl)
                    .map(|i| {
                        let p = cm_period(k, self.list_lens[i] as usize);
                        let mut out: Vec<RpSample> = Vec::new();
                        let mut next = 0u64;
                        self.walk(i, |s| {
                            let end = u64::from(s.idx) + u64::from(s.count);
                            if next < end {
                                out.push(RpSample {
                                    base: s.base,
                                    pos: s.pos,
                                });
                                while next < end {
                                    next += u64::from(p);
                                }
                            }
                        });
                        out
                    })
                    .collect();
            }
            RpVariant::SkipSt { b } => {
                let mut shifts = Vec::with_capacity(nl);
                self.samples = (0..nl)
                    .map(|i| {
                        let len = self.list_lens[i] as usize;
                        if len == 0 {
                            shifts.push(0);
                            return Vec::new();
                        }
                        let shift = st_shift(self.universe, b, len);
                        shifts.push(shift);
                        let nb = st_bucket_count(self.universe, shift);
                        let mut out = Vec::with_capacity(nb);
                        let mut j = 0u64;
                        self.walk(i, |s| {
                            let end_val = u64::from(s.base) + u64::from(s.sum);
                            while j < nb as u64 && (j << shift) <= end_val {
                                out.push(RpSample {
                                    base: s.base,
                                    pos: s.pos,
                                });
                                j += 1;
                            }
                        });
                        let last = self.list_value_end(i);
                        while out.len() < nb {
                            out.push(RpSample {
                                base: last,
                                pos: self.list_offsets[i + 1],
                            });
                        }
                        out
                    })
                    .collect();
                self.shifts = shifts;
            }
        }
    }

    /// Last value of list `i` (0 when empty).
    fn list_value_end(&self, i: usize) -> u32 {
        let (a, b) = (
            self.list_offsets[i] as usize,
            self.list_offsets[i + 1] as usize,
        );
        self.seq[a..b]
            .iter()
            .fold(0u32, |acc, &s| acc.saturating_add(self.sum_of(s)))
    }

    fn walk(&self, list: usize, mut f: impl FnMut(SymbolSpan)) {
        let (a, b) = (self.list_offsets[list], self.list_offsets[list + 1]);
        let mut idx = 0u32;
        let mut base = 0u32;
        for pos in a..b {
            let s = self.seq[pos as usize];
            let (sum, count) = (self.sum_of(s), self.count_of(s));
            f(SymbolSpan {
                idx,
                base,
                pos,
                sum,
                count,
            });
            idx += count;
            base += sum;
        }
    }

    #[inline]
    fn is_rule(&self, s: u32) -> bool {
        s >= self.first_rule
    }

    #[inline]
    fn rule(&self, s: u32) -> (u32, u32) {
        let r = (s - self.first_rule) as usize;
        (self.lefts[r], self.rights[r])
    }

    /// Total of the gaps below `s` (skip variants only for rules).
    #[inline]
    pub fn sum_of(&self, s: u32) -> u32 {
        if self.is_rule(s) {
            self.sums[(s - self.first_rule) as usize]
        } else {
            s
        }
    }

    #[inline]
    pub fn count_of(&self, s: u32) -> u32 {
        if self.is_rule(s) {
            self.counts[(s - self.first_rule) as usize]
        } else {
            1
        }
    }

    pub fn config(&self) -> RePairConfig {
        self.config
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn num_lists(&self) -> usize {
        self.list_lens.len()
    }

    pub fn list_len(&self, i: usize) -> usize {
        self.list_lens[i] as usize
    }

    pub fn rule_count(&self) -> usize {
        self.lefts.len()
    }

    pub fn first_rule(&self) -> u32 {
        self.first_rule
    }

    pub fn rules(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.lefts.iter().copied().zip(self.rights.iter().copied())
    }

    pub fn sequence(&self) -> &[u32] {
        &self.seq
    }

    pub fn original_len(&self) -> u64 {
        self.n
    }

    pub fn skip_arrays(&self) -> (&[u32], &[u32]) {
        (&self.sums, &self.counts)
    }

    pub fn list_samples(&self, i: usize) -> &[RpSample] {
        self.samples.get(i).map_or(&[], |v| v.as_slice())
    }

    /// Sequence with a separator before each list, as it was before storage.
    pub fn joined_sequence(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.seq.len() + self.num_lists());
        for i in 0..self.num_lists() {
            out.push(SEPARATOR);
            let (a, b) = (
                self.list_offsets[i] as usize,
                self.list_offsets[i + 1] as usize,
            );
            out.extend_from_slice(&self.seq[a..b]);
        }
        out
    }

    pub fn expand(&self, sym: u32) -> Result<Vec<u32>> {
        if sym == SEPARATOR || sym >= self.first_rule + self.lefts.len() as u32 {
            return Err(Error::UnknownSymbol(sym));
        }
        let mut out = Vec::new();
        self.expand_into(sym, &mut out);
        Ok(out)
    }

    fn expand_into(&self, sym: u32, out: &mut Vec<u32>) {
        let mut stack = vec![sym];
        while let Some(s) = stack.pop() {
            if self.is_rule(s) {
                let (l, r) = self.rule(s);
                stack.push(r);
                stack.push(l);
            } else {
                out.push(s);
            }
        }
    }

    /// Gaps of list `i`.
    pub fn fetch_gaps(&self, i: usize) -> Result<Vec<u32>> {
        self.check_list(i)?;
        let (a, b) = (
            self.list_offsets[i] as usize,
            self.list_offsets[i + 1] as usize,
        );
        let mut out = Vec::with_capacity(self.list_lens[i] as usize);
        for &s in &self.seq[a..b] {
            self.expand_into(s, &mut out);
        }
        Ok(out)
    }

    pub fn fetch(&self, i: usize) -> Result<Vec<u32>> {
        let mut v = self.fetch_gaps(i)?;
        let mut acc = 0u32;
        for x in &mut v {
            acc = acc
                .checked_add(*x)
                .ok_or_else(|| Error::corrupt("list value exceeds 32 bits"))?;
            *x = acc;
        }
        Ok(v)
    }

    fn check_list(&self, i: usize) -> Result<()> {
        if i >= self.num_lists() {
            return Err(Error::OutOfRange {
                what: "list",
                index: i as u64,
                limit: self.num_lists() as u64,
            });
        }
        Ok(())
    }

    /// Cursor over list `i`. `skip` requires skip data; `sampled` uses the
    /// sample directory when the variant has one.
    pub fn cursor(&self, i: usize, skip: bool, sampled: bool) -> Result<RpCursor<'_>> {
        self.check_list(i)?;
        if skip && !self.config.variant.has_skip() {
            return Err(Error::Config("grammar has no skip data".into()));
        }
        Ok(RpCursor {
            g: self,
            list: i,
            pos: self.list_offsets[i],
            end: self.list_offsets[i + 1],
            stack: Vec::new(),
            head: 0,
            skip,
            sampled: sampled && !self.list_samples(i).is_empty(),
            next_sample: 0,
            done: false,
            work: 0,
        })
    }

    /// Intersection using the strategy of the grammar's variant: merge for
    /// plain, skip-merge for Skip, set-vs-set over sampled cursors for the
    /// CM and ST variants.
    pub fn intersect(&self, ids: &[usize], stats: &mut IntersectStats) -> Result<Vec<u32>> {
        let variant = self.config.variant;
        let skip = variant.has_skip();
        let sampled = matches!(variant, RpVariant::SkipCm { .. } | RpVariant::SkipSt { .. });
        let mut cs = ids
            .iter()
            .map(|&i| self.cursor(i, skip, sampled))
            .collect::<Result<Vec<_>>>()?;
        if sampled {
            intersect::svs(&mut cs, stats)
        } else {
            intersect::merge(&mut cs, stats)
        }
    }

    /// Header: magic, variant u8, factor u32, repairBreak f64, universe u32,
    /// n u64, first rule id u32, rule count u32, sequence length u32, list
    /// count u32. Then bit-packed arrays (each led by its width byte): lefts,
    /// rights, [sums, counts], sequence, list offsets, list lengths, and for
    /// sampled variants the per-list counts of stored samples followed by the
    /// flattened base and list-relative position arrays. Implied samples are
    /// not stored: the one at a list's first symbol, and the end-of-list
    /// buckets of ST.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.bytes(MAGIC);
        let (kind, factor) = self.config.variant.parts();
        w.u8(kind);
        w.u32(factor);
        w.f64(self.config.repair_break);
        w.u32(self.universe);
        w.u64(self.n);
        w.u32(self.first_rule);
        w.u32(self.lefts.len() as u32);
        w.u32(self.seq.len() as u32);
        w.u32(self.list_lens.len() as u32);
        w.packed(&self.lefts);
        w.packed(&self.rights);
        if self.config.variant.has_skip() {
            w.packed(&self.sums);
            w.packed(&self.counts);
        }
        w.packed(&self.seq);
        w.packed(&self.list_offsets);
        w.packed(&self.list_lens);
        if matches!(
            self.config.variant,
            RpVariant::SkipCm { .. } | RpVariant::SkipSt { .. }
        ) {
            let stored: Vec<&[RpSample]> = (0..self.num_lists())
                .map(|i| self.stored_samples(i))
                .collect();
            w.packed(&stored.iter().map(|s| s.len() as u32).collect::<Vec<_>>());
            let flat = || {
                stored
                    .iter()
                    .enumerate()
                    .flat_map(|(i, s)| s.iter().map(move |x| (i, x)))
            };
            w.packed(&flat().map(|(_, s)| s.base).collect::<Vec<_>>());
            w.packed(
                &flat()
                    .map(|(i, s)| s.pos - self.list_offsets[i])
                    .collect::<Vec<_>>(),
            );
        }
        w.into_inner()
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        r.expect_magic(MAGIC)?;
        let variant = RpVariant::from_parts(r.u8()?, r.u32()?)?;
        let repair_break = r.f64()?;
        let universe = r.u32()?;
        let n = r.u64()?;
        let first_rule = r.u32()?;
        let nrules = r.u32()? as usize;
        let nseq = r.u32()? as usize;
        let nlists = r.u32()? as usize;
        let sanity = |k: usize| {
            if k > buf.len().saturating_mul(8) {
                Err(Error::corrupt("array length exceeds input"))
            } else {
                Ok(k)
            }
        };
        let lefts = r.packed(sanity(nrules)?)?;
        let rights = r.packed(nrules)?;
        let (sums, counts) = if variant.has_skip() {
            (r.packed(nrules)?, r.packed(nrules)?)
        } else {
            (Vec::new(), Vec::new())
        };
        let seq = r.packed(sanity(nseq)?)?;
        let list_offsets = r.packed(sanity(nlists)? + 1)?;
        let list_lens = r.packed(nlists)?;
        let mut g = Self {
            config: RePairConfig::new(variant, repair_break),
            universe,
            n,
            first_rule,
            lefts,
            rights,
            sums,
            counts,
            seq,
            list_offsets,
            list_lens,
            samples: Vec::new(),
            shifts: Vec::new(),
        };
        g.validate()?;
        if matches!(variant, RpVariant::SkipCm { .. } | RpVariant::SkipSt { .. }) {
            g.read_samples(&mut r, sanity)?;
        }
        if !r.is_at_end() {
            return Err(Error::corrupt("trailing bytes after grammar"));
        }
        Ok(g)
    }

    /// Samples of list `i` that are serialized.
    fn stored_samples(&self, i: usize) -> &[RpSample] {
        let ss = self.list_samples(i);
        if ss.is_empty() {
            return ss;
        }
        let end = match self.config.variant {
            RpVariant::SkipSt { .. } => {
                ss.len()
                    - ss.iter()
                        .rev()
                        .take_while(|s| s.pos == self.list_offsets[i + 1])
                        .count()
            }
            _ => ss.len(),
        };
        &ss[1..end.max(1)]
    }

    fn read_samples(
        &mut self,
        r: &mut ByteReader<'_>,
        sanity: impl Fn(usize) -> Result<usize>,
    ) -> Result<()> {
        let nlists = self.num_lists();
        let per = r.packed(nlists)?;
        let total = sanity(per.iter().map(|&c| c as usize).sum())?;
        let bases = r.packed(total)?;
        let rel = r.packed(total)?;
        let st = match self.config.variant {
            RpVariant::SkipSt { b } => Some(b),
            _ => None,
        };
        let bad = || Error::corrupt("Re-Pair sample out of range");
        let mut at = 0usize;
        for (i, &c) in per.iter().enumerate().take(nlists) {
            let (a, b) = (self.list_offsets[i], self.list_offsets[i + 1]);
            let len = self.list_lens[i] as usize;
            let c = c as usize;
            let mut out = Vec::new();
            if len == 0 {
                if c != 0 {
                    return Err(bad());
                }
                self.shifts.extend(st.map(|_| 0));
                self.samples.push(out);
                continue;
            }
            if a == b {
                return Err(Error::corrupt("non-empty list without symbols"));
            }
            out.push(RpSample { base: 0, pos: a });
            for j in at..at + c {
                let pos = a.checked_add(rel[j]).filter(|&p| p < b).ok_or_else(bad)?;
                // CM samples sit on distinct symbols; ST buckets may share one.
                let prev = out.last().unwrap().pos;
                if pos < prev || (st.is_none() && pos == prev) {
                    return Err(bad());
                }
                out.push(RpSample {
                    base: bases[j],
                    pos,
                });
            }
            at += c;
            if let Some(bf) = st {
                let shift = st_shift(self.universe, bf, len);
                let nb = st_bucket_count(self.universe, shift);
                if out.len() > nb {
                    return Err(bad());
                }
                let last = self.list_value_end(i);
                out.resize(nb, RpSample { base: last, pos: b });
                self.shifts.push(shift);
            }
            self.samples.push(out);
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.first_rule == 0 {
            return Err(Error::corrupt("rule ids must exceed the separator"));
        }
        let limit = u64::from(self.first_rule) + self.lefts.len() as u64;
        for (i, (&l, &r)) in self.lefts.iter().zip(&self.rights).enumerate() {
            // Rules may only refer to terminals or earlier rules.
            let own = u64::from(self.first_rule) + i as u64;
            if l == SEPARATOR || r == SEPARATOR || u64::from(l) >= own || u64::from(r) >= own {
                return Err(Error::corrupt(format!(
                    "rule {i} refers forward or to the separator"
                )));
            }
        }
        if self
            .seq
            .iter()
            .any(|&s| s == SEPARATOR || u64::from(s) >= limit)
        {
            return Err(Error::corrupt("sequence symbol out of range"));
        }
        let offs = &self.list_offsets;
        if offs.first() != Some(&0)
            || offs.last().map(|&x| x as usize) != Some(self.seq.len())
            || offs.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::corrupt("list offsets inconsistent"));
        }
        Ok(())
    }
}

const MAGIC: &[u8; 4] = b"VXRP";

struct SymbolSpan {
    idx: u32,
    base: u32,
    pos: u32,
    sum: u32,
    count: u32,
}

/// Forward cursor over one list of a [`Grammar`]. `work` counts rule
/// descents.
pub struct RpCursor<'a> {
    g: &'a Grammar,
    list: usize,
    pos: u32,
    end: u32,
    stack: Vec<u32>,
    head: u32,
    skip: bool,
    sampled: bool,
    next_sample: usize,
    done: bool,
    work: u64,
}

impl RpCursor<'_> {
    fn jump(&mut self, x: u32) -> bool {
        let entries = self.g.list_samples(self.list);
        let target = match self.g.config.variant {
            RpVariant::SkipCm { .. } => {
                let mut lo = self.next_sample
                    + entries[self.next_sample..].partition_point(|e| e.pos < self.pos);
                self.next_sample = lo;
                if lo >= entries.len() || entries[lo].base >= x {
                    return true;
                }
                let mut step = 1;
                let mut hi = lo + 1;
                while hi < entries.len() && entries[hi].base < x {
                    lo = hi;
                    step *= 2;
                    hi = lo + step;
                }
                let hi = hi.min(entries.len());
                lo += entries[lo + 1..hi].partition_point(|e| e.base < x);
                entries[lo]
            }
            RpVariant::SkipSt { .. } => {
                let shift = self.g.shifts[self.list];
                let j = ((u64::from(x) >> shift) as usize).min(entries.len() - 1);
                let e = entries[j];
                if e.pos == self.end {
                    return false;
                }
                if e.pos < self.pos || e.base < self.head {
                    return true;
                }
                e
            }
            _ => return true,
        };
        if target.pos >= self.pos {
            self.pos = target.pos;
            self.head = target.base;
            self.stack.clear();
        }
        true
    }
}

impl Cursor for RpCursor<'_> {
    fn len(&self) -> usize {
        self.g.list_lens[self.list] as usize
    }

    fn next_geq(&mut self, x: u32) -> Result<Option<u32>> {
        if self.done {
            return Ok(None);
        }
        if x <= self.head {
            return Ok(Some(self.head));
        }
        if self.sampled && !self.jump(x) {
            self.done = true;
            return Ok(None);
        }
        loop {
            let s = match self.stack.pop() {
                Some(s) => s,
                None if self.pos < self.end => {
                    self.pos += 1;
                    self.g.seq[self.pos as usize - 1]
                }
                None => {
                    self.done = true;
                    return Ok(None);
                }
            };
            if !self.g.is_rule(s) {
                self.head = self
                    .head
                    .checked_add(s)
                    .ok_or_else(|| Error::corrupt("list value exceeds 32 bits"))?;
                if self.head >= x {
                    return Ok(Some(self.head));
                }
                continue;
            }
            if self.skip {
                let sum = self.g.sum_of(s);
                if u64::from(self.head) + u64::from(sum) < u64::from(x) {
                    self.head += sum;
                    continue;
                }
            }
            self.work += 1;
            let (l, r) = self.g.rule(s);
            self.stack.push(r);
            self.stack.push(l);
        }
    }

    fn drain(&mut self) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(self.len());
        if self.head > 0 && !self.done {
            out.push(self.head);
        }
        while self.head < u32::MAX {
            match self.next_geq(self.head + 1)? {
                Some(v) => out.push(v),
                None => break,
            }
        }
        Ok(out)
    }

    fn work(&self) -> u64 {
        self.work
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codecs::to_gaps;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gs(v: &[u32]) -> GapSequence {
        GapSequence(v.to_vec())
    }

    fn lists_from(values: &[Vec<u32>]) -> Vec<GapSequence> {
        values.iter().map(|v| to_gaps(v).unwrap()).collect()
    }

    fn all_variants() -> Vec<RpVariant> {
        vec![
            RpVariant::Plain,
            RpVariant::Skip,
            RpVariant::SkipCm { k: 1 },
            RpVariant::SkipCm { k: 64 },
            RpVariant::SkipSt { b: 1 },
            RpVariant::SkipSt { b: 256 },
        ]
    }

    fn repetitive_lists(rng: &mut ChaCha8Rng, n: usize, u: u32) -> Vec<Vec<u32>> {
        let base: Vec<u32> = {
            let mut v: Vec<u32> = (0..300).map(|_| rng.gen_range(1..=u)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        (0..n)
            .map(|_| {
                let mut v: Vec<u32> = base.iter().copied().filter(|_| rng.gen_bool(0.9)).collect();
                for _ in 0..rng.gen_range(0..5) {
                    v.push(rng.gen_range(1..=u));
                }
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }

    #[test]
    fn spec_examples() {
        let g = Grammar::build(
            &[gs(&[2, 3, 2, 3])],
            10,
            RePairConfig::new(RpVariant::Skip, 0.0),
        )
        .unwrap();
        assert_eq!(g.rule_count(), 1);
        assert_eq!(g.sequence(), &[4, 4]);
        assert_eq!(g.expand(4).unwrap(), vec![2, 3]);
        assert_eq!(g.expand(3).unwrap(), vec![3]);
        assert!(matches!(g.expand(5), Err(Error::UnknownSymbol(5))));
        assert_eq!(g.skip_arrays(), (&[5u32][..], &[2u32][..]));

        let g = Grammar::build(
            &[gs(&[2, 3]), gs(&[2, 3])],
            5,
            RePairConfig::new(RpVariant::Plain, 0.0),
        )
        .unwrap();
        assert_eq!(g.joined_sequence(), vec![0, 4, 0, 4]);

        let g = Grammar::build(
            &lists_from(&[vec![3, 7, 8]]),
            8,
            RePairConfig::new(RpVariant::Plain, 0.0),
        )
        .unwrap();
        assert_eq!(g.fetch(0).unwrap(), vec![3, 7, 8]);
        let g = Grammar::build(
            &lists_from(&[vec![1], vec![2, 4]]),
            8,
            RePairConfig::new(RpVariant::Plain, 0.0),
        )
        .unwrap();
        assert_eq!(g.fetch(1).unwrap(), vec![2, 4]);
        assert!(g.fetch(2).is_err());

        let err = Grammar::build(&[gs(&[1, 0])], 8, RePairConfig::new(RpVariant::Plain, 0.0));
        assert!(matches!(
            err,
            Err(Error::ReservedSymbol { list: 0, index: 1 })
        ));
    }

    #[test]
    fn skip_descends_only_into_ranges_covering_the_target() {
        let lists = lists_from(&[(1..=64).collect(), (1..=64).collect()]);
        let g = Grammar::build(&lists, 100, RePairConfig::new(RpVariant::Skip, 0.0)).unwrap();
        let mut c = g.cursor(0, true, false).unwrap();
        assert_eq!(c.next_geq(65).unwrap(), None);
        assert_eq!(c.work(), 0);
        let mut p = g.cursor(0, false, false).unwrap();
        assert_eq!(p.next_geq(65).unwrap(), None);
        assert!(p.work() > 0);
    }

    #[test]
    fn roundtrip_structure_and_intersections() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = 20_000;
        let values = repetitive_lists(&mut rng, 60, u);
        let lists = lists_from(&values);
        for v in all_variants() {
            let g = Grammar::build(&lists, u, RePairConfig::new(v, 0.0)).unwrap();
            for (i, want) in values.iter().enumerate() {
                assert_eq!(&g.fetch(i).unwrap(), want);
            }
            assert!(engine::repeated_pairs(&g.joined_sequence(), Some(SEPARATOR)).is_empty());
            if v.has_skip() {
                let (sums, counts) = g.skip_arrays();
                for (r, (l, rr)) in g.rules().enumerate() {
                    assert_eq!(sums[r], g.sum_of(l) + g.sum_of(rr));
                    assert_eq!(counts[r], g.count_of(l) + g.count_of(rr));
                }
            }
            let bytes = g.to_bytes();
            let back = Grammar::from_bytes(&bytes).unwrap();
            assert_eq!(back, g, "{v:?}");
            assert_eq!(back.to_bytes(), bytes);
            for _ in 0..50 {
                let k = rng.gen_range(2..=4);
                let ids: Vec<usize> = (0..k).map(|_| rng.gen_range(0..values.len())).collect();
                let mut want = values[ids[0]].clone();
                for &i in &ids[1..] {
                    want.retain(|x| values[i].binary_search(x).is_ok());
                }
                let got = g.intersect(&ids, &mut IntersectStats::default()).unwrap();
                assert_eq!(got, want, "{v:?} {ids:?}");
            }
        }
    }

    #[test]
    fn sampled_next_geq_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u = 5000;
        let values = repetitive_lists(&mut rng, 20, u);
        let lists = lists_from(&values);
        for v in all_variants() {
            let g = Grammar::build(&lists, u, RePairConfig::new(v, 0.0)).unwrap();
            for (i, vals) in values.iter().enumerate() {
                let mut c = g.cursor(i, v.has_skip(), true).unwrap();
                let mut x = 1;
                loop {
                    let want = vals.iter().copied().find(|&e| e >= x);
                    assert_eq!(c.next_geq(x).unwrap(), want, "{v:?} list {i} x {x}");
                    if want.is_none() {
                        break;
                    }
                    x += rng.gen_range(0..200);
                }
            }
        }
    }

    #[test]
    fn truncated_input_is_rejected() {
        let g = Grammar::build(
            &[gs(&[2, 3, 2, 3])],
            10,
            RePairConfig::new(RpVariant::SkipCm { k: 1 }, 0.0),
        )
        .unwrap();
        let bytes = g.to_bytes();
        for cut in 0..bytes.len() {
            assert!(Grammar::from_bytes(&bytes[..cut]).is_err());
        }
    }
}
