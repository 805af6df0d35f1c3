//! Generic Re-Pair over `u32` symbols.
//!
//! The sequence is kept as a doubly linked list of live slots. Every slot
//! that starts a countable pair is threaded into that pair's occurrence
//! list, so a substitution step touches only the occurrences it rewrites.
//! A max-heap keyed by `(count, smallest pair)` picks the next pair; keys
//! are refreshed lazily through per-pair stamps. Counts of `(a, a)` pairs
//! include overlapping occurrences and are therefore upper bounds; such a
//! pair is recounted exactly when it reaches the top of the heap.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use crate::{Error, Result};

const NONE: u32 = u32::MAX;
const EMPTY: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RePairParams {
    /// Symbol that never takes part in a pair (list separator), if any.
    pub separator: Option<u32>,
    /// Id of the first rule; must exceed every input symbol.
    pub first_rule_id: u32,
    /// Stop once a step improves `100 * m / n` by less than this.
    pub repair_break: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RePairOutput {
    /// Rule `i` defines symbol `first_rule_id + i`.
    pub rules: Vec<(u32, u32)>,
    /// Final sequence, separators included.
    pub sequence: Vec<u32>,
    /// Occurrences rewritten by each rule's step.
    pub replaced: Vec<u32>,
}

struct PairRec {
    count: u32,
    head: u32,
    stamp: u32,
}

#[inline]
fn key(a: u32, b: u32) -> u64 {
    (u64::from(a) << 32) | u64::from(b)
}

struct State {
    seq: Vec<u32>,
    nxt: Vec<u32>,
    prv: Vec<u32>,
    occ_next: Vec<u32>,
    occ_prev: Vec<u32>,
    listed: Vec<bool>,
    pairs: FxHashMap<u64, PairRec>,
    heap: BinaryHeap<(u32, Reverse<u64>, u32)>,
    dirty: Vec<u64>,
    separator: u32,
}

impl State {
    #[inline]
    fn countable(&self, a: u32, b: u32) -> bool {
        a != self.separator && b != self.separator
    }

    /// Key of the pair starting at live slot `i`, if countable.
    #[inline]
    fn pair_at(&self, i: u32) -> Option<u64> {
        let j = self.nxt[i as usize];
        if j == NONE {
            return None;
        }
        let (a, b) = (self.seq[i as usize], self.seq[j as usize]);
        self.countable(a, b).then(|| key(a, b))
    }

    fn add_occ(&mut self, i: u32) {
        let Some(k) = self.pair_at(i) else { return };
        let rec = self.pairs.entry(k).or_insert(PairRec {
            count: 0,
            head: NONE,
            stamp: 0,
        });
        let old = rec.head;
        rec.head = i;
        rec.count += 1;
        self.occ_next[i as usize] = old;
        self.occ_prev[i as usize] = NONE;
        if old != NONE {
            self.occ_prev[old as usize] = i;
        }
        self.listed[i as usize] = true;
        self.dirty.push(k);
    }

    fn remove_occ(&mut self, i: u32) {
        if !self.listed[i as usize] {
            return;
        }
        let k = self.pair_at(i).expect("listed slot starts a pair");
        let (p, n) = (self.occ_prev[i as usize], self.occ_next[i as usize]);
        if n != NONE {
            self.occ_prev[n as usize] = p;
        }
        let rec = self.pairs.get_mut(&k).expect("listed pair has a record");
        if p != NONE {
            self.occ_next[p as usize] = n;
        } else {
            rec.head = n;
        }
        rec.count -= 1;
        self.listed[i as usize] = false;
        self.dirty.push(k);
    }

    fn push(&mut self, k: u64, count: u32) {
        if let Some(rec) = self.pairs.get_mut(&k) {
            rec.stamp = rec.stamp.wrapping_add(1);
            self.heap.push((count, Reverse(k), rec.stamp));
        }
    }

    fn flush_dirty(&mut self) {
        let mut dirty = std::mem::take(&mut self.dirty);
        dirty.sort_unstable();
        dirty.dedup();
        for &k in &dirty {
            match self.pairs.get_mut(&k) {
                Some(r) if r.count == 0 => {
                    self.pairs.remove(&k);
                }
                Some(r) if r.count >= 2 => {
                    let c = r.count;
                    self.push(k, c);
                }
                // Invalidate any queued key for a pair that dropped below 2.
                Some(r) => r.stamp = r.stamp.wrapping_add(1),
                None => {}
            }
        }
        dirty.clear();
        self.dirty = dirty;
    }

    /// Occurrence slots of pair `k`, ascending.
    fn positions(&self, k: u64) -> Vec<u32> {
        let mut out = Vec::new();
        let mut i = self.pairs.get(&k).map_or(NONE, |r| r.head);
        while i != NONE {
            out.push(i);
            i = self.occ_next[i as usize];
        }
        out.sort_unstable();
        out
    }

    /// Non-overlapping occurrences of `(a, a)`, counted greedily from the left.
    fn exact_count(&self, k: u64) -> u32 {
        let mut count = 0;
        let mut last_end = NONE;
        for i in self.positions(k) {
            if last_end != NONE && i == last_end {
                continue;
            }
            count += 1;
            last_end = self.nxt[i as usize];
        }
        count
    }

    /// Rewrites every occurrence of `(a, b)` with `x`, left to right.
    fn replace(&mut self, k: u64, x: u32) -> u32 {
        let (a, b) = ((k >> 32) as u32, k as u32);
        let mut done = 0;
        for i in self.positions(k) {
            let iu = i as usize;
            if self.seq[iu] != a || !self.listed[iu] {
                continue;
            }
            let j = self.nxt[iu];
            if j == NONE || self.seq[j as usize] != b {
                continue;
            }
            let p = self.prv[iu];
            let q = self.nxt[j as usize];
            if p != NONE {
                self.remove_occ(p);
            }
            self.remove_occ(i);
            self.remove_occ(j);
            self.seq[iu] = x;
            self.seq[j as usize] = EMPTY;
            self.nxt[iu] = q;
            if q != NONE {
                self.prv[q as usize] = i;
            }
            if p != NONE {
                self.add_occ(p);
            }
            self.add_occ(i);
            done += 1;
        }
        done
    }
}

/// Runs Re-Pair on `symbols`.
pub fn repair(symbols: Vec<u32>, params: RePairParams) -> Result<RePairOutput> {
    if params.repair_break.is_nan() || params.repair_break < 0.0 {
        return Err(Error::Config("repairBreak must be >= 0".into()));
    }
    let n = symbols.len();
    if n >= (NONE - 1) as usize {
        return Err(Error::Config(
            "sequence too long for 32-bit positions".into(),
        ));
    }
    if let Some(&big) = symbols
        .iter()
        .filter(|&&s| Some(s) != params.separator)
        .max()
    {
        if big >= params.first_rule_id {
            return Err(Error::Config(format!(
                "symbol {big} collides with rule ids starting at {}",
                params.first_rule_id
            )));
        }
    }
    let mut st = State {
        nxt: (1..=n as u32)
            .map(|i| if i as usize == n { NONE } else { i })
            .collect(),
        prv: (0..n as u32)
            .map(|i| if i == 0 { NONE } else { i - 1 })
            .collect(),
        seq: symbols,
        occ_next: vec![NONE; n],
        occ_prev: vec![NONE; n],
        listed: vec![false; n],
        pairs: FxHashMap::default(),
        heap: BinaryHeap::new(),
        dirty: Vec::new(),
        separator: params.separator.unwrap_or(EMPTY),
    };
    for i in 0..n.saturating_sub(1) {
        st.add_occ(i as u32);
    }
    st.dirty.clear();
    let mut initial: Vec<(u64, u32)> = st
        .pairs
        .iter()
        .filter(|(_, r)| r.count >= 2)
        .map(|(&k, r)| (k, r.count))
        .collect();
    initial.sort_unstable();
    for (k, c) in initial {
        st.push(k, c);
    }

    let mut rules = Vec::new();
    let mut replaced = Vec::new();
    let mut m = n as u64;
    let ratio = |m: u64| {
        if n == 0 {
            0.0
        } else {
            100.0 * m as f64 / n as f64
        }
    };
    let mut prev_ratio = ratio(m);
    while let Some((count, Reverse(k), stamp)) = st.heap.pop() {
        let Some(rec) = st.pairs.get(&k) else {
            continue;
        };
        if rec.stamp != stamp {
            continue;
        }
        if count < 2 {
            break;
        }
        if (k >> 32) as u32 == k as u32 {
            let exact = st.exact_count(k);
            if exact < count {
                if exact >= 2 {
                    st.push(k, exact);
                }
                continue;
            }
        }
        let x = params
            .first_rule_id
            .checked_add(rules.len() as u32)
            .filter(|&x| x != EMPTY && Some(x) != params.separator)
            .ok_or_else(|| Error::Config("rule ids exhausted the 32-bit space".into()))?;
        let done = st.replace(k, x);
        debug_assert!(done >= 2);
        rules.push(((k >> 32) as u32, k as u32));
        replaced.push(done);
        st.pairs.remove(&k);
        st.dirty.retain(|&d| d != k);
        st.flush_dirty();
        m -= u64::from(done);
        let r = ratio(m);
        if prev_ratio - r < params.repair_break {
            break;
        }
        prev_ratio = r;
    }

    let mut sequence = Vec::with_capacity(m as usize);
    let mut i = if n == 0 { NONE } else { 0 };
    while i != NONE {
        sequence.push(st.seq[i as usize]);
        i = st.nxt[i as usize];
    }
    Ok(RePairOutput {
        rules,
        sequence,
        replaced,
    })
}

/// Pairs occurring at least twice without overlap (separator pairs
/// excluded). Empty after a run with `repair_break = 0`.
pub fn repeated_pairs(sequence: &[u32], separator: Option<u32>) -> Vec<(u32, u32)> {
    let mut counts: FxHashMap<(u32, u32), (u32, usize)> = FxHashMap::default();
    for i in 0..sequence.len().saturating_sub(1) {
        let (a, b) = (sequence[i], sequence[i + 1]);
        if Some(a) == separator || Some(b) == separator {
            continue;
        }
        let e = counts.entry((a, b)).or_insert((0, usize::MAX));
        if e.1 == usize::MAX || !(a == b && e.1 + 1 == i) {
            e.0 += 1;
            e.1 = i;
        }
    }
    let mut out: Vec<_> = counts
        .into_iter()
        .filter(|(_, (c, _))| *c >= 2)
        .map(|(p, _)| p)
        .collect();
    out.sort_unstable();
    out
}

/// Expands `sym` to terminals with an explicit stack.
pub fn expand_into(rules: &[(u32, u32)], first_rule_id: u32, sym: u32, out: &mut Vec<u32>) {
    let mut stack = vec![sym];
    while let Some(s) = stack.pop() {
        if s >= first_rule_id {
            let (l, r) = rules[(s - first_rule_id) as usize];
            stack.push(r);
            stack.push(l);
        } else {
            out.push(s);
        }
    }
}
