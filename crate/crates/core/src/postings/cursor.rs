use super::{ListRepr, PostingList, Samples};
use crate::codecs::GapReader;
use crate::{Error, Result};

/// Forward-only search over one list, shared by every intersection strategy.
pub trait Cursor {
    /// Number of elements in the underlying list.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest value `>= x` at or after the current position.
    fn next_geq(&mut self, x: u32) -> Result<Option<u32>>;

    /// Whether `x` is in the list; calls must use non-decreasing `x`.
    fn contains(&mut self, x: u32) -> Result<bool> {
        Ok(self.next_geq(x)? == Some(x))
    }

    /// Every remaining element, in order.
    fn drain(&mut self) -> Result<Vec<u32>>;

    /// Decode operations performed so far.
    fn work(&self) -> u64;
}

/// Cursor over a [`PostingList`]. When `sampled` is set the CM or ST
/// directory (if any) is used to skip ahead; otherwise decoding is purely
/// sequential.
pub struct ListCursor<'a> {
    list: &'a PostingList,
    reader: Option<GapReader<'a>>,
    /// Last value produced; 0 before the first.
    head: u32,
    /// Elements consumed from the stream so far.
    next_idx: u32,
    run_gap: u32,
    run_left: u32,
    sampled: bool,
    done: bool,
    work: u64,
}

impl<'a> ListCursor<'a> {
    pub fn new(list: &'a PostingList, sampled: bool) -> Result<Self> {
        let reader = match &list.repr {
            ListRepr::Encoded { codec, param, body } => {
                Some(GapReader::new(body, *codec, list.len as usize, *param)?)
            }
            ListRepr::Bitmap(_) => None,
        };
        Ok(Self {
            list,
            reader,
            head: 0,
            next_idx: 0,
            run_gap: 0,
            run_left: 0,
            sampled,
            done: false,
            work: 0,
        })
    }

    fn body(&self) -> &'a [u8] {
        match &self.list.repr {
            ListRepr::Encoded { body, .. } => body,
            ListRepr::Bitmap(_) => &[],
        }
    }

    fn land(&mut self, idx: u32, offset: u32, prev: u32) {
        let left = self.list.len - idx;
        self.reader = Some(GapReader::vbyte_at(
            self.body(),
            offset as usize,
            left as usize,
        ));
        self.head = prev;
        self.next_idx = idx;
        self.run_left = 0;
    }

    /// Moves the cursor forward using the sample directory. Returns `false`
    /// when the directory proves no element `>= x` exists.
    fn jump(&mut self, x: u32) -> Result<bool> {
        match &self.list.samples {
            Samples::None => {}
            Samples::Cm(cm) => {
                let entries = &cm.entries;
                let p = cm.period;
                let first = self.next_idx.div_ceil(p) as usize;
                if first >= entries.len() || entries[first].value > x {
                    return Ok(true);
                }
                // Exponential then binary search for the last sample <= x.
                let mut lo = first;
                let mut step = 1;
                let mut hi = lo + 1;
                while hi < entries.len() && entries[hi].value <= x {
                    lo = hi;
                    step *= 2;
                    hi = lo + step;
                }
                let hi = hi.min(entries.len());
                lo += entries[lo + 1..hi].partition_point(|e| e.value <= x);
                let idx = lo as u32 * p;
                if idx >= self.next_idx {
                    let e = entries[lo];
                    self.land(idx, e.offset, 0);
                    // Step over the sampled element; its value is known.
                    let reader = self.reader.as_mut().expect("encoded list");
                    reader.next_run()?;
                    self.work += 1;
                    self.head = e.value;
                    self.next_idx = idx + 1;
                }
            }
            Samples::St(st) => {
                let e = st.buckets[st.bucket_of(x)];
                if e.idx == self.list.len {
                    return Ok(false);
                }
                if e.idx > self.next_idx {
                    self.land(e.idx, e.offset, e.prev);
                }
            }
        }
        Ok(true)
    }
}

impl Cursor for ListCursor<'_> {
    fn len(&self) -> usize {
        self.list.len as usize
    }

    fn next_geq(&mut self, x: u32) -> Result<Option<u32>> {
        if self.done {
            return Ok(None);
        }
        if x <= self.head {
            return Ok(Some(self.head));
        }
        if let ListRepr::Bitmap(bm) = &self.list.repr {
            self.work += 1;
            return Ok(match bm.next_set(x) {
                Some(v) => {
                    self.head = v;
                    Some(v)
                }
                None => {
                    self.done = true;
                    None
                }
            });
        }
        if self.sampled && !self.jump(x)? {
            self.done = true;
            return Ok(None);
        }
        if x <= self.head {
            return Ok(Some(self.head));
        }
        loop {
            if self.run_left == 0 {
                let reader = self.reader.as_mut().expect("encoded list");
                match reader.next_run()? {
                    None => {
                        self.done = true;
                        return Ok(None);
                    }
                    Some((g, k)) => {
                        self.run_gap = g;
                        self.run_left = k;
                        self.work += 1;
                    }
                }
            }
            let base = u64::from(self.head);
            let g = u64::from(self.run_gap);
            let steps = if self.run_left == 1 {
                1
            } else {
                (u64::from(x) - base)
                    .div_ceil(g)
                    .clamp(1, u64::from(self.run_left))
            };
            self.head = u32::try_from(base + steps * g)
                .map_err(|_| Error::corrupt("list value exceeds 32 bits"))?;
            self.run_left -= steps as u32;
            self.next_idx += steps as u32;
            if self.head >= x {
                return Ok(Some(self.head));
            }
        }
    }

    fn contains(&mut self, x: u32) -> Result<bool> {
        if let ListRepr::Bitmap(bm) = &self.list.repr {
            self.work += 1;
            return Ok(bm.contains(x));
        }
        Ok(self.next_geq(x)? == Some(x))
    }

    fn drain(&mut self) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity((self.list.len - self.next_idx) as usize);
        if self.head > 0 && !self.done {
            out.push(self.head);
        }
        loop {
            let from = self.head.saturating_add(1);
            if self.head == u32::MAX {
                break;
            }
            match self.next_geq(from)? {
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

/// Cursor over a plain decoded array; used for candidate lists and tests.
pub struct SliceCursor<'a> {
    values: &'a [u32],
    pos: usize,
    work: u64,
}

impl<'a> SliceCursor<'a> {
    pub fn new(values: &'a [u32]) -> Self {
        Self {
            values,
            pos: 0,
            work: 0,
        }
    }
}

impl Cursor for SliceCursor<'_> {
    fn len(&self) -> usize {
        self.values.len()
    }

    fn next_geq(&mut self, x: u32) -> Result<Option<u32>> {
        while self.pos < self.values.len() && self.values[self.pos] < x {
            self.pos += 1;
            self.work += 1;
        }
        Ok(self.values.get(self.pos).copied())
    }

    fn drain(&mut self) -> Result<Vec<u32>> {
        let out = self.values[self.pos..].to_vec();
        self.work += out.len() as u64;
        self.pos = self.values.len();
        Ok(out)
    }

    fn work(&self) -> u64 {
        self.work
    }
}
