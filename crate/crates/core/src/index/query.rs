//! Conjunctive and phrase evaluation over any posting store.

use super::method::PostingStore;
use crate::postings::cursor::{Cursor, SliceCursor};
use crate::postings::intersect::{self, IntersectStats};
use crate::postings::Algorithm;
use crate::repair::RpVariant;
use crate::Result;

/// Presents `v - shift` for every list value `v > shift`; intersecting
/// lists shifted by their term's offset in a phrase yields phrase starts.
pub struct Shifted<C> {
    inner: C,
    shift: u32,
}

impl<C: Cursor> Shifted<C> {
    pub fn new(inner: C, shift: u32) -> Self {
        Self { inner, shift }
    }
}

impl<C: Cursor> Cursor for Shifted<C> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn next_geq(&mut self, x: u32) -> Result<Option<u32>> {
        let Some(t) = x.max(1).checked_add(self.shift) else {
            return Ok(None);
        };
        Ok(self.inner.next_geq(t)?.map(|v| v - self.shift))
    }

    fn contains(&mut self, x: u32) -> Result<bool> {
        match x.checked_add(self.shift) {
            Some(t) if x >= 1 => self.inner.contains(t),
            _ => Ok(false),
        }
    }

    fn drain(&mut self) -> Result<Vec<u32>> {
        let s = self.shift;
        Ok(self
            .inner
            .drain()?
            .into_iter()
            .filter(|&v| v > s)
            .map(|v| v - s)
            .collect())
    }

    fn work(&self) -> u64 {
        self.inner.work()
    }
}

fn run<C: Cursor>(
    cursors: Vec<C>,
    shifts: &[u32],
    svs: bool,
    stats: &mut IntersectStats,
) -> Result<Vec<u32>> {
    let mut cs: Vec<Shifted<C>> = cursors
        .into_iter()
        .zip(shifts)
        .map(|(c, &s)| Shifted::new(c, s))
        .collect();
    if svs {
        intersect::svs(&mut cs, stats)
    } else {
        intersect::merge(&mut cs, stats)
    }
}

/// Values `x` such that list `ids[i]` contains `x + shifts[i]` for every
/// `i`, using the store's intersection strategy.
pub fn shifted_intersection(
    store: &PostingStore,
    ids: &[usize],
    shifts: &[u32],
    stats: &mut IntersectStats,
) -> Result<Vec<u32>> {
    debug_assert_eq!(ids.len(), shifts.len());
    match store {
        PostingStore::Lists(set, algo) => {
            let sampled = *algo != Algorithm::Merge;
            let cs = ids
                .iter()
                .map(|&i| {
                    let l = &set.lists[i];
                    if sampled {
                        l.sampled_cursor()
                    } else {
                        l.sequential_cursor()
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            run(cs, shifts, sampled, stats)
        }
        PostingStore::RePair(g) => {
            let variant = g.config().variant;
            let sampled = matches!(variant, RpVariant::SkipCm { .. } | RpVariant::SkipSt { .. });
            let cs = ids
                .iter()
                .map(|&i| g.cursor(i, variant.has_skip(), sampled))
                .collect::<Result<Vec<_>>>()?;
            run(cs, shifts, sampled, stats)
        }
        PostingStore::Lzma(_) | PostingStore::Lzend(_) => {
            let lists = ids
                .iter()
                .map(|&i| store.fetch(i))
                .collect::<Result<Vec<_>>>()?;
            let cs: Vec<SliceCursor> = lists.iter().map(|l| SliceCursor::new(l)).collect();
            run(cs, shifts, false, stats)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_cursor_hides_small_values() {
        let v = [1, 2, 5, 9];
        let mut c = Shifted::new(SliceCursor::new(&v), 2);
        assert_eq!(c.next_geq(1).unwrap(), Some(3));
        assert!(c.contains(7).unwrap());
        assert_eq!(
            Shifted::new(SliceCursor::new(&v), 2).drain().unwrap(),
            vec![3, 7]
        );
        assert_eq!(
            Shifted::new(SliceCursor::new(&v), 1).drain().unwrap(),
            vec![1, 4, 8]
        );
    }
}
