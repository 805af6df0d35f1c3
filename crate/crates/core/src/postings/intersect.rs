//! Multi-list intersection strategies over [`Cursor`]s.

use super::cursor::Cursor;
use crate::Result;

/// Decode effort accumulated by an intersection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntersectStats {
    pub decoded: u64,
}

/// Round-robin leapfrog: every cursor is asked for the current target until
/// all of them agree.
pub fn merge<C: Cursor>(cursors: &mut [C], stats: &mut IntersectStats) -> Result<Vec<u32>> {
    let out = merge_inner(cursors)?;
    stats.decoded += cursors.iter().map(|c| c.work()).sum::<u64>();
    Ok(out)
}

fn merge_inner<C: Cursor>(cursors: &mut [C]) -> Result<Vec<u32>> {
    let n = cursors.len();
    let mut out = Vec::new();
    if n == 0 || cursors.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    let mut target = 1u32;
    let mut matched = 0;
    let mut i = 0;
    loop {
        let Some(v) = cursors[i].next_geq(target)? else {
            return Ok(out);
        };
        if v == target {
            matched += 1;
        } else {
            target = v;
            matched = 1;
        }
        if matched == n {
            out.push(target);
            if target == u32::MAX {
                return Ok(out);
            }
            target += 1;
            matched = 0;
        }
        i = (i + 1) % n;
    }
}

/// Set-versus-set: the shortest list is decoded and each survivor is
/// searched for in the remaining lists, shortest first. Ties keep the
/// caller's order.
pub fn svs<C: Cursor>(cursors: &mut [C], stats: &mut IntersectStats) -> Result<Vec<u32>> {
    let mut order: Vec<usize> = (0..cursors.len()).collect();
    order.sort_by_key(|&i| cursors[i].len());
    let mut cands = match order.first() {
        Some(&first) => cursors[first].drain()?,
        None => Vec::new(),
    };
    for &i in order.iter().skip(1) {
        if cands.is_empty() {
            break;
        }
        cands = filter(cands, &mut cursors[i])?;
    }
    stats.decoded += cursors.iter().map(|c| c.work()).sum::<u64>();
    Ok(cands)
}

/// Keeps the candidates (ascending) that `cursor` contains.
pub fn filter<C: Cursor>(mut cands: Vec<u32>, cursor: &mut C) -> Result<Vec<u32>> {
    let mut keep = 0;
    for i in 0..cands.len() {
        let x = cands[i];
        if cursor.contains(x)? {
            cands[keep] = x;
            keep += 1;
        }
    }
    cands.truncate(keep);
    Ok(cands)
}

#[cfg(test)]
mod tests {
    use super::super::cursor::SliceCursor;
    use super::*;

    fn run(lists: &[&[u32]]) -> (Vec<u32>, Vec<u32>) {
        let mut st = IntersectStats::default();
        let mut cs: Vec<_> = lists.iter().map(|l| SliceCursor::new(l)).collect();
        let a = merge(&mut cs, &mut st).unwrap();
        let mut cs: Vec<_> = lists.iter().map(|l| SliceCursor::new(l)).collect();
        let b = svs(&mut cs, &mut st).unwrap();
        (a, b)
    }

    #[test]
    fn small_examples() {
        let (a, b) = run(&[&[1, 3, 5, 7], &[3, 4, 7]]);
        assert_eq!(a, vec![3, 7]);
        assert_eq!(b, vec![3, 7]);
        let (a, b) = run(&[&[1, 2], &[3, 4]]);
        assert!(a.is_empty() && b.is_empty());
        let (a, _) = run(&[&[5], &[]]);
        assert!(a.is_empty());
        let (a, b) = run(&[&[u32::MAX], &[1, u32::MAX]]);
        assert_eq!(a, vec![u32::MAX]);
        assert_eq!(b, vec![u32::MAX]);
    }
}
