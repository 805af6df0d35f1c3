/// Plain bitmap over `1..=universe`; value `v` lives at bit `v - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    words: Vec<u64>,
    universe: u32,
    ones: u32,
}

impl Bitmap {
    pub fn from_values(values: &[u32], universe: u32) -> Self {
        let mut words = vec![0u64; (universe as usize).div_ceil(64)];
        for &v in values {
            let bit = (v - 1) as usize;
            words[bit / 64] |= 1 << (bit % 64);
        }
        Self {
            words,
            universe,
            ones: values.len() as u32,
        }
    }

    pub(crate) fn from_words(words: Vec<u64>, universe: u32) -> Self {
        let ones = words.iter().map(|w| w.count_ones()).sum();
        Self {
            words,
            universe,
            ones,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn count_ones(&self) -> u32 {
        self.ones
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        if v == 0 || v > self.universe {
            return false;
        }
        let bit = (v - 1) as usize;
        self.words[bit / 64] & (1 << (bit % 64)) != 0
    }

    /// Smallest set value `>= v`.
    pub fn next_set(&self, v: u32) -> Option<u32> {
        if v > self.universe {
            return None;
        }
        let bit = v.max(1) as usize - 1;
        let mut wi = bit / 64;
        let mut w = self.words[wi] & (!0u64 << (bit % 64));
        loop {
            if w != 0 {
                return Some((wi * 64) as u32 + w.trailing_zeros() + 1);
            }
            wi += 1;
            if wi == self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    pub fn to_values(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.ones as usize);
        for (wi, &word) in self.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                out.push((wi * 64) as u32 + w.trailing_zeros() + 1);
                w &= w - 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_bits_read_back() {
        let b = Bitmap::from_values(&[2, 5, 9], 10);
        assert_eq!(b.to_values(), vec![2, 5, 9]);
        assert!(b.contains(5));
        assert!(!b.contains(6));
        assert!(!b.contains(0));
        assert!(!b.contains(11));
        assert_eq!(b.next_set(3), Some(5));
        assert_eq!(b.next_set(9), Some(9));
        assert_eq!(b.next_set(10), None);
        assert_eq!(b.next_set(0), Some(2));
    }

    #[test]
    fn word_boundaries() {
        let vals = [1, 64, 65, 128, 129, 200];
        let b = Bitmap::from_values(&vals, 200);
        assert_eq!(b.to_values(), vals);
        assert_eq!(b.next_set(66), Some(128));
        assert_eq!(b.next_set(130), Some(200));
        assert_eq!(b.count_ones(), 6);
    }
}
