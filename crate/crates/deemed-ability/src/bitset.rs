//! Fixed-width bit sets.
//!
//! One type backs both truth-table keys (one bit per valuation) and world
//! sets (one bit per world), so set algebra and equality behave identically
//! in both roles.

use std::fmt;

/// A set over a fixed index range `0..len`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn empty(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = BitSet::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Number of indexable positions, not the cardinality.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn complement(&self) -> BitSet {
        let mut out = BitSet {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.trim();
        out
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|i| self.contains(*i))
    }

    /// Lowercase hex rendering, most significant word first, as `0x...`.
    pub fn to_hex(&self) -> String {
        let mut out = String::from("0x");
        let mut started = false;
        for w in self.words.iter().rev() {
            if started {
                out.push_str(&format!("{w:016x}"));
            } else if *w != 0 || self.words.len() == 1 {
                out.push_str(&format!("{w:x}"));
                started = true;
            }
        }
        if !started {
            out.push('0');
        }
        out
    }

    fn zip_with(&self, other: &BitSet, f: impl Fn(u64, u64) -> u64) -> BitSet {
        debug_assert_eq!(self.len, other.len);
        let mut out = BitSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        };
        out.trim();
        out
    }

    /// Clear bits above `len` so equality and hashing stay well defined.
    fn trim(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSet[{}]{{", self.len)?;
        let mut first = true;
        for i in self.iter_ones() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra_behaves() {
        let a = BitSet::from_indices(5, [0, 2, 4]);
        let b = BitSet::from_indices(5, [2, 3]);
        assert_eq!(a.union(&b), BitSet::from_indices(5, [0, 2, 3, 4]));
        assert_eq!(a.intersection(&b), BitSet::from_indices(5, [2]));
        assert_eq!(a.complement(), BitSet::from_indices(5, [1, 3]));
        assert!(BitSet::from_indices(5, [2]).is_subset(&b));
        assert!(!a.is_subset(&b));
    }

    #[test]
    fn complement_of_full_is_empty_across_word_boundary() {
        let full = BitSet::full(130);
        assert!(full.is_full());
        assert!(full.complement().is_empty());
        assert_eq!(full.count(), 130);
    }

    #[test]
    fn hex_rendering() {
        assert_eq!(BitSet::from_indices(4, [3]).to_hex(), "0x8");
        assert_eq!(BitSet::empty(4).to_hex(), "0x0");
        assert_eq!(BitSet::full(4).to_hex(), "0xf");
        let mut wide = BitSet::empty(80);
        wide.insert(64);
        assert_eq!(wide.to_hex(), "0x10000000000000000");
    }
}
