//! Compact subset encoding over a population `[0, n)`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A subset `S ⊆ [0, n)` stored as a little-endian bit vector.
///
/// Bits at or above `n` are never set. Masks are totally ordered by the
/// integer value of their bits (population size compared first), which is
/// the iteration order used by every exhaustive routine in this crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    n: usize,
    words: Vec<u64>,
}

impl SubsetMask {
    pub fn empty(n: usize) -> Self {
        SubsetMask { n, words: vec![0; n.div_ceil(WORD)] }
    }

    pub fn full(n: usize) -> Self {
        let mut m = Self::empty(n);
        for (w, word) in m.words.iter_mut().enumerate() {
            let remaining = n - w * WORD;
            *word = if remaining >= WORD { u64::MAX } else { (1u64 << remaining) - 1 };
        }
        m
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut m = Self::empty(n);
        for &i in indices {
            if i >= n {
                return Err(Error::invalid(format!("index {i} out of range for n = {n}")));
            }
            m.insert(i);
        }
        Ok(m)
    }

    /// Builds a mask from the low `n` bits of `bits` (`n ≤ 64`).
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n <= WORD, "from_bits supports n <= 64, got {n}");
        let mut m = Self::empty(n);
        if n > 0 {
            let keep = if n == WORD { u64::MAX } else { (1u64 << n) - 1 };
            m.words[0] = bits & keep;
        }
        m
    }

    /// The integer value of the mask, if it fits in a `u64`.
    pub fn to_bits(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => self.words[1..].iter().all(|&w| w == 0).then_some(self.words[0]),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.n, "index {i} out of range for n = {}", self.n);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.n {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn with(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.insert(i);
        m
    }

    pub fn without(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.remove(i);
        m
    }

    pub fn complement(&self) -> Self {
        let full = Self::full(self.n);
        SubsetMask {
            n: self.n,
            words: self.words.iter().zip(&full.words).map(|(a, f)| !a & f).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Set members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * WORD + tz)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}/{}", self.n)
    }
}

/// All masks of popcount `k` over `n ≤ 63` elements, in increasing integer order.
pub(crate) fn masks_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    debug_assert!(n < 64);
    let limit = 1u64 << n;
    let mut next = if k > n { None } else { Some((1u64 << k) - 1) };
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit || (k == 0 && cur != 0) {
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_and_empty() {
        for n in [0, 1, 5, 63, 64, 65, 150] {
            assert_eq!(SubsetMask::full(n).len(), n);
            assert!(SubsetMask::empty(n).is_empty());
            assert_eq!(SubsetMask::full(n).complement(), SubsetMask::empty(n));
        }
    }

    #[test]
    fn rejects_out_of_range_index() {
        assert!(SubsetMask::from_indices(3, &[0, 3]).is_err());
    }

    #[test]
    fn from_bits_clears_high_bits() {
        let m = SubsetMask::from_bits(3, 0b1111_0101);
        assert_eq!(m.to_vec(), vec![0, 2]);
    }

    #[test]
    fn order_is_integer_order() {
        let a = SubsetMask::from_indices(70, &[65]).unwrap();
        let b = SubsetMask::from_indices(70, &[0, 1, 2, 63]).unwrap();
        assert!(a > b);
        assert!(SubsetMask::from_bits(4, 3) < SubsetMask::from_bits(4, 4));
    }

    #[test]
    fn gosper_enumerates_combinations() {
        let all: Vec<u64> = masks_of_size(5, 2).collect();
        assert_eq!(all.len(), 10);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|m| m.count_ones() == 2));
        assert_eq!(masks_of_size(4, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(masks_of_size(4, 4).collect::<Vec<_>>(), vec![15]);
        assert_eq!(masks_of_size(3, 4).count(), 0);
    }

    proptest! {
        #[test]
        fn insert_remove_consistent(n in 1usize..200, idx in proptest::collection::vec(0usize..200, 0..40)) {
            let idx: Vec<usize> = idx.into_iter().filter(|&i| i < n).collect();
            let m = SubsetMask::from_indices(n, &idx).unwrap();
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            sorted.dedup();
            prop_assert_eq!(m.to_vec(), sorted.clone());
            prop_assert_eq!(m.len(), sorted.len());
            for &i in &sorted {
                prop_assert!(m.without(i).is_subset_of(&m));
                prop_assert!(!m.without(i).contains(i));
            }
            prop_assert_eq!(m.complement().len(), n - sorted.len());
        }
    }
}
