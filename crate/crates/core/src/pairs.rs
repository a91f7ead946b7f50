//! The six unordered index pairs `{i, j} ⊂ {1, 2, 3, 4}`.
//!
//! Slots are always ordered 12, 13, 14, 23, 24, 34. The complementary pair of
//! slot `k` is slot `5 − k`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair(u8);

/// Zero-based vertex indices of each slot.
const INDICES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub const PAIRS: [Pair; 6] = [Pair(0), Pair(1), Pair(2), Pair(3), Pair(4), Pair(5)];

impl Pair {
    /// The pair `{i, j}` from 1-based labels.
    pub fn from_labels(i: usize, j: usize) -> Result<Pair> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if a == b || a < 1 || b > 4 {
            return Err(Error::MalformedPair(i, j));
        }
        let slot = INDICES.iter().position(|&p| p == (a - 1, b - 1)).expect("valid pair");
        Ok(Pair(slot as u8))
    }

    pub fn slot(self) -> usize {
        self.0 as usize
    }

    /// Zero-based `(i, j)` with `i < j`.
    pub fn indices(self) -> (usize, usize) {
        INDICES[self.slot()]
    }

    /// The disjoint pair `{s, t}` with `{i, j, s, t} = {1, 2, 3, 4}`.
    pub fn complement(self) -> Pair {
        Pair(5 - self.0)
    }

    pub fn contains(self, vertex: usize) -> bool {
        let (i, j) = self.indices();
        i == vertex || j == vertex
    }

    pub fn intersects(self, other: Pair) -> bool {
        let (i, j) = other.indices();
        self.contains(i) || self.contains(j)
    }

    /// Image of the pair under a permutation of the four vertices.
    pub fn permuted(self, perm: [usize; 4]) -> Pair {
        let (i, j) = self.indices();
        Pair::from_labels(perm[i] + 1, perm[j] + 1).expect("permutation maps pairs to pairs")
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.indices();
        write!(f, "{}{}", i + 1, j + 1)
    }
}

/// A subset of the six pairs, as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PairSet(u8);

impl PairSet {
    pub const EMPTY: PairSet = PairSet(0);

    pub fn from_pairs(pairs: impl IntoIterator<Item = Pair>) -> PairSet {
        PairSet(pairs.into_iter().fold(0, |m, p| m | (1 << p.0)))
    }

    pub fn contains(self, p: Pair) -> bool {
        self.0 & (1 << p.0) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Pair> {
        PAIRS.into_iter().filter(move |&p| self.contains(p))
    }

    pub fn complement(self) -> PairSet {
        PairSet(!self.0 & 0b11_1111)
    }

    /// A vertex contained in every pair of the set, if any.
    pub fn common_vertex(self) -> Option<usize> {
        (0..4).find(|&v| !self.is_empty() && self.iter().all(|p| p.contains(v)))
    }
}

impl FromIterator<Pair> for PairSet {
    fn from_iter<T: IntoIterator<Item = Pair>>(iter: T) -> Self {
        PairSet::from_pairs(iter)
    }
}

/// All 24 permutations of the four vertex indices.
pub fn vertex_permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|v| p.contains(&v)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_complements() {
        let p = Pair::from_labels(3, 1).unwrap();
        assert_eq!(p.to_string(), "13");
        assert_eq!(p.complement().to_string(), "24");
        for p in PAIRS {
            let (i, j) = p.indices();
            let (s, t) = p.complement().indices();
            let mut all = [i, j, s, t];
            all.sort_unstable();
            assert_eq!(all, [0, 1, 2, 3]);
        }
        assert!(Pair::from_labels(2, 2).is_err());
        assert!(Pair::from_labels(0, 2).is_err());
        assert!(Pair::from_labels(1, 5).is_err());
    }

    #[test]
    fn pair_sets() {
        let s: PairSet = [Pair::from_labels(1, 2).unwrap(), Pair::from_labels(1, 3).unwrap()].into_iter().collect();
        assert_eq!(s.len(), 2);
        assert_eq!(s.common_vertex(), Some(0));
        assert_eq!(s.complement().len(), 4);
        assert_eq!(PairSet::EMPTY.common_vertex(), None);
        assert_eq!(vertex_permutations().len(), 24);
    }
}
