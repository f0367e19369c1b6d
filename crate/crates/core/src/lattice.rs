//! Subset-lattice primitives over bitmask-encoded relation sets.

use std::fmt;

/// Largest number of relations a query may have. Every dense table is
/// indexed by a `u32` mask.
pub const MAX_RELATIONS: usize = 30;

/// A subset of the relations `0..n`, one bit per relation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RelationSet(pub u32);

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_RELATIONS);
        RelationSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        RelationSet(1 << i)
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        RelationSet(members.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_singleton(self) -> bool {
        self.0 != 0 && self.0 & (self.0 - 1) == 0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(self, other: RelationSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn union(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 & other.0)
    }

    /// `self \ other`.
    #[inline]
    pub fn minus(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 & !other.0)
    }

    /// Index of the lowest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Member indices in increasing order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            Some(i as usize)
        })
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

/// Iterator over all `T` with `∅ ⊂ T ⊂ s`, in increasing bitmask order.
#[derive(Clone, Debug)]
pub struct ProperSubsets {
    set: u32,
    next: u32,
}

impl Iterator for ProperSubsets {
    type Item = RelationSet;

    #[inline]
    fn next(&mut self) -> Option<RelationSet> {
        if self.next == self.set || self.next == 0 {
            return None;
        }
        let cur = self.next;
        // (t - s) & s steps to the next larger submask.
        self.next = cur.wrapping_sub(self.set) & self.set;
        Some(RelationSet(cur))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (0, Some((1usize << self.set.count_ones()).saturating_sub(2)))
    }
}

/// Every nonempty proper subset of `s`, ascending. Yields `2^|s| - 2` sets
/// (none for the empty set or a singleton).
pub fn enumerate_proper_subsets(s: RelationSet) -> ProperSubsets {
    let first = s.0 & s.0.wrapping_neg();
    ProperSubsets {
        set: s.0,
        next: if s.0 == 0 { 0 } else { first },
    }
}

/// Iterator over all `k`-element subsets of `{0, .., n-1}` in increasing
/// bitmask order (Gosper's hack).
#[derive(Clone, Debug)]
pub struct SetsOfCardinality {
    next: Option<u64>,
    limit: u64,
}

impl Iterator for SetsOfCardinality {
    type Item = RelationSet;

    #[inline]
    fn next(&mut self) -> Option<RelationSet> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            let succ = (((ripple ^ cur) >> 2) / low) | ripple;
            (succ < self.limit).then_some(succ)
        };
        Some(RelationSet(cur as u32))
    }
}

pub fn sets_of_cardinality(n: usize, k: usize) -> SetsOfCardinality {
    assert!(n <= MAX_RELATIONS, "at most {MAX_RELATIONS} relations");
    SetsOfCardinality {
        next: (k <= n).then(|| (1u64 << k) - 1),
        limit: 1u64 << n,
    }
}

/// All masks of the `n`-relation lattice, `∅` through `V`.
pub fn all_sets(n: usize) -> impl Iterator<Item = RelationSet> {
    (0..1u32 << n).map(RelationSet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn masks(v: &[u32]) -> Vec<RelationSet> {
        v.iter().copied().map(RelationSet).collect()
    }

    #[test]
    fn proper_subsets_examples() {
        let got: Vec<_> = enumerate_proper_subsets(RelationSet(0b101)).collect();
        assert_eq!(got, masks(&[0b001, 0b100]));

        // oracle: scan every mask below s
        let s = 0b111u32;
        let want: Vec<_> = (1..s).filter(|m| m & !s == 0).map(RelationSet).collect();
        let got: Vec<_> = enumerate_proper_subsets(RelationSet(s)).collect();
        assert_eq!(got, want);
        assert_eq!(got, masks(&[0b001, 0b010, 0b011, 0b100, 0b101, 0b110]));

        assert_eq!(enumerate_proper_subsets(RelationSet(0b001)).count(), 0);
        assert_eq!(enumerate_proper_subsets(RelationSet::EMPTY).count(), 0);
    }

    #[test]
    fn cardinality_examples() {
        let oracle = |n: usize, k: usize| -> Vec<RelationSet> {
            (0..1u32 << n)
                .filter(|m| m.count_ones() as usize == k)
                .map(RelationSet)
                .collect()
        };
        assert_eq!(sets_of_cardinality(3, 2).collect::<Vec<_>>(), oracle(3, 2));
        assert_eq!(
            sets_of_cardinality(3, 2).collect::<Vec<_>>(),
            masks(&[0b011, 0b101, 0b110])
        );
        assert_eq!(sets_of_cardinality(3, 0).collect::<Vec<_>>(), masks(&[0]));
        assert_eq!(
            sets_of_cardinality(3, 3).collect::<Vec<_>>(),
            masks(&[0b111])
        );
        assert_eq!(sets_of_cardinality(3, 4).count(), 0);
        for n in 0..=12 {
            for k in 0..=n {
                assert_eq!(sets_of_cardinality(n, k).collect::<Vec<_>>(), oracle(n, k));
            }
        }
    }

    #[test]
    fn cardinality_layers_partition_lattice() {
        for n in 0..=14 {
            let total: usize = (0..=n).map(|k| sets_of_cardinality(n, k).count()).sum();
            assert_eq!(total, 1 << n);
        }
    }

    #[test]
    fn subset_counts_sum_to_three_pow_n() {
        for n in 0..=12usize {
            let mut total = 0u64;
            for s in all_sets(n) {
                let proper = enumerate_proper_subsets(s).count() as u64;
                // ∅ and s itself complete the power set (they coincide for s = ∅)
                total += if s.is_empty() { 1 } else { proper + 2 };
            }
            assert_eq!(total, 3u64.pow(n as u32));
        }
    }

    proptest! {
        #[test]
        fn proper_subsets_complete_the_power_set(s in 1u32..(1 << 16)) {
            let s = RelationSet(s);
            let subs: Vec<_> = enumerate_proper_subsets(s).collect();
            prop_assert_eq!(subs.len(), (1usize << s.len()) - 2);
            prop_assert!(subs.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(subs.iter().all(|t| t.is_subset_of(s) && *t != s && !t.is_empty()));
        }
    }

    #[test]
    fn set_accessors() {
        let s = RelationSet::from_members([0, 2, 5]);
        assert_eq!(s.bits(), 0b100101);
        assert_eq!(s.len(), 3);
        assert_eq!(s.members().collect::<Vec<_>>(), vec![0, 2, 5]);
        assert!(RelationSet::singleton(4).is_singleton());
        assert!(!s.is_singleton());
        assert_eq!(RelationSet::full(3), RelationSet(0b111));
        assert_eq!(RelationSet::full(30).len(), 30);
        assert_eq!(format!("{s:?}"), "{0, 2, 5}");
    }
}
