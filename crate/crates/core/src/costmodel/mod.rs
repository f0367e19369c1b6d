//! Query instances, join trees and the cost functions evaluated over them.

mod io;
mod tree;

pub use io::{CardinalityEntry, QueryFile};
pub use tree::JoinTree;

use crate::convolution::{ExtCost, SetFunction};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_proper_subsets, RelationSet, MAX_RELATIONS};

/// A join query: relations, join edges and the cardinality of every set of
/// relations an optimizer may form.
///
/// Singleton entries hold base-relation sizes. With cross products disabled,
/// entries of disconnected sets are absent (stored as 0) and must never be
/// read.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryInstance {
    names: Vec<String>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<u32>,
    cardinality: SetFunction<u64>,
    cross_products: bool,
    connected: Option<Vec<bool>>,
    max_join_cardinality: u64,
}

impl QueryInstance {
    /// Builds an instance. `cardinality` must be `Some` on every nonempty set
    /// the optimizers may touch: all of them with cross products enabled,
    /// the connected ones otherwise.
    pub fn new(
        names: Vec<String>,
        edges: Vec<(usize, usize)>,
        cardinality: SetFunction<Option<u64>>,
        cross_products: bool,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 || n > MAX_RELATIONS {
            return Err(Error::InvalidInstance(format!(
                "relation count {n} outside 1..={MAX_RELATIONS}"
            )));
        }
        if cardinality.n() != n {
            return Err(Error::InvalidInstance(format!(
                "cardinality table covers {} relations, expected {n}",
                cardinality.n()
            )));
        }
        let mut adjacency = vec![0u32; n];
        for &(a, b) in &edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidInstance(format!("invalid edge ({a}, {b})")));
            }
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        }
        let connected = (!cross_products).then(|| connectivity_table(n, &adjacency));

        let mut values = Vec::with_capacity(1 << n);
        let mut w = 0u64;
        for (m, c) in cardinality.values().iter().enumerate() {
            let set = RelationSet(m as u32);
            let allowed = connected.as_ref().is_none_or(|t| t[m]);
            let v = match c {
                _ if m == 0 => 0,
                Some(v) if allowed => *v,
                None if allowed => {
                    return Err(Error::InvalidInstance(format!(
                        "missing cardinality for {set:?}"
                    )))
                }
                _ => 0,
            };
            if v == u64::MAX {
                return Err(Error::InvalidInstance(format!(
                    "cardinality of {set:?} is out of range"
                )));
            }
            if set.len() >= 2 && allowed {
                w = w.max(v);
            }
            values.push(v);
        }
        // every finite C_out value is at most W * n; keep it below INFINITY
        match w.checked_mul(n as u64) {
            Some(b) if b < u64::MAX => {}
            _ => {
                return Err(Error::InvalidInstance(format!(
                    "largest cardinality {w} times {n} relations overflows the cost domain"
                )))
            }
        }

        Ok(QueryInstance {
            names,
            edges,
            adjacency,
            cardinality: SetFunction::from_values(values)?,
            cross_products,
            connected,
            max_join_cardinality: w,
        })
    }

    /// A clique query over the given cardinalities (cross products enabled).
    pub fn clique(names: Vec<String>, cardinality: SetFunction<u64>) -> Result<Self> {
        let n = names.len();
        let edges = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        QueryInstance::new(names, edges, cardinality.map(|&v| Some(v)), true)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cross_products_enabled(&self) -> bool {
        self.cross_products
    }

    /// `W`, the largest cardinality over sets of two or more relations.
    pub fn max_join_cardinality(&self) -> u64 {
        self.max_join_cardinality
    }

    pub fn full_set(&self) -> RelationSet {
        RelationSet::full(self.n())
    }

    /// `c(s)`. Reading a disconnected set with cross products disabled is a
    /// logic error.
    #[inline]
    pub fn card(&self, s: RelationSet) -> u64 {
        debug_assert!(self.allows(s), "c({s:?}) read for a disconnected set");
        self.cardinality[s]
    }

    pub fn try_card(&self, s: RelationSet) -> Result<u64> {
        if !self.allows(s) {
            return Err(Error::DisconnectedSet(s));
        }
        Ok(self.cardinality[s])
    }

    /// Raw table; entries of disallowed sets are 0.
    pub fn cardinalities(&self) -> &[u64] {
        self.cardinality.values()
    }

    /// Whether optimizers may form `s` (always true with cross products).
    #[inline]
    pub fn allows(&self, s: RelationSet) -> bool {
        self.connected.as_ref().is_none_or(|t| t[s.index()])
    }

    /// Per-set permission table when cross products are disabled.
    pub(crate) fn connectivity(&self) -> Option<&[bool]> {
        self.connected.as_deref()
    }

    /// Whether the edges induced on `s` connect it.
    pub fn is_connected(&self, s: RelationSet) -> bool {
        is_connected_mask(s.bits(), &self.adjacency)
    }

    /// Every `(S, S1, S2)` with `c(S) > c(S1) c(S2)`, one per unordered
    /// partition of each set of size at least two. Partitions touching
    /// absent entries are skipped.
    pub fn validate_cardinalities(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let c = self.cardinalities();
        for m in 1..1u32 << self.n() {
            let s = RelationSet(m);
            if s.len() < 2 || !self.allows(s) {
                continue;
            }
            let low = m & m.wrapping_neg();
            for t in enumerate_proper_subsets(s).filter(|t| t.bits() & low != 0) {
                let rest = s.minus(t);
                if !self.allows(t) || !self.allows(rest) {
                    continue;
                }
                let bound = u128::from(c[t.index()]) * u128::from(c[rest.index()]);
                if u128::from(c[m as usize]) > bound {
                    out.push(Violation {
                        set: s,
                        left: t,
                        right: rest,
                    });
                }
            }
        }
        out
    }

    /// `C_out`: the sum of `c` over the sets spanned by inner nodes.
    pub fn cost_out(&self, tree: &JoinTree) -> Result<ExtCost> {
        self.check_tree(tree)?;
        let mut total = ExtCost::ZERO;
        for s in tree.inner_sets() {
            total = total.checked_add(ExtCost::finite(self.try_card(s)?))?;
        }
        Ok(total)
    }

    /// `C_max`: the largest `c` over the sets spanned by inner nodes.
    pub fn cost_max(&self, tree: &JoinTree) -> Result<ExtCost> {
        self.check_tree(tree)?;
        let mut best = ExtCost::ZERO;
        for s in tree.inner_sets() {
            best = best.max(ExtCost::finite(self.try_card(s)?));
        }
        Ok(best)
    }

    /// Sort-merge-join cost: every join adds `x log2 x` for the cardinality
    /// `x` of each input (base size for leaves), with `0 log 0 = 0`.
    pub fn cost_smj(&self, tree: &JoinTree) -> Result<f64> {
        self.check_tree(tree)?;
        fn walk(q: &QueryInstance, t: &JoinTree) -> Result<f64> {
            match t {
                JoinTree::Leaf(_) => Ok(0.0),
                JoinTree::Join(l, r) => {
                    let cl = q.try_card(l.relations())?;
                    let cr = q.try_card(r.relations())?;
                    Ok(x_log_x(cl) + x_log_x(cr) + walk(q, l)? + walk(q, r)?)
                }
            }
        }
        walk(self, tree)
    }

    fn check_tree(&self, tree: &JoinTree) -> Result<()> {
        let span = tree.validate()?;
        if !span.is_subset_of(self.full_set()) {
            return Err(Error::InvalidArgument(format!(
                "join tree spans {span:?}, outside the {} relations",
                self.n()
            )));
        }
        Ok(())
    }
}

/// `x log2 x`, taking `0 log 0 = 1 log 1 = 0`.
#[inline]
pub fn x_log_x(x: u64) -> f64 {
    if x <= 1 {
        0.0
    } else {
        let x = x as f64;
        x * x.log2()
    }
}

/// A submultiplicativity failure: `c(set) > c(left) * c(right)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub set: RelationSet,
    pub left: RelationSet,
    pub right: RelationSet,
}

fn is_connected_mask(s: u32, adjacency: &[u32]) -> bool {
    if s == 0 {
        return false;
    }
    let mut reached = s & s.wrapping_neg();
    loop {
        let mut frontier = reached;
        let mut next = reached;
        while frontier != 0 {
            let i = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            next |= adjacency[i] & s;
        }
        if next == reached {
            return reached == s;
        }
        reached = next;
    }
}

fn connectivity_table(n: usize, adjacency: &[u32]) -> Vec<bool> {
    (0..1u32 << n)
        .map(|m| is_connected_mask(m, adjacency))
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("R{i}")).collect()
    }

    /// Three relations with c(12)=10, c(13)=20, c(23)=5, c(123)=8.
    pub(crate) fn three_way() -> QueryInstance {
        let mut c = SetFunction::filled(3, 1u64);
        c[RelationSet(0b011)] = 10;
        c[RelationSet(0b101)] = 20;
        c[RelationSet(0b110)] = 5;
        c[RelationSet(0b111)] = 8;
        QueryInstance::clique(names(3), c).unwrap()
    }

    fn chain(n: usize) -> QueryInstance {
        let edges = (0..n - 1).map(|i| (i, i + 1)).collect();
        let card = SetFunction::from_fn(n, |s| Some(s.len() as u64 * 10));
        QueryInstance::new(names(n), edges, card, false).unwrap()
    }

    fn leaf(i: usize) -> JoinTree {
        JoinTree::leaf(i)
    }

    fn join(a: JoinTree, b: JoinTree) -> JoinTree {
        JoinTree::join(a, b)
    }

    #[test]
    fn cost_out_examples() {
        let q = three_way();
        assert_eq!(q.cost_out(&leaf(0)).unwrap(), ExtCost::ZERO);
        // ((2 ⋈ 3) ⋈ 1) = 5 + 8
        let t = join(join(leaf(1), leaf(2)), leaf(0));
        assert_eq!(q.cost_out(&t).unwrap(), ExtCost::finite(13));
        let t = join(join(leaf(0), leaf(1)), leaf(2));
        assert_eq!(q.cost_out(&t).unwrap(), ExtCost::finite(18));
    }

    #[test]
    fn cost_max_examples() {
        let q = three_way();
        assert_eq!(q.cost_max(&leaf(2)).unwrap(), ExtCost::ZERO);
        let t = join(join(leaf(1), leaf(2)), leaf(0));
        assert_eq!(q.cost_max(&t).unwrap(), ExtCost::finite(8));
        let t = join(join(leaf(0), leaf(2)), leaf(1));
        assert_eq!(q.cost_max(&t).unwrap(), ExtCost::finite(20));
    }

    #[test]
    fn cost_smj_examples() {
        let mut c = SetFunction::filled(2, 0u64);
        c[RelationSet(0b01)] = 4;
        c[RelationSet(0b10)] = 8;
        c[RelationSet(0b11)] = 16;
        let q = QueryInstance::clique(names(2), c).unwrap();
        assert_eq!(q.cost_smj(&leaf(0)).unwrap(), 0.0);
        assert_eq!(q.cost_smj(&join(leaf(0), leaf(1))).unwrap(), 32.0);

        let mut c = SetFunction::filled(3, 1u64);
        c[RelationSet(0b100)] = 8;
        c[RelationSet(0b011)] = 1;
        c[RelationSet(0b111)] = 5;
        let q = QueryInstance::clique(names(3), c).unwrap();
        // the {1,2} child has c = 1 and contributes nothing
        let t = join(join(leaf(0), leaf(1)), leaf(2));
        assert_eq!(q.cost_smj(&t).unwrap(), 24.0);
    }

    #[test]
    fn connectivity_examples() {
        let q = three_way();
        assert!(crate::lattice::all_sets(3)
            .skip(1)
            .all(|s| q.is_connected(s)));
        let c = chain(3);
        assert!(!c.is_connected(RelationSet(0b101)));
        assert!(c.is_connected(RelationSet(0b011)));
        assert!(c.is_connected(RelationSet(0b100)));
        assert!(!c.allows(RelationSet(0b101)));
        assert!(matches!(
            c.try_card(RelationSet(0b101)),
            Err(Error::DisconnectedSet(_))
        ));
        let t = join(join(leaf(0), leaf(2)), leaf(1));
        assert!(c.cost_out(&t).is_err());
    }

    #[test]
    fn submultiplicativity_violations() {
        let mut c = SetFunction::filled(2, 0u64);
        c[RelationSet(0b01)] = 2;
        c[RelationSet(0b10)] = 3;
        c[RelationSet(0b11)] = 7;
        let q = QueryInstance::clique(names(2), c.clone()).unwrap();
        let v = q.validate_cardinalities();
        assert_eq!(
            v,
            vec![Violation {
                set: RelationSet(0b11),
                left: RelationSet(0b01),
                right: RelationSet(0b10)
            }]
        );
        c[RelationSet(0b11)] = 6;
        let q = QueryInstance::clique(names(2), c).unwrap();
        assert!(q.validate_cardinalities().is_empty());
    }

    #[test]
    fn rejects_bad_instances() {
        let card = SetFunction::from_fn(3, |s| (s.len() != 3).then_some(5));
        assert!(QueryInstance::new(names(3), vec![(0, 1), (1, 2)], card.clone(), true).is_err());
        assert!(QueryInstance::new(names(3), vec![(0, 3)], card, true).is_err());
        // disconnected sets may be absent without cross products
        let card = SetFunction::from_fn(3, |s| (s != RelationSet(0b101)).then_some(5));
        assert!(QueryInstance::new(names(3), vec![(0, 1), (1, 2)], card, false).is_ok());
        let huge = SetFunction::filled(3, u64::MAX / 2);
        assert!(QueryInstance::clique(names(3), huge).is_err());
        let q = three_way();
        assert_eq!(q.max_join_cardinality(), 20);
        assert!(q.cost_out(&leaf(5)).is_err());
    }
}
