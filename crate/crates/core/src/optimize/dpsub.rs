use super::{build_join_tree, CostFunction, CostValue, DpResult, DpStats, DpTable};
use crate::convolution::{ExtCost, SetFunction};
use crate::costmodel::{x_log_x, QueryInstance};
use crate::error::Result;

/// The subset DP
/// `DP(S) = c(S) ⊗ min_{∅⊂T⊂S} DP(T) ⊗ DP(S \ T)`, `DP({R}) = 0`,
/// visiting every ordered split of every admissible set.
///
/// With `cap`, sets with `c(S) > cap` are pruned to `INFINITY` without
/// enumerating their splits. Without cross products only connected sets are
/// evaluated.
pub fn dpsub(q: &QueryInstance, cost: CostFunction, cap: Option<u64>) -> Result<DpResult> {
    let (dp_table, optimal_value, splits) = match cost {
        CostFunction::Out => {
            let (dp, splits) = integer_dp(q, cap, |a, b| a.saturating_add(b), |c, best| c + best);
            let v = dp[q.full_set()];
            (DpTable::Out(dp), CostValue::Integer(v), splits)
        }
        CostFunction::Max => {
            let (dp, splits) = integer_dp(q, cap, u64::max, u64::max);
            let v = dp[q.full_set()];
            (DpTable::Max(dp), CostValue::Integer(v), splits)
        }
        CostFunction::Smj => {
            let (dp, splits) = smj_dp(q, cap);
            let v = dp[q.full_set()];
            (DpTable::Smj(dp), CostValue::Real(v), splits)
        }
    };
    let tree = if optimal_value.is_infinite() {
        None
    } else {
        Some(build_join_tree(q.full_set(), &dp_table, q)?)
    };
    Ok(DpResult {
        cost,
        optimal_value,
        dp_table,
        tree,
        stats: DpStats {
            splits,
            ..DpStats::default()
        },
    })
}

/// Shared loop for `C_out` and `C_max` over raw `u64` costs with
/// `u64::MAX` as `INFINITY`. `pair` combines the two sides of a split and
/// must keep `INFINITY` absorbing; `finish` folds `c(S)` into a finite
/// best split.
#[inline(always)]
fn integer_dp(
    q: &QueryInstance,
    cap: Option<u64>,
    pair: impl Fn(u64, u64) -> u64,
    finish: impl Fn(u64, u64) -> u64,
) -> (SetFunction<ExtCost>, u64) {
    const INF: u64 = u64::MAX;
    let n = q.n();
    let c = q.cardinalities();
    let allowed = q.connectivity();
    let cap = cap.unwrap_or(u64::MAX);
    let mut dp = vec![INF; 1 << n];
    for i in 0..n {
        dp[1 << i] = 0;
    }
    let mut splits = 0u64;
    for s in 1..(1u32 << n) {
        if s & (s - 1) == 0 {
            continue;
        }
        let su = s as usize;
        if allowed.is_some_and(|a| !a[su]) || c[su] > cap {
            continue;
        }
        let mut best = INF;
        let mut t = (s - 1) & s;
        while t != 0 {
            let v = pair(dp[t as usize], dp[(s ^ t) as usize]);
            best = best.min(v);
            t = (t - 1) & s;
        }
        splits += (1u64 << s.count_ones()) - 2;
        if best != INF {
            dp[su] = finish(c[su], best);
        }
    }
    let dp = dp.into_iter().map(to_ext).collect();
    (SetFunction::from_values(dp).expect("2^n table"), splits)
}

#[inline]
fn to_ext(v: u64) -> ExtCost {
    if v == u64::MAX {
        ExtCost::INFINITY
    } else {
        ExtCost::finite(v)
    }
}

/// Sort-merge-join side term of a set: its DP value plus `c log c`. Tree
/// extraction recomputes it with the same expression so split sums compare
/// bit-for-bit.
#[inline]
pub(crate) fn smj_side(dp: f64, card: u64) -> f64 {
    dp + x_log_x(card)
}

fn smj_dp(q: &QueryInstance, cap: Option<u64>) -> (SetFunction<f64>, u64) {
    let n = q.n();
    let c = q.cardinalities();
    let allowed = q.connectivity();
    let cap = cap.unwrap_or(u64::MAX);
    let mut dp = vec![f64::INFINITY; 1 << n];
    let mut side = vec![f64::INFINITY; 1 << n];
    for i in 0..n {
        dp[1 << i] = 0.0;
        side[1 << i] = smj_side(0.0, c[1 << i]);
    }
    let mut splits = 0u64;
    for s in 1..(1u32 << n) {
        if s & (s - 1) == 0 {
            continue;
        }
        let su = s as usize;
        if allowed.is_some_and(|a| !a[su]) || c[su] > cap {
            continue;
        }
        let mut best = f64::INFINITY;
        let mut t = (s - 1) & s;
        while t != 0 {
            best = best.min(side[t as usize] + side[(s ^ t) as usize]);
            t = (t - 1) & s;
        }
        splits += (1u64 << s.count_ones()) - 2;
        dp[su] = best;
        side[su] = smj_side(best, c[su]);
    }
    (SetFunction::from_values(dp).expect("2^n table"), splits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::tests::{names, three_way};
    use crate::costmodel::JoinTree;
    use crate::lattice::RelationSet;

    /// Every bushy tree over the members of `s` (ordered children).
    fn all_trees(s: RelationSet) -> Vec<JoinTree> {
        if s.is_singleton() {
            return vec![JoinTree::leaf(s.first().unwrap())];
        }
        let mut out = Vec::new();
        for t in crate::lattice::enumerate_proper_subsets(s) {
            for l in all_trees(t) {
                for r in all_trees(s.minus(t)) {
                    out.push(JoinTree::join(l.clone(), r));
                }
            }
        }
        out
    }

    fn brute(q: &QueryInstance, cost: CostFunction) -> CostValue {
        let trees = all_trees(q.full_set());
        match cost {
            CostFunction::Out => {
                CostValue::Integer(trees.iter().map(|t| q.cost_out(t).unwrap()).min().unwrap())
            }
            CostFunction::Max => {
                CostValue::Integer(trees.iter().map(|t| q.cost_max(t).unwrap()).min().unwrap())
            }
            CostFunction::Smj => CostValue::Real(
                trees
                    .iter()
                    .map(|t| q.cost_smj(t).unwrap())
                    .fold(f64::INFINITY, f64::min),
            ),
        }
    }

    #[test]
    fn three_way_examples() {
        let q = three_way();
        let r = dpsub(&q, CostFunction::Max, None).unwrap();
        assert_eq!(r.optimal_value, CostValue::Integer(ExtCost::finite(8)));
        assert_eq!(r.optimal_value, brute(&q, CostFunction::Max));
        let t = r.tree.as_ref().unwrap();
        assert_eq!(q.cost_max(t).unwrap(), ExtCost::finite(8));
        // first qualifying split in bitmask order is {R1} | {R2, R3}
        assert_eq!(
            t,
            &JoinTree::join(
                JoinTree::leaf(0),
                JoinTree::join(JoinTree::leaf(1), JoinTree::leaf(2))
            )
        );

        let r = dpsub(&q, CostFunction::Out, None).unwrap();
        assert_eq!(r.optimal_value, CostValue::Integer(ExtCost::finite(13)));
        assert_eq!(r.optimal_value, brute(&q, CostFunction::Out));
        r.verify(&q).unwrap();

        let r = dpsub(&q, CostFunction::Out, Some(5)).unwrap();
        assert_eq!(r.optimal_value, CostValue::Integer(ExtCost::INFINITY));
        assert!(r.tree.is_none());
        r.verify(&q).unwrap();
    }

    #[test]
    fn split_counter_matches_closed_form() {
        for n in 2..=10u32 {
            let card = SetFunction::from_fn(n as usize, |s| s.len() as u64 + 1);
            let q = QueryInstance::clique(names(n as usize), card).unwrap();
            let r = dpsub(&q, CostFunction::Out, None).unwrap();
            assert_eq!(r.stats.splits, 3u64.pow(n) - 2 * 2u64.pow(n) + 1);
        }
    }

    #[test]
    fn small_random_instances_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 2..=5 {
            for _ in 0..10 {
                let card = SetFunction::from_fn(n, |_| rng.gen_range(1..=50u64));
                let q = QueryInstance::clique(names(n), card).unwrap();
                for cost in [CostFunction::Out, CostFunction::Max, CostFunction::Smj] {
                    let r = dpsub(&q, cost, None).unwrap();
                    r.verify(&q).unwrap();
                    match (r.optimal_value, brute(&q, cost)) {
                        (CostValue::Real(a), CostValue::Real(b)) => {
                            assert!((a - b).abs() <= 1e-9 * b.max(1.0))
                        }
                        (a, b) => assert_eq!(a, b),
                    }
                }
            }
        }
    }

    #[test]
    fn chain_without_cross_products() {
        // 1 - 2 - 3 - 4; only connected sets are evaluated
        let edges = vec![(0, 1), (1, 2), (2, 3)];
        let card = SetFunction::from_fn(4, |s| Some(10 * s.len() as u64 + s.bits() as u64));
        let q = QueryInstance::new(names(4), edges, card, false).unwrap();
        let r = dpsub(&q, CostFunction::Out, None).unwrap();
        r.verify(&q).unwrap();
        let t = r.tree.unwrap();
        for s in t.inner_sets() {
            assert!(q.is_connected(s));
        }
        // connected sets of a 4-chain: 3 pairs, 2 triples, 1 full set
        assert_eq!(r.stats.splits, 3 * 2 + 2 * 6 + 14);

        let card = SetFunction::from_fn(3, |s| (s.bits() != 0b101).then_some(1));
        let broken = QueryInstance::new(names(3), vec![(0, 1)], card, false).unwrap();
        let r = dpsub(&broken, CostFunction::Max, None).unwrap();
        assert!(r.optimal_value.is_infinite());
    }
}
