use super::dpsub::smj_side;
use super::DpTable;
use crate::convolution::ExtCost;
use crate::costmodel::{JoinTree, QueryInstance};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_proper_subsets, RelationSet};

/// Rebuilds an optimal plan for `s` from a finished table.
///
/// At each set the first proper subset `T` (ascending bitmask order) with
/// `c(s) ⊗ DP(T) ⊗ DP(s \ T) = DP(s)` becomes the left child. A feasibility
/// table instead takes the first split with both sides reachable. Fails with
/// [`Error::CorruptTable`] if a reachable set has no qualifying split, and
/// with [`Error::InvalidArgument`] if `s` itself has no plan.
pub fn build_join_tree(s: RelationSet, table: &DpTable, q: &QueryInstance) -> Result<JoinTree> {
    if s.is_empty() || !s.is_subset_of(q.full_set()) {
        return Err(Error::InvalidArgument(format!(
            "{s:?} is not a nonempty set of the query's relations"
        )));
    }
    if !has_plan(s, table) {
        return Err(Error::InvalidArgument(format!("no plan exists for {s:?}")));
    }
    build(s, table, q)
}

fn has_plan(s: RelationSet, table: &DpTable) -> bool {
    match table {
        DpTable::Out(dp) | DpTable::Max(dp) => dp[s].is_finite(),
        DpTable::Smj(dp) => dp[s].is_finite(),
        DpTable::Feasibility { reachable, .. } => reachable[s],
    }
}

fn build(s: RelationSet, table: &DpTable, q: &QueryInstance) -> Result<JoinTree> {
    if s.is_singleton() {
        return Ok(JoinTree::leaf(s.first().unwrap()));
    }
    let left = enumerate_proper_subsets(s)
        .find(|&t| is_optimal_split(s, t, table, q))
        .ok_or(Error::CorruptTable(s))?;
    Ok(JoinTree::join(
        build(left, table, q)?,
        build(s.minus(left), table, q)?,
    ))
}

fn is_optimal_split(s: RelationSet, t: RelationSet, table: &DpTable, q: &QueryInstance) -> bool {
    let rest = s.minus(t);
    match table {
        DpTable::Out(dp) => {
            if dp[t].is_infinite() || dp[rest].is_infinite() {
                return false;
            }
            ExtCost::finite(q.card(s))
                .checked_add(dp[t])
                .and_then(|v| v.checked_add(dp[rest]))
                .is_ok_and(|v| v == dp[s])
        }
        DpTable::Max(dp) => {
            if dp[t].is_infinite() || dp[rest].is_infinite() {
                return false;
            }
            ExtCost::finite(q.card(s)).max(dp[t]).max(dp[rest]) == dp[s]
        }
        DpTable::Smj(dp) => {
            dp[t].is_finite()
                && dp[rest].is_finite()
                && smj_side(dp[t], q.card(t)) + smj_side(dp[rest], q.card(rest)) == dp[s]
        }
        DpTable::Feasibility { reachable, .. } => reachable[t] && reachable[rest],
    }
}
