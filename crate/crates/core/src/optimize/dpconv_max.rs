use std::num::Wrapping;

use super::{build_join_tree, CostFunction, CostValue, DpResult, DpStats, DpTable};
use crate::convolution::{ExtCost, LayeredConfig, LayeredDpState, SetFunction};
use crate::costmodel::{JoinTree, QueryInstance};
use crate::error::{Error, Result};
use crate::lattice::RelationSet;

/// Threshold candidates: the distinct `c(S)` over admissible sets with
/// `|S| >= 2`, in decreasing order. The optimal `C_max` is one of them.
pub fn gamma_candidates(q: &QueryInstance) -> Vec<u64> {
    let c = q.cardinalities();
    let mut out: Vec<u64> = (0..c.len())
        .filter(|&m| (m as u32).count_ones() >= 2 && q.allows(RelationSet(m as u32)))
        .map(|m| c[m])
        .collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out.dedup();
    out
}

/// Binary lifting over the decreasing candidate list.
///
/// Index 0 (the largest candidate) is feasible whenever any plan exists.
/// `p` is the deepest index known feasible; each probe tests `p + step`
/// and halves `step`. Probes past the end of the list are skipped.
#[derive(Clone, Debug)]
pub struct GammaSearchState {
    candidates: Vec<u64>,
    p: usize,
    step: usize,
}

impl GammaSearchState {
    pub fn new(q: &QueryInstance) -> Self {
        Self::from_candidates(gamma_candidates(q))
    }

    /// Sorts and deduplicates `candidates` into decreasing order.
    pub fn from_candidates(mut candidates: Vec<u64>) -> Self {
        candidates.sort_unstable_by(|a, b| b.cmp(a));
        candidates.dedup();
        let step = match candidates.len() {
            0 | 1 => 0,
            len => 1 << (usize::BITS - 1 - (len - 1).leading_zeros()),
        };
        GammaSearchState {
            candidates,
            p: 0,
            step,
        }
    }

    pub fn candidates(&self) -> &[u64] {
        &self.candidates
    }

    /// The next threshold to test, or `None` when the search is over.
    pub fn next_probe(&mut self) -> Option<u64> {
        while self.step > 0 && self.p + self.step >= self.candidates.len() {
            self.step /= 2;
        }
        (self.step > 0).then(|| self.candidates[self.p + self.step])
    }

    /// Records the outcome of the probe last returned by `next_probe`.
    pub fn record(&mut self, feasible: bool) {
        if feasible {
            self.p += self.step;
        }
        self.step /= 2;
    }

    /// The smallest threshold known feasible.
    pub fn current(&self) -> Option<u64> {
        self.candidates.get(self.p).copied()
    }
}

/// Reusable feasibility checker over `Z / 2^32`. Clamped split counts at
/// layer `k` are at most `2^k - 2 < 2^32`, so a residue is nonzero exactly
/// when the count is.
struct FeasibilityEngine<'q> {
    q: &'q QueryInstance,
    base: SetFunction<Wrapping<u32>>,
    state: LayeredDpState<Wrapping<u32>>,
}

impl<'q> FeasibilityEngine<'q> {
    fn new(q: &'q QueryInstance, config: LayeredConfig) -> Result<Self> {
        let base = SetFunction::from_fn(q.n(), |s| Wrapping(s.is_singleton() as u32));
        let state = LayeredDpState::with_config(&base, config)?;
        Ok(FeasibilityEngine { q, base, state })
    }

    /// Runs every layer with threshold `gamma`; the finished table is left
    /// in `self.state`.
    fn check(&mut self, gamma: u64) -> Result<bool> {
        if self.state.current_layer() > 1 {
            self.state.reset(&self.base)?;
        }
        let c = self.q.cardinalities();
        let allowed = self.q.connectivity();
        self.state.run(|s, v| {
            let m = s.index();
            let ok = v.0 != 0 && c[m] <= gamma && allowed.is_none_or(|a| a[m]);
            Ok(Wrapping(ok as u32))
        })?;
        Ok(self.state.dp()[self.q.full_set()].0 != 0)
    }

    fn reachable(&self) -> SetFunction<bool> {
        self.state.dp().map(|v| v.0 != 0)
    }
}

/// Whether some plan keeps every intermediate cardinality at most `gamma`.
pub fn feasible_under_gamma(q: &QueryInstance, gamma: u64) -> Result<bool> {
    if q.n() == 1 {
        return Ok(true);
    }
    FeasibilityEngine::new(q, LayeredConfig::default())?.check(gamma)
}

/// Optimal `C_max` by binary search over [`gamma_candidates`].
///
/// The plan is extracted from the reachability table of the final threshold,
/// so every inner node satisfies `c <= gamma*`.
pub fn dpconv_max(q: &QueryInstance) -> Result<DpResult> {
    dpconv_max_with_config(q, LayeredConfig::default())
}

pub fn dpconv_max_with_config(q: &QueryInstance, config: LayeredConfig) -> Result<DpResult> {
    let full = q.full_set();
    if q.n() == 1 {
        let reachable = SetFunction::from_fn(1, |s| !s.is_empty());
        return Ok(DpResult {
            cost: CostFunction::Max,
            optimal_value: CostValue::Integer(ExtCost::ZERO),
            dp_table: DpTable::Feasibility {
                gamma: 0,
                reachable,
            },
            tree: Some(JoinTree::leaf(0)),
            stats: DpStats::default(),
        });
    }

    let mut engine = FeasibilityEngine::new(q, config)?;
    let mut search = GammaSearchState::new(q);
    let mut checks = 0u32;
    let mut best: Option<(u64, SetFunction<bool>)> = None;

    if let Some(top) = search.current() {
        // with cross products every plan is within the largest threshold;
        // otherwise a plan may not exist at all
        let top_ok = if q.cross_products_enabled() {
            true
        } else {
            checks += 1;
            let ok = engine.check(top)?;
            if ok {
                best = Some((top, engine.reachable()));
            }
            ok
        };
        if top_ok {
            while let Some(gamma) = search.next_probe() {
                checks += 1;
                let ok = engine.check(gamma)?;
                if ok {
                    best = Some((gamma, engine.reachable()));
                }
                search.record(ok);
            }
            if best.is_none() {
                checks += 1;
                if !engine.check(top)? {
                    return Err(Error::CorruptTable(full));
                }
                best = Some((top, engine.reachable()));
            }
        }
    }

    let stats = DpStats {
        splits: 0,
        multiplications: engine.state.stats().multiplications,
        feasibility_checks: checks,
        layer_nanos: engine.state.stats().layer_nanos.clone(),
    };
    let Some((gamma, reachable)) = best else {
        return Ok(DpResult {
            cost: CostFunction::Max,
            optimal_value: CostValue::Integer(ExtCost::INFINITY),
            dp_table: DpTable::Feasibility {
                gamma: 0,
                reachable: SetFunction::filled(q.n(), false),
            },
            tree: None,
            stats,
        });
    };
    let dp_table = DpTable::Feasibility { gamma, reachable };
    let tree = build_join_tree(full, &dp_table, q)?;
    Ok(DpResult {
        cost: CostFunction::Max,
        optimal_value: CostValue::Integer(ExtCost::finite(gamma)),
        dp_table,
        tree: Some(tree),
        stats,
    })
}
