use super::{dpconv_max, dpsub, CostFunction, DpResult, DpStats};
use crate::convolution::ExtCost;
use crate::costmodel::QueryInstance;
use crate::error::Result;

/// Outcome of the capped `C_out` optimization.
#[derive(Clone, Debug, PartialEq)]
pub struct CcapResult {
    /// Optimal `C_max`; `INFINITY` when no plan exists.
    pub gamma_star: ExtCost,
    /// `C_out`-optimal plan among those with `C_max = gamma_star`.
    pub capped_out: DpResult,
    /// Work done by the first pass.
    pub first_pass: DpStats,
}

impl CcapResult {
    /// Both passes combined.
    pub fn total_stats(&self) -> DpStats {
        let mut s = self.first_pass.clone();
        s.absorb(&self.capped_out.stats);
        s
    }
}

/// `gamma* = min C_max` via [`dpconv_max`], then `C_out` over sets with
/// `c(S) <= gamma*`.
pub fn optimize_ccap(q: &QueryInstance) -> Result<CcapResult> {
    capped(q, dpconv_max(q)?)
}

/// As [`optimize_ccap`] with the first pass done by the `O(3^n)` subset DP.
pub fn optimize_ccap_naive(q: &QueryInstance) -> Result<CcapResult> {
    capped(q, dpsub(q, CostFunction::Max, None)?)
}

fn capped(q: &QueryInstance, first: DpResult) -> Result<CcapResult> {
    let gamma_star = first
        .optimal_value
        .as_integer()
        .expect("C_max is integer valued");
    let capped_out = dpsub(q, CostFunction::Out, gamma_star.value().or(Some(0)))?;
    Ok(CcapResult {
        gamma_star,
        capped_out,
        first_pass: first.stats,
    })
}
