use super::{
    build_join_tree, CoefficientPolynomial, CostFunction, CostValue, DpResult, DpStats, DpTable,
};
use crate::convolution::{ExtCost, LayeredDpState, Ring, SetFunction};
use crate::costmodel::QueryInstance;
use crate::error::{Error, Result};

/// Largest `W * n` the embedding accepts by default.
pub const DEFAULT_EXPONENT_BUDGET: u64 = 1 << 16;

/// Optimal `C_out` through the layered `(+, ·)` convolution over
/// polynomials: `DP(S)` is kept as `x^{cost}`, and after each layer only the
/// lowest surviving exponent is retained and shifted by `c(S)`.
///
/// Exponents grow up to `W * n`; instances above `budget` are refused.
pub fn dpconv_out_embedding(q: &QueryInstance) -> Result<DpResult> {
    dpconv_out_embedding_with_budget(q, DEFAULT_EXPONENT_BUDGET)
}

pub fn dpconv_out_embedding_with_budget(q: &QueryInstance, budget: u64) -> Result<DpResult> {
    let n = q.n();
    let required = q.max_join_cardinality() as u128 * n as u128;
    if required > budget as u128 {
        return Err(Error::ExponentBudgetExceeded { required, budget });
    }
    let base = SetFunction::from_fn(n, |s| {
        if s.is_singleton() {
            CoefficientPolynomial::one()
        } else {
            CoefficientPolynomial::zero()
        }
    });
    let mut state = LayeredDpState::new(&base)?;
    let c = q.cardinalities();
    state.run(|s, h| {
        if !q.allows(s) {
            return Ok(CoefficientPolynomial::zero());
        }
        Ok(match h.min_exponent() {
            Some(e) => CoefficientPolynomial::monomial(e + c[s.index()]),
            None => CoefficientPolynomial::zero(),
        })
    })?;

    let stats = DpStats {
        multiplications: state.stats().multiplications,
        layer_nanos: state.stats().layer_nanos.clone(),
        ..DpStats::default()
    };
    let dp = state.into_dp().map(|p| match p.min_exponent() {
        Some(e) => ExtCost::finite(e),
        None => ExtCost::INFINITY,
    });
    let optimal = dp[q.full_set()];
    let dp_table = DpTable::Out(dp);
    let tree = if optimal.is_finite() {
        Some(build_join_tree(q.full_set(), &dp_table, q)?)
    } else {
        None
    };
    Ok(DpResult {
        cost: CostFunction::Out,
        optimal_value: CostValue::Integer(optimal),
        dp_table,
        tree,
        stats,
    })
}
