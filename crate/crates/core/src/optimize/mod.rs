//! Join-ordering optimizers.
//!
//! * [`dpsub`]: the `O(3^n)` subset DP for `C_out`, `C_max` and `C_smj`,
//!   optionally capped.
//! * [`dpconv_max`]: optimal `C_max` by binary search over feasibility
//!   checks, each a layered `(+, ·)` convolution of a 0/1 table.
//! * [`dpconv_out_embedding`]: optimal `C_out` by running the layered
//!   convolution over polynomials whose exponents carry the costs.
//! * [`optimize_ccap`]: minimal `C_out` among plans achieving the optimal
//!   `C_max`.

mod ccap;
mod dpconv_max;
mod dpsub;
mod embedding;
mod polynomial;
mod tree;

use std::fmt;

pub use ccap::{optimize_ccap, optimize_ccap_naive, CcapResult};
pub use dpconv_max::{
    dpconv_max, dpconv_max_with_config, feasible_under_gamma, gamma_candidates, GammaSearchState,
};
pub use dpsub::dpsub;
pub use embedding::{
    dpconv_out_embedding, dpconv_out_embedding_with_budget, DEFAULT_EXPONENT_BUDGET,
};
pub use polynomial::{Coefficient, CoefficientPolynomial};
pub use tree::build_join_tree;

use crate::convolution::{ExtCost, SetFunction};
use crate::costmodel::{JoinTree, QueryInstance};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostFunction {
    /// Sum of intermediate cardinalities.
    Out,
    /// Largest intermediate cardinality.
    Max,
    /// Sort-merge-join cost.
    Smj,
}

impl fmt::Display for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostFunction::Out => "out",
            CostFunction::Max => "max",
            CostFunction::Smj => "smj",
        })
    }
}

/// An optimal cost: integer for `C_out`/`C_max`, real for `C_smj`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CostValue {
    Integer(ExtCost),
    Real(f64),
}

impl CostValue {
    pub fn is_infinite(&self) -> bool {
        match self {
            CostValue::Integer(c) => c.is_infinite(),
            CostValue::Real(x) => x.is_infinite(),
        }
    }

    pub fn as_integer(&self) -> Option<ExtCost> {
        match self {
            CostValue::Integer(c) => Some(*c),
            CostValue::Real(_) => None,
        }
    }
}

impl fmt::Display for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostValue::Integer(c) => write!(f, "{c}"),
            CostValue::Real(x) => write!(f, "{x}"),
        }
    }
}

/// A finished DP table together with the semiring it was computed in.
#[derive(Clone, Debug, PartialEq)]
pub enum DpTable {
    Out(SetFunction<ExtCost>),
    Max(SetFunction<ExtCost>),
    Smj(SetFunction<f64>),
    /// `reachable[S]`: `S` has a plan whose intermediates all satisfy
    /// `c <= gamma`.
    Feasibility {
        gamma: u64,
        reachable: SetFunction<bool>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DpStats {
    /// Ordered splits `(T, S \ T)` enumerated by a subset DP.
    pub splits: u64,
    /// Ring multiplications in layered convolutions.
    pub multiplications: u64,
    /// Feasibility checks run by the `C_max` search.
    pub feasibility_checks: u32,
    /// Layered wall time per layer, summed over checks.
    pub layer_nanos: Vec<u64>,
}

impl DpStats {
    pub(crate) fn absorb(&mut self, other: &DpStats) {
        self.splits += other.splits;
        self.multiplications += other.multiplications;
        self.feasibility_checks += other.feasibility_checks;
        if self.layer_nanos.len() < other.layer_nanos.len() {
            self.layer_nanos.resize(other.layer_nanos.len(), 0);
        }
        for (a, b) in self.layer_nanos.iter_mut().zip(&other.layer_nanos) {
            *a += b;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DpResult {
    pub cost: CostFunction,
    pub optimal_value: CostValue,
    pub dp_table: DpTable,
    /// `None` when no plan exists (a cap below the optimal `C_max`, or a
    /// disconnected query without cross products).
    pub tree: Option<JoinTree>,
    pub stats: DpStats,
}

impl DpResult {
    /// Re-evaluates the cost function on the returned tree and compares it
    /// with `optimal_value`: exactly for integer costs, to `1e-9` relative
    /// for `C_smj`.
    pub fn verify(&self, q: &QueryInstance) -> Result<()> {
        let Some(tree) = &self.tree else {
            return if self.optimal_value.is_infinite() {
                Ok(())
            } else {
                Err(Error::CorruptTable(q.full_set()))
            };
        };
        let ok = match (self.cost, self.optimal_value) {
            (CostFunction::Out, CostValue::Integer(v)) => q.cost_out(tree)? == v,
            (CostFunction::Max, CostValue::Integer(v)) => q.cost_max(tree)? == v,
            (CostFunction::Smj, CostValue::Real(v)) => {
                let got = q.cost_smj(tree)?;
                (got - v).abs() <= 1e-9 * v.abs().max(1.0)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::CorruptTable(q.full_set()))
        }
    }
}
