//! Instance generation, timed optimizer runs, CSV reports and the
//! theoretical operation-count table.

mod generator;
mod ops;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub use generator::{generate_clique, DEFAULT_MAX_CARDINALITY};
pub use ops::{theoretical_ops_table, OpsRow};

use crate::costmodel::{JoinTree, QueryInstance};
use crate::error::{Error, Result};
use crate::lattice::MAX_RELATIONS;
use crate::optimize::{
    dpconv_max, dpconv_out_embedding, dpsub, optimize_ccap, optimize_ccap_naive, CcapResult,
    CostFunction, CostValue, DpResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    DpsubOut,
    DpsubMax,
    DpsubSmj,
    DpconvMax,
    DpconvOut,
    CcapNaive,
    CcapFast,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::DpsubOut,
        Algorithm::DpsubMax,
        Algorithm::DpsubSmj,
        Algorithm::DpconvMax,
        Algorithm::DpconvOut,
        Algorithm::CcapNaive,
        Algorithm::CcapFast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::DpsubOut => "dpsub-out",
            Algorithm::DpsubMax => "dpsub-max",
            Algorithm::DpsubSmj => "dpsub-smj",
            Algorithm::DpconvMax => "dpconv-max",
            Algorithm::DpconvOut => "dpconv-out",
            Algorithm::CcapNaive => "ccap-naive",
            Algorithm::CcapFast => "ccap-fast",
        }
    }

    /// The subset-DP cost function, for the algorithms that accept a cap.
    pub fn dpsub_cost(self) -> Option<CostFunction> {
        match self {
            Algorithm::DpsubOut => Some(CostFunction::Out),
            Algorithm::DpsubMax => Some(CostFunction::Max),
            Algorithm::DpsubSmj => Some(CostFunction::Smj),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown algorithm {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Result of one timed optimizer call.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub algorithm: Algorithm,
    pub cost: CostValue,
    /// Optimal `C_max` found by the first pass of the capped algorithms.
    pub gamma: Option<u64>,
    pub tree: Option<JoinTree>,
    pub elapsed_ns: u64,
    pub splits: u64,
    pub multiplications: u64,
}

impl RunOutcome {
    fn from_dp(algorithm: Algorithm, r: DpResult, elapsed_ns: u64) -> Self {
        RunOutcome {
            algorithm,
            cost: r.optimal_value,
            gamma: None,
            tree: r.tree,
            elapsed_ns,
            splits: r.stats.splits,
            multiplications: r.stats.multiplications,
        }
    }

    fn from_ccap(algorithm: Algorithm, r: CcapResult, elapsed_ns: u64) -> Self {
        let stats = r.total_stats();
        RunOutcome {
            algorithm,
            cost: r.capped_out.optimal_value,
            gamma: r.gamma_star.value(),
            tree: r.capped_out.tree,
            elapsed_ns,
            splits: stats.splits,
            multiplications: stats.multiplications,
        }
    }

    /// `cost` as a CSV cell: an integer, a real, or `inf`.
    pub fn cost_cell(&self) -> String {
        match self.cost {
            CostValue::Integer(c) => c.to_string(),
            CostValue::Real(x) if x.is_infinite() => "inf".into(),
            CostValue::Real(x) => format!("{x}"),
        }
    }

    /// The result document written by `joinconv optimize`. Infinite costs
    /// (no plan) are `null`.
    pub fn to_json(&self, names: &[String]) -> Value {
        let cost = match self.cost {
            CostValue::Integer(c) => c.value().map_or(Value::Null, Value::from),
            CostValue::Real(x) if x.is_finite() => Value::from(x),
            CostValue::Real(_) => Value::Null,
        };
        json!({
            "algorithm": self.algorithm.name(),
            "cost": cost,
            "gamma": self.gamma,
            "join_tree": self.tree.as_ref().map(|t| t.to_json(names)),
            "elapsed_ns": self.elapsed_ns,
            "stats": { "splits": self.splits, "mults": self.multiplications },
        })
    }
}

/// Runs `algorithm` on `q`, timing the optimizer call including tree
/// extraction. `cap` applies to the `dpsub-*` algorithms only.
pub fn run_algorithm(
    q: &QueryInstance,
    algorithm: Algorithm,
    cap: Option<u64>,
) -> Result<RunOutcome> {
    if cap.is_some() && algorithm.dpsub_cost().is_none() {
        return Err(Error::InvalidArgument(format!(
            "a cap applies only to the dpsub algorithms, not {algorithm}"
        )));
    }
    let started = Instant::now();
    let outcome = match algorithm {
        Algorithm::DpsubOut | Algorithm::DpsubMax | Algorithm::DpsubSmj => {
            let r = dpsub(q, algorithm.dpsub_cost().unwrap(), cap)?;
            RunOutcome::from_dp(algorithm, r, elapsed(started))
        }
        Algorithm::DpconvMax => RunOutcome::from_dp(algorithm, dpconv_max(q)?, elapsed(started)),
        Algorithm::DpconvOut => {
            RunOutcome::from_dp(algorithm, dpconv_out_embedding(q)?, elapsed(started))
        }
        Algorithm::CcapNaive => {
            RunOutcome::from_ccap(algorithm, optimize_ccap_naive(q)?, elapsed(started))
        }
        Algorithm::CcapFast => {
            RunOutcome::from_ccap(algorithm, optimize_ccap(q)?, elapsed(started))
        }
    };
    Ok(outcome)
}

fn elapsed(started: Instant) -> u64 {
    started.elapsed().as_nanos() as u64
}

/// Re-evaluates the outcome's tree against its reported cost.
pub fn check_outcome(q: &QueryInstance, o: &RunOutcome) -> std::result::Result<(), String> {
    let Some(tree) = &o.tree else {
        return if o.cost.is_infinite() {
            Ok(())
        } else {
            Err(format!(
                "{} reported cost {} without a tree",
                o.algorithm, o.cost
            ))
        };
    };
    let recomputed = match o.algorithm {
        Algorithm::DpsubMax | Algorithm::DpconvMax => {
            CostValue::Integer(q.cost_max(tree).map_err(|e| e.to_string())?)
        }
        Algorithm::DpsubSmj => CostValue::Real(q.cost_smj(tree).map_err(|e| e.to_string())?),
        _ => CostValue::Integer(q.cost_out(tree).map_err(|e| e.to_string())?),
    };
    let ok = match (recomputed, o.cost) {
        (CostValue::Real(a), CostValue::Real(b)) => (a - b).abs() <= 1e-9 * b.abs().max(1.0),
        (a, b) => a == b,
    };
    if !ok {
        return Err(format!(
            "{} tree re-evaluates to {recomputed}, reported {}",
            o.algorithm, o.cost
        ));
    }
    if let Some(gamma) = o.gamma {
        let m = q.cost_max(tree).map_err(|e| e.to_string())?;
        if m.value() != Some(gamma) {
            return Err(format!("{} tree has C_max {m}, gamma {gamma}", o.algorithm));
        }
    }
    Ok(())
}

/// Pairs whose values must agree on the same instance.
const ORACLE_PAIRS: [(Algorithm, Algorithm); 3] = [
    (Algorithm::DpconvMax, Algorithm::DpsubMax),
    (Algorithm::DpconvOut, Algorithm::DpsubOut),
    (Algorithm::CcapFast, Algorithm::CcapNaive),
];

/// Cross-checks the outcomes of one instance.
pub fn cross_check(q: &QueryInstance, outcomes: &[RunOutcome]) -> std::result::Result<(), String> {
    for o in outcomes {
        check_outcome(q, o)?;
    }
    let find = |a: Algorithm| outcomes.iter().find(|o| o.algorithm == a);
    for (a, b) in ORACLE_PAIRS {
        if let (Some(x), Some(y)) = (find(a), find(b)) {
            if x.cost != y.cost || x.gamma != y.gamma {
                return Err(format!(
                    "{a} found {} (gamma {:?}) but {b} found {} (gamma {:?})",
                    x.cost, x.gamma, y.cost, y.gamma
                ));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub sizes: RangeInclusive<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub max_cardinality: u64,
    pub output: Option<PathBuf>,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument(
                "repetitions must be at least 1".into(),
            ));
        }
        let (lo, hi) = (*self.sizes.start(), *self.sizes.end());
        if lo < 2 || hi > MAX_RELATIONS || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "sizes {lo}..{hi} must lie within 2..{MAX_RELATIONS}"
            )));
        }
        if self.max_cardinality == 0 {
            return Err(Error::InvalidArgument(
                "max cardinality must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Seed of the instance for `(n, rep)` under a sweep seed.
pub fn instance_seed(seed: u64, n: usize, rep: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | rep as u64);
    rng.next_u64()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub rep: usize,
    pub outcome: RunOutcome,
}

pub const CSV_HEADER: [&str; 7] = [
    "n",
    "rep",
    "algorithm",
    "cost_value",
    "elapsed_ns",
    "splits_enumerated",
    "ring_multiplications",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub algorithm: Algorithm,
    pub mean_ns: f64,
    pub median_ns: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for r in &self.rows {
            let o = &r.outcome;
            out.write_record([
                r.n.to_string(),
                r.rep.to_string(),
                o.algorithm.name().to_string(),
                o.cost_cell(),
                o.elapsed_ns.to_string(),
                o.splits.to_string(),
                o.multiplications.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Mean and median time per `(n, algorithm)`.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut groups: BTreeMap<(usize, Algorithm), Vec<u64>> = BTreeMap::new();
        for r in &self.rows {
            groups
                .entry((r.n, r.outcome.algorithm))
                .or_default()
                .push(r.outcome.elapsed_ns);
        }
        groups
            .into_iter()
            .map(|((n, algorithm), mut t)| {
                t.sort_unstable();
                let mean = t.iter().map(|&v| v as f64).sum::<f64>() / t.len() as f64;
                let mid = t.len() / 2;
                let median = if t.len() % 2 == 1 {
                    t[mid] as f64
                } else {
                    (t[mid - 1] as f64 + t[mid] as f64) / 2.0
                };
                SummaryRow {
                    n,
                    algorithm,
                    mean_ns: mean,
                    median_ns: median,
                }
            })
            .collect()
    }
}

/// Runs the sweep serially. Each `(n, rep)` instance is generated from
/// [`instance_seed`], every algorithm runs on it, and the outcomes are cross
/// checked before any row is emitted; a disagreement aborts with
/// [`Error::OracleDisagreement`]. The CSV is written to `cfg.output` when
/// set.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    run_benchmark_with(cfg, |_| {})
}

/// As [`run_benchmark`], calling `on_row` as rows are produced.
pub fn run_benchmark_with(
    cfg: &BenchConfig,
    mut on_row: impl FnMut(&BenchRow),
) -> Result<BenchReport> {
    cfg.validate()?;
    let mut report = BenchReport::default();
    if !cfg.algorithms.is_empty() {
        for n in cfg.sizes.clone() {
            for rep in 0..cfg.repetitions {
                let q = generate_clique(n, instance_seed(cfg.seed, n, rep), cfg.max_cardinality)?;
                let mut outcomes = Vec::with_capacity(cfg.algorithms.len());
                for &a in &cfg.algorithms {
                    outcomes.push(run_algorithm(&q, a, None)?);
                }
                cross_check(&q, &outcomes).map_err(|detail| Error::OracleDisagreement {
                    seed: cfg.seed,
                    n,
                    rep,
                    detail,
                })?;
                for outcome in outcomes {
                    let row = BenchRow { n, rep, outcome };
                    on_row(&row);
                    report.rows.push(row);
                }
            }
        }
    }
    if let Some(path) = &cfg.output {
        report.write_csv(std::fs::File::create(path)?)?;
    }
    Ok(report)
}
