use num_bigint::BigUint;
use num_traits::One;

/// One row of the operation-count comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct OpsRow {
    pub n: u32,
    pub epsilon: f64,
    /// `3^n`.
    pub exact_ops: BigUint,
    /// `2^{3n/2} / sqrt(epsilon)`.
    pub approx_ops: f64,
    /// Whether `approx_ops < exact_ops`, decided in exact integer
    /// arithmetic on the binary value of `epsilon`.
    pub approx_below_exact: bool,
}

/// Closed-form operation counts of the exact `O(3^n)` DP and the
/// `(1 + ε)`-approximation, `2^{3n/2} / sqrt(ε)`, without polylog factors.
pub fn theoretical_ops_table(n: u32, epsilons: &[f64]) -> Vec<OpsRow> {
    epsilons
        .iter()
        .map(|&eps| OpsRow {
            n,
            epsilon: eps,
            exact_ops: BigUint::from(3u32).pow(n),
            approx_ops: (1.5 * n as f64).exp2() / eps.sqrt(),
            approx_below_exact: approx_below_exact(n, eps),
        })
        .collect()
}

/// `2^{3n/2} / sqrt(eps) < 3^n` iff `2^{3n} < 9^n * eps`. With
/// `eps = m * 2^e` this is `2^{3n} * 2^{-e} < 9^n * m` in integers.
fn approx_below_exact(n: u32, eps: f64) -> bool {
    assert!(eps.is_finite() && eps > 0.0, "epsilon must be positive");
    let (m, e) = decompose(eps);
    let nine = BigUint::from(9u32).pow(n) * m;
    let shift = 3 * n as i64 - e;
    if shift >= 0 {
        (BigUint::one() << shift as u64) < nine
    } else {
        BigUint::one() < (nine << (-shift) as u64)
    }
}

/// `x = m * 2^e` exactly, for finite positive `x`.
fn decompose(x: f64) -> (u64, i64) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp - 1075)
    }
}
