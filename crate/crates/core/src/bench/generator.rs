use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convolution::SetFunction;
use crate::costmodel::QueryInstance;
use crate::error::{Error, Result};
use crate::lattice::MAX_RELATIONS;

pub const DEFAULT_MAX_CARDINALITY: u64 = 100_000_000;

/// A random clique query with submultiplicative cardinalities.
///
/// Base sizes are uniform in `[1, max_card]`. Every larger set draws
/// `c(S)` uniformly from `[1, min(max_card, min c(S1) c(S2))]` over its
/// unordered partitions. Each set samples from its own ChaCha8 stream
/// (indexed by its bitmask), so the output depends only on the arguments.
pub fn generate_clique(n: usize, seed: u64, max_card: u64) -> Result<QueryInstance> {
    if !(2..=MAX_RELATIONS).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "clique size {n} outside 2..={MAX_RELATIONS}"
        )));
    }
    if max_card == 0 {
        return Err(Error::InvalidArgument(
            "max cardinality must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![0u64; 1 << n];
    for s in 1..(1u32 << n) {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut bound = max_card;
        if rest != 0 {
            // partitions (low ∪ sub, rest \ sub) for every proper sub ⊂ rest
            let mut sub = rest;
            loop {
                sub = (sub - 1) & rest;
                let p = c[(low | sub) as usize].saturating_mul(c[(rest ^ sub) as usize]);
                bound = bound.min(p);
                if sub == 0 || bound == 1 {
                    break;
                }
            }
        }
        rng.set_stream(s as u64);
        rng.set_word_pos(0);
        c[s as usize] = rng.gen_range(1..=bound);
    }
    let names = (1..=n).map(|i| format!("R{i}")).collect();
    QueryInstance::clique(names, SetFunction::from_values(c)?)
}
