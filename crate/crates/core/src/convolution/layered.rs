//! Layer-by-layer dynamic programming over the subset lattice with cached
//! zeta slices.
//!
//! The table being optimized is convolved with itself once per layer `k`.
//! Layers below `k` are final, so their ranked zeta slices are computed once
//! and reused; only `(ζh)(·, k)` is formed, using the symmetric half of the
//! ranked product and skipping sets outside `max(d, k - d) <= |S| <= k`.

use std::time::Instant;

use super::fsc::RankedTable;
use super::transform::{block_bits, high_phase, low_phase, Butterfly, RankWindow};
use super::{Ring, SetFunction};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_proper_subsets, sets_of_cardinality, RelationSet};

/// Layers up to this size are evaluated by direct split enumeration when
/// [`LayeredConfig::small_layer_fast_path`] is set.
pub const SMALL_LAYER_LIMIT: usize = 6;

/// Masks are handled in aligned chunks of `2^CHUNK_BITS`; a chunk is skipped
/// for a rank pair when none of its masks can fall inside the band.
const CHUNK_BITS: usize = 6;

/// Bit `i` of `RANK_MASKS[r]` is set iff `i` has popcount `r`, for `i < 64`.
const RANK_MASKS: [u64; 7] = {
    let mut masks = [0u64; 7];
    let mut i = 0;
    while i < 64 {
        masks[(i as u64).count_ones() as usize] |= 1 << i;
        i += 1;
    }
    masks
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LayeredConfig {
    pub small_layer_fast_path: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LayerStats {
    /// Ring multiplications in ranked products (plus direct splits on the
    /// fast path).
    pub multiplications: u64,
    /// Wall time per layer, indexed by layer; accumulates across resets.
    pub layer_nanos: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct LayeredDpState<R> {
    n: usize,
    dp: SetFunction<R>,
    zeta_cache: RankedTable<R>,
    current_layer: usize,
    scratch: Vec<R>,
    config: LayeredConfig,
    stats: LayerStats,
}

impl<R: Ring> LayeredDpState<R> {
    /// Starts a run from `base`, of which only `∅` and the singletons are
    /// read. `base[∅]` must be the ring zero: splits never use the empty side.
    pub fn new(base: &SetFunction<R>) -> Result<Self> {
        Self::with_config(base, LayeredConfig::default())
    }

    pub fn with_config(base: &SetFunction<R>, config: LayeredConfig) -> Result<Self> {
        let n = base.n();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "layered DP needs at least one relation".into(),
            ));
        }
        let mut state = LayeredDpState {
            n,
            dp: SetFunction::filled(n, R::zero()),
            zeta_cache: RankedTable::zeroed(n, n),
            current_layer: 0,
            scratch: vec![R::zero(); 1 << n],
            config,
            stats: LayerStats {
                multiplications: 0,
                layer_nanos: vec![0; n + 1],
            },
        };
        state.reset(base)?;
        Ok(state)
    }

    /// Reinitializes for a new base, reusing every allocation.
    pub fn reset(&mut self, base: &SetFunction<R>) -> Result<()> {
        base.check_same_size(&self.dp)?;
        if !base[RelationSet::EMPTY].is_zero() {
            return Err(Error::InvalidArgument(
                "layered DP base must be zero on the empty set".into(),
            ));
        }
        for v in self.dp.values_mut() {
            *v = R::zero();
        }
        for i in 0..self.n {
            let s = RelationSet::singleton(i);
            self.dp[s] = base[s].clone();
        }
        // slice 0 is ζ of the zero function
        for v in self.zeta_cache.slice_mut(0) {
            *v = R::zero();
        }
        self.current_layer = 1;
        if self.n > 1 {
            self.refresh_slice(1)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn current_layer(&self) -> usize {
        self.current_layer
    }

    pub fn is_complete(&self) -> bool {
        self.current_layer == self.n
    }

    pub fn dp(&self) -> &SetFunction<R> {
        &self.dp
    }

    pub fn into_dp(self) -> SetFunction<R> {
        self.dp
    }

    /// The cached slices; slice `r` is valid for `r < current_layer`.
    pub fn zeta_cache(&self) -> &RankedTable<R> {
        &self.zeta_cache
    }

    pub fn stats(&self) -> &LayerStats {
        &self.stats
    }

    /// Optimizes layer `k = current_layer + 1`: forms the rank-`k` slice of
    /// the table's self-convolution and stores `post_update(S, value)` for
    /// every `|S| = k`.
    pub fn advance<F>(&mut self, mut post_update: F) -> Result<()>
    where
        F: FnMut(RelationSet, R) -> Result<R>,
    {
        if self.is_complete() {
            return Err(Error::InvalidArgument(format!(
                "all {} layers already computed",
                self.n
            )));
        }
        let started = Instant::now();
        let k = self.current_layer + 1;
        let n = self.n;

        if self.config.small_layer_fast_path && k <= SMALL_LAYER_LIMIT {
            for s in sets_of_cardinality(n, k) {
                let mut acc = R::zero();
                for t in enumerate_proper_subsets(s) {
                    acc.mul_acc(&self.dp[t], &self.dp[s.minus(t)], false)?;
                }
                self.stats.multiplications += (1u64 << k) - 2;
                self.dp[s] = post_update(s, acc)?;
            }
        } else {
            self.square_layer(k)?;
            if k == n {
                let full = RelationSet::full(n);
                let value = self.point_mobius(full)?;
                self.dp[full] = post_update(full, value)?;
            } else {
                for s in sets_of_cardinality(n, k) {
                    let v = std::mem::replace(&mut self.scratch[s.index()], R::zero());
                    self.dp[s] = post_update(s, v)?;
                }
            }
        }
        if k < n {
            self.refresh_slice(k)?;
        }
        self.current_layer = k;
        self.stats.layer_nanos[k] += started.elapsed().as_nanos() as u64;
        Ok(())
    }

    /// Runs every remaining layer with the same update.
    pub fn run<F>(&mut self, mut post_update: F) -> Result<()>
    where
        F: FnMut(RelationSet, R) -> Result<R>,
    {
        while !self.is_complete() {
            self.advance(&mut post_update)?;
        }
        Ok(())
    }

    /// `scratch <- (ζh)(·, k)` on every mask with `|S| <= k` whose chunk
    /// intersects the band; other masks are zero or unspecified. Unless this
    /// is the last layer, each block then gets the low phase of the Möbius
    /// transform while it is still in cache.
    fn square_layer(&mut self, k: usize) -> Result<()> {
        let n = self.n;
        let b = block_bits(n);
        let chunk_bits = b.min(CHUNK_BITS);
        let chunk = 1usize << chunk_bits;
        // ranked products vanish below rank ceil(k / 2)
        let window = RankWindow {
            max_rank: k,
            min_support: k.div_ceil(2),
        };
        let mut mults = 0u64;
        for (bi, block) in self.scratch.chunks_mut(1 << b).enumerate() {
            let block_base = bi << b;
            if block_base.count_ones() as usize > k {
                continue;
            }
            for (ci, acc) in block.chunks_mut(chunk).enumerate() {
                let base = block_base + ci * chunk;
                let high = base.count_ones() as usize;
                if high > k {
                    continue;
                }
                for v in acc.iter_mut() {
                    *v = R::zero();
                }
                for d in 1..=k / 2 {
                    let e = k - d;
                    if high + chunk_bits < e {
                        continue;
                    }
                    let (a, b) = self.zeta_cache.slice_pair(d, e);
                    let (a, b) = (&a[base..base + chunk], &b[base..base + chunk]);
                    let doubled = d != e;
                    if R::CHEAP {
                        R::mul_acc_slice(acc, a, b, doubled)?;
                        mults += chunk as u64;
                    } else {
                        for (i, ((x, y), z)) in acc.iter_mut().zip(a).zip(b).enumerate() {
                            let rank = (base + i).count_ones() as usize;
                            if rank < e || rank > k {
                                continue;
                            }
                            x.mul_acc(y, z, doubled)?;
                            mults += 1;
                        }
                    }
                }
            }
            if k < n {
                low_phase(block, block_base, window, Butterfly::Sub)?;
            }
        }
        if k < n {
            high_phase(&mut self.scratch, b, window, Butterfly::Sub)?;
        }
        self.stats.multiplications += mults;
        Ok(())
    }

    /// Möbius inversion of `scratch` evaluated at `s` alone.
    fn point_mobius(&self, s: RelationSet) -> Result<R> {
        let (mut even, mut odd) = (R::zero(), R::zero());
        let mut t = s.bits();
        loop {
            let v = &self.scratch[t as usize];
            if (s.bits() ^ t).count_ones().is_multiple_of(2) {
                even.add_assign(v)?;
            } else {
                odd.add_assign(v)?;
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & s.bits();
        }
        even.sub_assign(&odd)?;
        Ok(even)
    }

    /// Recomputes cached slice `r` from the finalized layer `r` of the table.
    fn refresh_slice(&mut self, r: usize) -> Result<()> {
        let b = block_bits(self.n);
        let window = RankWindow {
            max_rank: usize::MAX,
            min_support: r,
        };
        let slice = self.zeta_cache.slice_mut(r);
        let src = self.dp.values();
        for (bi, block) in slice.chunks_mut(1 << b).enumerate() {
            let base = bi << b;
            let chunk = block.len().min(64);
            for (ci, (dst, v)) in block
                .chunks_mut(chunk)
                .zip(src[base..].chunks(chunk))
                .enumerate()
            {
                let high = (base + ci * chunk).count_ones() as usize;
                match r.checked_sub(high) {
                    Some(want) if want <= chunk.trailing_zeros() as usize => {
                        let keep = RANK_MASKS[want];
                        for (i, (d, x)) in dst.iter_mut().zip(v).enumerate() {
                            *d = if keep >> i & 1 == 1 {
                                x.clone()
                            } else {
                                R::zero()
                            };
                        }
                    }
                    _ => dst.iter_mut().for_each(|d| *d = R::zero()),
                }
            }
            low_phase(block, base, window, Butterfly::Add)?;
        }
        high_phase(slice, b, window, Butterfly::Add)?;
        Ok(())
    }
}
