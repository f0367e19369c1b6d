//! Zeta and Möbius transforms (Yates' algorithm), cache-blocked.
//!
//! Bits below `BLOCK_BITS` are processed one contiguous block at a time; the
//! remaining high bits are processed per column group, so a full transform
//! streams the table through memory twice instead of once per bit. The two
//! phases are exposed to the layered engine so it can run the low phase on a
//! block while the block is still in cache.

use super::{Ring, SetFunction};
use crate::error::Result;

pub(crate) const BLOCK_BITS: usize = 12;
const COLUMN_WIDTH: usize = 1024;

/// Rank window of a transform.
///
/// Masks of popcount above `max_rank` may hold garbage afterwards: values at
/// lower masks depend only on their subsets, so they are unaffected. Masks
/// of popcount below `min_support` must be zero on input; work that would
/// only move those zeros is skipped.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RankWindow {
    pub max_rank: usize,
    pub min_support: usize,
}

impl RankWindow {
    pub const FULL: RankWindow = RankWindow {
        max_rank: usize::MAX,
        min_support: 0,
    };
}

/// Block size for a table over `n` bits.
pub(crate) fn block_bits(n: usize) -> usize {
    n.min(BLOCK_BITS)
}

/// Butterflies `hi = op(hi, lo)` over bits `0..b` of the block starting
/// at mask `base`.
#[inline]
pub(crate) fn low_phase<R: Ring>(
    chunk: &mut [R],
    base: usize,
    w: RankWindow,
    op: Butterfly,
) -> Result<()> {
    let b = chunk.len().trailing_zeros() as usize;
    let high = base.count_ones() as usize;
    if high > w.max_rank || high + b < w.min_support {
        return Ok(());
    }
    // Cheap elements run whole rows; the rank test would cost more than the
    // arithmetic it saves.
    let per_element = !R::CHEAP && high + b > w.max_rank;
    let mut first = 0;
    if !per_element && b >= 3 {
        // bits 0..3 act within aligned groups of eight
        for g in chunk.chunks_exact_mut(8) {
            for (h, l) in [
                (1, 0),
                (3, 2),
                (5, 4),
                (7, 6),
                (2, 0),
                (3, 1),
                (6, 4),
                (7, 5),
            ] {
                let (lo, hi) = g.split_at_mut(h);
                op.apply(&mut hi[0], &lo[l])?;
            }
            let (lo, hi) = g.split_at_mut(4);
            op.apply_slice(hi, lo)?;
        }
        first = 3;
    }
    for j in first..b {
        let half = 1usize << j;
        for (pi, pair) in chunk.chunks_mut(2 * half).enumerate() {
            let (lo, hi) = pair.split_at_mut(half);
            butterflies(
                hi,
                lo,
                base + pi * 2 * half + half,
                per_element,
                w.max_rank,
                op,
            )?;
        }
    }
    Ok(())
}

/// `hi[i] = op(hi[i], lo[i])`, skipping masks `hi_start + i` above
/// `max_rank` when `per_element` is set.
#[inline(always)]
fn butterflies<R: Ring>(
    hi: &mut [R],
    lo: &[R],
    hi_start: usize,
    per_element: bool,
    max_rank: usize,
    op: Butterfly,
) -> Result<()> {
    if per_element {
        for (i, (h, l)) in hi.iter_mut().zip(lo).enumerate() {
            if (hi_start + i).count_ones() as usize <= max_rank {
                op.apply(h, l)?;
            }
        }
        Ok(())
    } else {
        op.apply_slice(hi, lo)
    }
}

/// Butterflies over bits `b..n` of the whole table, where `b` is the block
/// size used by [`low_phase`].
pub(crate) fn high_phase<R: Ring>(
    a: &mut [R],
    b: usize,
    w: RankWindow,
    op: Butterfly,
) -> Result<()> {
    let n = a.len().trailing_zeros() as usize;
    if n <= b {
        return Ok(());
    }
    let block = 1usize << b;
    let rows = 1usize << (n - b);
    let width = COLUMN_WIDTH.min(block);
    for col in (0..block).step_by(width) {
        for j in 0..n - b {
            let rbit = 1usize << j;
            for r in (0..rows).filter(|r| r & rbit == 0) {
                let lo_rank = r.count_ones() as usize;
                let hi_rank = lo_rank + 1;
                if hi_rank > w.max_rank || lo_rank + b < w.min_support {
                    continue;
                }
                let lo_start = r * block + col;
                let hi_start = (r | rbit) * block + col;
                let (head, tail) = a.split_at_mut(hi_start);
                let lo = &head[lo_start..lo_start + width];
                let hi = &mut tail[..width];
                let per_element = !R::CHEAP && hi_rank + b > w.max_rank;
                butterflies(hi, lo, hi_start, per_element, w.max_rank, op)?;
            }
        }
    }
    Ok(())
}

fn yates<R: Ring>(a: &mut [R], w: RankWindow, op: Butterfly) -> Result<()> {
    debug_assert!(a.len().is_power_of_two());
    let b = block_bits(a.len().trailing_zeros() as usize);
    for (bi, chunk) in a.chunks_mut(1 << b).enumerate() {
        low_phase(chunk, bi << b, w, op)?;
    }
    high_phase(a, b, w, op)
}

/// Butterfly `hi = hi ± lo`.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Butterfly {
    Add,
    Sub,
}

impl Butterfly {
    #[inline(always)]
    fn apply<R: Ring>(self, h: &mut R, l: &R) -> Result<()> {
        match self {
            Butterfly::Add => h.add_assign(l),
            Butterfly::Sub => h.sub_assign(l),
        }
    }

    #[inline(always)]
    fn apply_slice<R: Ring>(self, hi: &mut [R], lo: &[R]) -> Result<()> {
        match self {
            Butterfly::Add => R::add_slice(hi, lo),
            Butterfly::Sub => R::sub_slice(hi, lo),
        }
    }
}

/// `a[S] <- Σ_{T ⊆ S} a[T]`.
pub fn zeta_in_place<R: Ring>(a: &mut [R]) -> Result<()> {
    yates(a, RankWindow::FULL, Butterfly::Add)
}

/// `a[S] <- Σ_{T ⊆ S} (-1)^{|S \ T|} a[T]`, the inverse of [`zeta_in_place`].
pub fn mobius_in_place<R: Ring>(a: &mut [R]) -> Result<()> {
    yates(a, RankWindow::FULL, Butterfly::Sub)
}

/// Möbius transform valid on masks of popcount `<= max_rank`; entries above
/// the limit are unspecified afterwards.
pub fn mobius_in_place_upto<R: Ring>(a: &mut [R], max_rank: usize) -> Result<()> {
    let w = RankWindow {
        max_rank,
        min_support: 0,
    };
    yates(a, w, Butterfly::Sub)
}

/// `(ζf)(S) = Σ_{T ⊆ S} f(T)` in `O(2^n n)` additions.
pub fn zeta_transform<R: Ring>(f: &SetFunction<R>) -> Result<SetFunction<R>> {
    let mut out = f.clone();
    zeta_in_place(out.values_mut())?;
    Ok(out)
}

/// `(μf)(S) = Σ_{T ⊆ S} (-1)^{|S \ T|} f(T)`.
pub fn mobius_transform<R: Ring>(f: &SetFunction<R>) -> Result<SetFunction<R>> {
    let mut out = f.clone();
    mobius_in_place(out.values_mut())?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn zeta_oracle(f: &[i64]) -> Vec<i64> {
        (0..f.len())
            .map(|s| (0..f.len()).filter(|t| t & !s == 0).map(|t| f[t]).sum())
            .collect()
    }

    #[test]
    fn zeta_examples() {
        let f = SetFunction::from_values(vec![1i64, 2, 3, 4]).unwrap();
        let z = zeta_transform(&f).unwrap();
        assert_eq!(z.values(), zeta_oracle(f.values()).as_slice());
        assert_eq!(z.values(), &[1, 3, 4, 10]);

        let zeros = SetFunction::filled(4, 0i64);
        assert_eq!(zeta_transform(&zeros).unwrap(), zeros);

        let empty_indicator = SetFunction::from_fn(4, |s| i64::from(s.is_empty()));
        assert!(zeta_transform(&empty_indicator)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 1));
    }

    #[test]
    fn mobius_examples() {
        let f = SetFunction::from_values(vec![1i64, 3, 4, 10]).unwrap();
        assert_eq!(mobius_transform(&f).unwrap().values(), &[1, 2, 3, 4]);
        let zeros = SetFunction::filled(3, 0i64);
        assert_eq!(mobius_transform(&zeros).unwrap(), zeros);
    }

    #[test]
    fn blocked_path_matches_oracle_above_block_size() {
        // n = 14 exercises the column-group phase
        let n = 14;
        let f = SetFunction::from_fn(n, |s| (s.bits() as i64 * 7919) % 13 - 6);
        let z = zeta_transform(&f).unwrap();
        for s in [0usize, 1, 4095, 4096, 12345, (1 << n) - 1] {
            let want: i64 = (0..1 << n)
                .filter(|t| t & !s == 0)
                .map(|t| f.values()[t])
                .sum();
            assert_eq!(z.values()[s], want, "S = {s:#b}");
        }
        assert_eq!(mobius_transform(&z).unwrap(), f);
    }

    #[test]
    fn overflow_is_reported() {
        let f = SetFunction::filled(2, i64::MAX);
        assert!(matches!(zeta_transform(&f), Err(Error::Overflow(_))));
    }

    #[test]
    fn limited_mobius_is_exact_up_to_rank() {
        let n = 6;
        let f = SetFunction::from_fn(n, |s| BigInt::from(s.bits() % 5));
        let mut z = zeta_transform(&f).unwrap().into_values();
        // poison the masks above rank 3; they must not leak downwards
        for (m, v) in z.iter_mut().enumerate() {
            if m.count_ones() > 3 {
                *v = BigInt::from(999);
            }
        }
        mobius_in_place_upto(&mut z, 3).unwrap();
        for (m, v) in z.iter().enumerate().filter(|(m, _)| m.count_ones() <= 3) {
            assert_eq!(v, &f.values()[m]);
        }
    }

    proptest! {
        #[test]
        fn mobius_inverts_zeta(n in 0usize..=10, seed in any::<u64>()) {
            let f = SetFunction::from_fn(n, |s| {
                ((s.bits() as u64 ^ seed).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40) as i64 - 8_000_000
            });
            let back = mobius_transform(&zeta_transform(&f).unwrap()).unwrap();
            prop_assert_eq!(&back, &f);
            let z = zeta_transform(&f).unwrap();
            let expect = zeta_oracle(f.values());
            prop_assert_eq!(z.values(), expect.as_slice());
        }
    }
}
