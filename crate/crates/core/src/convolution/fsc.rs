//! Fast subset convolution in a ring: rank, zeta, ranked product, Möbius,
//! gather.

use super::transform::{mobius_in_place, zeta_in_place};
use super::{Ring, SetFunction};
use crate::error::{Error, Result};

/// Per-rank slices: slice `r` holds `(ζf)(·, r)`, the zeta transform of `f`
/// restricted to sets of cardinality exactly `r`. Slices are stored
/// rank-major so the ranked product is a linear scan.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedTable<R> {
    n: usize,
    slices: Vec<Vec<R>>,
}

impl<R: Ring> RankedTable<R> {
    /// `ranks` zero slices of length `2^n`.
    pub fn zeroed(n: usize, ranks: usize) -> Self {
        RankedTable {
            n,
            slices: (0..ranks).map(|_| vec![R::zero(); 1 << n]).collect(),
        }
    }

    /// Scatters `f` into `n + 1` rank slices without transforming them.
    pub fn rank(f: &SetFunction<R>) -> Self {
        let n = f.n();
        let mut table = Self::zeroed(n, n + 1);
        for (m, v) in f.values().iter().enumerate() {
            table.slices[m.count_ones() as usize][m] = v.clone();
        }
        table
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ranks(&self) -> usize {
        self.slices.len()
    }

    pub fn slice(&self, r: usize) -> &[R] {
        &self.slices[r]
    }

    pub fn slice_mut(&mut self, r: usize) -> &mut [R] {
        &mut self.slices[r]
    }

    pub(crate) fn slice_pair(&self, a: usize, b: usize) -> (&[R], &[R]) {
        (&self.slices[a], &self.slices[b])
    }

    /// Checks that slice `r` vanishes on every set smaller than `r`.
    pub fn has_rank_support(&self) -> bool {
        self.slices.iter().enumerate().all(|(r, slice)| {
            slice
                .iter()
                .enumerate()
                .all(|(m, v)| (m.count_ones() as usize) >= r || v.is_zero())
        })
    }

    fn zeta_slices(&mut self) -> Result<()> {
        for slice in &mut self.slices {
            zeta_in_place(slice)?;
        }
        debug_assert!(self.has_rank_support());
        Ok(())
    }
}

/// Ranks `f` and zeta-transforms every slice.
pub fn ranked_zeta<R: Ring>(f: &SetFunction<R>) -> Result<RankedTable<R>> {
    let mut t = RankedTable::rank(f);
    t.zeta_slices()?;
    Ok(t)
}

/// `(ζh)(S, r) = Σ_{d=0}^{r} (ζf)(S, d) (ζg)(S, r - d)`, skipping sets with
/// `|S| < max(d, r - d)` where one factor is zero by rank support.
pub fn ranked_product<R: Ring>(
    zf: &RankedTable<R>,
    zg: &RankedTable<R>,
    r: usize,
) -> Result<Vec<R>> {
    if zf.n != zg.n {
        return Err(Error::SizeMismatch {
            left: zf.n,
            right: zg.n,
        });
    }
    let mut out = vec![R::zero(); 1 << zf.n];
    for d in 0..=r.min(zf.ranks() - 1) {
        if r - d >= zg.ranks() {
            continue;
        }
        let floor = d.max(r - d);
        let (a, b) = (zf.slice(d), zg.slice(r - d));
        for (m, acc) in out.iter_mut().enumerate() {
            if (m.count_ones() as usize) < floor {
                continue;
            }
            acc.mul_acc(&a[m], &b[m], false)?;
        }
    }
    Ok(out)
}

/// Ranked product of `zf` with itself, iterating `d` only up to `r / 2` and
/// doubling the off-diagonal terms.
pub fn ranked_square<R: Ring>(zf: &RankedTable<R>, r: usize) -> Result<Vec<R>> {
    let mut out = vec![R::zero(); 1 << zf.n];
    for d in 0..=r / 2 {
        let e = r - d;
        if e >= zf.ranks() {
            continue;
        }
        let (a, b) = zf.slice_pair(d, e);
        for (m, acc) in out.iter_mut().enumerate() {
            if (m.count_ones() as usize) < e {
                continue;
            }
            acc.mul_acc(&a[m], &b[m], d != e)?;
        }
    }
    Ok(out)
}

/// Subset convolution `h(S) = Σ_{T ⊆ S} f(T) g(S \ T)` in `O(2^n n^2)` ring
/// operations. Agrees exactly with
/// [`naive_ring_convolution`](super::naive_ring_convolution).
pub fn fsc_ring<R: Ring>(f: &SetFunction<R>, g: &SetFunction<R>) -> Result<SetFunction<R>> {
    f.check_same_size(g)?;
    let n = f.n();
    let zf = ranked_zeta(f)?;
    let zg = ranked_zeta(g)?;
    let mut h: Vec<R> = vec![R::zero(); 1 << n];
    for r in 0..=n {
        let mut slice = ranked_product(&zf, &zg, r)?;
        mobius_in_place(&mut slice)?;
        for (m, v) in slice.into_iter().enumerate() {
            if m.count_ones() as usize == r {
                h[m] = v;
            }
        }
    }
    SetFunction::from_values(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::naive_ring_convolution;
    use crate::lattice::RelationSet;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Inputs consistent with the worked three-relation example: the zeta
    /// checkpoints at `111` are (ζf)(·,0..=2) = 1, 4, 4 and
    /// (ζg)(·,0..=2) = 0, 3, 1, with (ζf)(111, 2) = 3 + 1 and
    /// (ζg)(111, 1) built from g(010) and g(100) only.
    pub(crate) fn worked_example() -> (SetFunction<i64>, SetFunction<i64>) {
        let f = SetFunction::from_values(vec![1, 1, 2, 3, 1, 1, 0, 2]).unwrap();
        let g = SetFunction::from_values(vec![0, 0, 1, 1, 2, 0, 0, 1]).unwrap();
        (f, g)
    }

    #[test]
    fn worked_example_checkpoints() {
        let (f, g) = worked_example();
        let zf = ranked_zeta(&f).unwrap();
        let zg = ranked_zeta(&g).unwrap();
        let all = 0b111;
        assert_eq!(
            [zf.slice(0)[all], zf.slice(1)[all], zf.slice(2)[all]],
            [1, 4, 4]
        );
        assert_eq!(
            [zg.slice(0)[all], zg.slice(1)[all], zg.slice(2)[all]],
            [0, 3, 1]
        );
        let mut zh2 = ranked_product(&zf, &zg, 2).unwrap();
        // 1·1 + 4·3 + 4·0
        assert_eq!(zh2[all], 13);
        mobius_in_place(&mut zh2).unwrap();
        assert_eq!(zh2[all], 0);

        let h = fsc_ring(&f, &g).unwrap();
        assert_eq!(h, naive_ring_convolution(&f, &g).unwrap());
    }

    #[test]
    fn rank_support_holds() {
        let f = SetFunction::from_fn(5, |s| s.bits() as i64 + 1);
        let raw = RankedTable::rank(&f);
        assert!(raw.has_rank_support());
        let z = ranked_zeta(&f).unwrap();
        assert!(z.has_rank_support());
        let mut broken = z.clone();
        broken.slice_mut(3)[0b11] = 1;
        assert!(!broken.has_rank_support());
    }

    #[test]
    fn identity_convolution() {
        let delta = SetFunction::from_fn(4, |s| i64::from(s == RelationSet::EMPTY));
        let f = SetFunction::from_fn(4, |s| (s.bits() * 3 % 7) as i64);
        assert_eq!(fsc_ring(&delta, &f).unwrap(), f);
    }

    #[test]
    fn random_instances_match_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 0..=8 {
            for _ in 0..5 {
                let f = SetFunction::from_fn(n, |_| rng.gen_range(0..=9i64));
                let g = SetFunction::from_fn(n, |_| rng.gen_range(0..=9i64));
                assert_eq!(
                    fsc_ring(&f, &g).unwrap(),
                    naive_ring_convolution(&f, &g).unwrap()
                );
            }
        }
    }

    proptest! {
        #[test]
        fn halved_square_equals_full_product(n in 1usize..=8, seed in any::<u64>(), r in 0usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = SetFunction::from_fn(n, |_| rng.gen_range(-50..=50i64));
            let z = ranked_zeta(&f).unwrap();
            let r = r.min(n);
            prop_assert_eq!(ranked_square(&z, r).unwrap(), ranked_product(&z, &z, r).unwrap());
        }
    }
}
