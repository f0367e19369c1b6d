//! Subset transforms and subset convolutions.
//!
//! Everything here operates on [`SetFunction`]s: dense tables with one value
//! per subset of an `n`-element ground set, indexed by bitmask.

mod domain;
mod fsc;
mod layered;
mod naive;
mod transform;

use std::ops::{Index, IndexMut};

pub use domain::{ExtCost, Ring};
pub use fsc::{fsc_ring, ranked_product, ranked_square, ranked_zeta, RankedTable};
pub use layered::{LayerStats, LayeredConfig, LayeredDpState, SMALL_LAYER_LIMIT};
pub use naive::{naive_min_plus_convolution, naive_ring_convolution};
pub use transform::{
    mobius_in_place, mobius_in_place_upto, mobius_transform, zeta_in_place, zeta_transform,
};

use crate::error::{Error, Result};
use crate::lattice::{RelationSet, MAX_RELATIONS};

/// A dense table of `2^n` values, one per subset of `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunction<T> {
    n: usize,
    values: Vec<T>,
}

impl<T> SetFunction<T> {
    /// Wraps a table whose length must be `2^n` for some `n <= 30`.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        let len = values.len();
        if !len.is_power_of_two() || len > 1 << MAX_RELATIONS {
            return Err(Error::InvalidArgument(format!(
                "set function length {len} is not 2^n with n <= {MAX_RELATIONS}"
            )));
        }
        Ok(SetFunction {
            n: len.trailing_zeros() as usize,
            values,
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(RelationSet) -> T) -> Self {
        assert!(n <= MAX_RELATIONS);
        SetFunction {
            n,
            values: (0..1u32 << n).map(|m| f(RelationSet(m))).collect(),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> SetFunction<U> {
        SetFunction {
            n: self.n,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub(crate) fn check_same_size<U>(&self, other: &SetFunction<U>) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl<T: Clone> SetFunction<T> {
    pub fn filled(n: usize, value: T) -> Self {
        assert!(n <= MAX_RELATIONS);
        SetFunction {
            n,
            values: vec![value; 1 << n],
        }
    }
}

impl<T> Index<RelationSet> for SetFunction<T> {
    type Output = T;

    #[inline]
    fn index(&self, s: RelationSet) -> &T {
        &self.values[s.index()]
    }
}

impl<T> IndexMut<RelationSet> for SetFunction<T> {
    #[inline]
    fn index_mut(&mut self, s: RelationSet) -> &mut T {
        &mut self.values[s.index()]
    }
}
