//! Value domains the transforms and convolutions run over.

use std::fmt;
use std::num::Wrapping;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A commutative ring with fallible (checked) arithmetic.
///
/// Checked integer domains report overflow instead of wrapping; the
/// arbitrary-precision domains never fail.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    /// Cheap `Copy`-like element where a dense pass over zeros costs less than
    /// a per-element rank test. Kernels use this to pick their loop shape.
    const CHEAP: bool = false;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, rhs: &Self) -> Result<()>;
    fn sub_assign(&mut self, rhs: &Self) -> Result<()>;
    fn mul(&self, rhs: &Self) -> Result<Self>;

    /// `self += a * b`, or `self += 2 * a * b` when `doubled`.
    fn mul_acc(&mut self, a: &Self, b: &Self, doubled: bool) -> Result<()> {
        let p = a.mul(b)?;
        self.add_assign(&p)?;
        if doubled {
            self.add_assign(&p)?;
        }
        Ok(())
    }

    fn neg(&self) -> Result<Self> {
        let mut z = Self::zero();
        z.sub_assign(self)?;
        Ok(z)
    }

    /// `dst[i] += src[i]` over the common prefix.
    #[inline]
    fn add_slice(dst: &mut [Self], src: &[Self]) -> Result<()> {
        dst.iter_mut()
            .zip(src)
            .try_for_each(|(d, s)| d.add_assign(s))
    }

    /// `dst[i] -= src[i]` over the common prefix.
    #[inline]
    fn sub_slice(dst: &mut [Self], src: &[Self]) -> Result<()> {
        dst.iter_mut()
            .zip(src)
            .try_for_each(|(d, s)| d.sub_assign(s))
    }

    /// `acc[i] += a[i] * b[i]` (twice when `doubled`).
    #[inline]
    fn mul_acc_slice(acc: &mut [Self], a: &[Self], b: &[Self], doubled: bool) -> Result<()> {
        for ((x, y), z) in acc.iter_mut().zip(a).zip(b) {
            x.mul_acc(y, z, doubled)?;
        }
        Ok(())
    }
}

/// Checked 64-bit integers, the exact counting ring for moderate inputs.
impl Ring for i64 {
    const CHEAP: bool = true;

    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    #[inline]
    fn add_assign(&mut self, rhs: &Self) -> Result<()> {
        *self = self
            .checked_add(*rhs)
            .ok_or(Error::Overflow("i64 addition"))?;
        Ok(())
    }
    #[inline]
    fn sub_assign(&mut self, rhs: &Self) -> Result<()> {
        *self = self
            .checked_sub(*rhs)
            .ok_or(Error::Overflow("i64 subtraction"))?;
        Ok(())
    }
    #[inline]
    fn mul(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(*rhs)
            .ok_or(Error::Overflow("i64 multiplication"))
    }

    // overflow flags are folded so the loops have a single exit
    #[inline]
    fn add_slice(dst: &mut [Self], src: &[Self]) -> Result<()> {
        let mut overflow = false;
        for (d, s) in dst.iter_mut().zip(src) {
            let (v, o) = d.overflowing_add(*s);
            *d = v;
            overflow |= o;
        }
        if overflow {
            return Err(Error::Overflow("i64 addition"));
        }
        Ok(())
    }

    #[inline]
    fn sub_slice(dst: &mut [Self], src: &[Self]) -> Result<()> {
        let mut overflow = false;
        for (d, s) in dst.iter_mut().zip(src) {
            let (v, o) = d.overflowing_sub(*s);
            *d = v;
            overflow |= o;
        }
        if overflow {
            return Err(Error::Overflow("i64 subtraction"));
        }
        Ok(())
    }
}

/// Residues modulo 2^32.
///
/// Exact whenever every quantity read back out of a computation is known to
/// lie in `[0, 2^32)`. The feasibility DP qualifies: its per-set split counts
/// are bounded by `2^|S| - 2 < 2^32` once the table is clamped to {0, 1}.
impl Ring for Wrapping<u32> {
    const CHEAP: bool = true;

    fn zero() -> Self {
        Wrapping(0)
    }
    fn one() -> Self {
        Wrapping(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    #[inline(always)]
    fn add_assign(&mut self, rhs: &Self) -> Result<()> {
        *self += *rhs;
        Ok(())
    }
    #[inline(always)]
    fn sub_assign(&mut self, rhs: &Self) -> Result<()> {
        *self -= *rhs;
        Ok(())
    }
    #[inline(always)]
    fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(*self * *rhs)
    }
    #[inline(always)]
    fn mul_acc(&mut self, a: &Self, b: &Self, doubled: bool) -> Result<()> {
        self.0 = self
            .0
            .wrapping_add(a.0.wrapping_mul(b.0) << (doubled as u32));
        Ok(())
    }

    #[inline]
    fn add_slice(dst: &mut [Self], src: &[Self]) -> Result<()> {
        for (d, s) in dst.iter_mut().zip(src) {
            *d += *s;
        }
        Ok(())
    }

    #[inline]
    fn sub_slice(dst: &mut [Self], src: &[Self]) -> Result<()> {
        for (d, s) in dst.iter_mut().zip(src) {
            *d -= *s;
        }
        Ok(())
    }

    #[inline]
    fn mul_acc_slice(acc: &mut [Self], a: &[Self], b: &[Self], doubled: bool) -> Result<()> {
        let shift = doubled as u32;
        for ((x, y), z) in acc.iter_mut().zip(a).zip(b) {
            x.0 = x.0.wrapping_add(y.0.wrapping_mul(z.0) << shift);
        }
        Ok(())
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, rhs: &Self) -> Result<()> {
        *self += rhs;
        Ok(())
    }
    fn sub_assign(&mut self, rhs: &Self) -> Result<()> {
        *self -= rhs;
        Ok(())
    }
    fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(self * rhs)
    }
}

/// Non-negative integer extended with `+∞`, the value domain of the
/// `(min, +)` and `(min, max)` semirings.
///
/// `INFINITY` is `u64::MAX`. Instances are validated so that every finite
/// cost (at most `W * n`) stays strictly below it, which makes saturating
/// addition exact on finite operands and absorbing on infinite ones.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct ExtCost(u64);

impl ExtCost {
    pub const INFINITY: ExtCost = ExtCost(u64::MAX);
    pub const ZERO: ExtCost = ExtCost(0);

    /// Panics on `u64::MAX`, which is reserved for `INFINITY`.
    pub fn finite(v: u64) -> Self {
        assert!(v != u64::MAX, "u64::MAX is reserved for INFINITY");
        ExtCost(v)
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0 == u64::MAX
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0 != u64::MAX
    }

    /// The finite value, or `None` for `INFINITY`.
    #[inline]
    pub fn value(self) -> Option<u64> {
        self.is_finite().then_some(self.0)
    }

    /// `self + rhs` with `INFINITY` absorbing; a finite sum that reaches
    /// the sentinel is an overflow.
    pub fn checked_add(self, rhs: ExtCost) -> Result<ExtCost> {
        if self.is_infinite() || rhs.is_infinite() {
            return Ok(ExtCost::INFINITY);
        }
        match self.0.checked_add(rhs.0) {
            Some(v) if v != u64::MAX => Ok(ExtCost(v)),
            _ => Err(Error::Overflow("extended cost addition")),
        }
    }
}

impl fmt::Debug for ExtCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

impl fmt::Display for ExtCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<u64> for ExtCost {
    fn from(v: u64) -> Self {
        ExtCost::finite(v)
    }
}
