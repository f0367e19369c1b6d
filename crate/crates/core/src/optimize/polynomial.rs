//! Sparse polynomials in one variable with integer coefficients, the value
//! domain of the `C_out` embedding.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::convolution::Ring;
use crate::error::{Error, Result};

/// Dense accumulation is used when the product's exponent range is at most
/// this wide.
const DENSE_RANGE_LIMIT: u64 = 1 << 22;

/// An integer coefficient, kept in `i64` until it outgrows it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Small(i64),
    Big(BigInt),
}

impl Coefficient {
    fn from_big(b: BigInt) -> Self {
        match b.to_i64() {
            Some(v) => Coefficient::Small(v),
            None => Coefficient::Big(b),
        }
    }

    fn from_i128(v: i128) -> Self {
        match i64::try_from(v) {
            Ok(v) => Coefficient::Small(v),
            Err(_) => Coefficient::Big(BigInt::from(v)),
        }
    }

    pub fn to_bigint(&self) -> BigInt {
        match self {
            Coefficient::Small(v) => BigInt::from(*v),
            Coefficient::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Small(v) => *v == 0,
            Coefficient::Big(b) => Zero::is_zero(b),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Coefficient::Small(v) => *v > 0,
            Coefficient::Big(b) => b.sign() == num_bigint::Sign::Plus,
        }
    }

    fn add(&self, rhs: &Coefficient) -> Coefficient {
        if let (Coefficient::Small(a), Coefficient::Small(b)) = (self, rhs) {
            if let Some(v) = a.checked_add(*b) {
                return Coefficient::Small(v);
            }
        }
        Coefficient::from_big(self.to_bigint() + rhs.to_bigint())
    }

    fn neg(&self) -> Coefficient {
        match self {
            Coefficient::Small(v) if *v != i64::MIN => Coefficient::Small(-v),
            _ => Coefficient::from_big(-self.to_bigint()),
        }
    }
}

impl From<i64> for Coefficient {
    fn from(v: i64) -> Self {
        Coefficient::Small(v)
    }
}

/// `Σ a_e x^e` stored as `(e, a_e)` pairs, exponents strictly increasing,
/// no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoefficientPolynomial {
    terms: Vec<(u64, Coefficient)>,
}

impl CoefficientPolynomial {
    pub fn monomial(exponent: u64) -> Self {
        CoefficientPolynomial {
            terms: vec![(exponent, Coefficient::Small(1))],
        }
    }

    /// Builds from arbitrary `(exponent, coefficient)` pairs, merging
    /// repeats and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (u64, i64)>>(terms: I) -> Self {
        let mut acc: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (e, a) in terms {
            *acc.entry(e).or_default() += a;
        }
        Self::from_map(acc)
    }

    fn from_map(acc: BTreeMap<u64, BigInt>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, a)| !Zero::is_zero(a))
            .map(|(e, a)| (e, Coefficient::from_big(a)))
            .collect();
        CoefficientPolynomial { terms }
    }

    pub fn terms(&self) -> &[(u64, Coefficient)] {
        &self.terms
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exponent(&self) -> Option<u64> {
        self.terms.first().map(|t| t.0)
    }

    pub fn max_exponent(&self) -> Option<u64> {
        self.terms.last().map(|t| t.0)
    }

    pub fn coefficient(&self, exponent: u64) -> Coefficient {
        match self.terms.binary_search_by_key(&exponent, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Coefficient::Small(0),
        }
    }

    fn merge(&mut self, rhs: &CoefficientPolynomial, negate: bool) {
        if rhs.terms.is_empty() {
            return;
        }
        let lhs = std::mem::take(&mut self.terms);
        let mut out = Vec::with_capacity(lhs.len() + rhs.terms.len());
        let mut a = lhs.into_iter().peekable();
        let mut b = rhs.terms.iter().peekable();
        let right = |c: &Coefficient| if negate { c.neg() } else { c.clone() };
        loop {
            let order = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => break,
            };
            match order {
                Ordering::Less => out.push(a.next().unwrap()),
                Ordering::Greater => {
                    let (e, c) = b.next().unwrap();
                    out.push((*e, right(c)));
                }
                Ordering::Equal => {
                    let (e, x) = a.next().unwrap();
                    let (_, y) = b.next().unwrap();
                    let v = x.add(&right(y));
                    if !v.is_zero() {
                        out.push((e, v));
                    }
                }
            }
        }
        self.terms = out;
    }

    fn all_small(&self) -> bool {
        self.terms
            .iter()
            .all(|t| matches!(t.1, Coefficient::Small(_)))
    }

    /// Product by dense `i128` accumulation; `None` if a partial sum leaves
    /// `i128`.
    fn mul_dense(&self, rhs: &CoefficientPolynomial, lo: u64, width: usize) -> Option<Self> {
        let mut acc = vec![0i128; width];
        for (ea, a) in &self.terms {
            let Coefficient::Small(a) = a else {
                unreachable!()
            };
            for (eb, b) in &rhs.terms {
                let Coefficient::Small(b) = b else {
                    unreachable!()
                };
                let slot = &mut acc[(ea + eb - lo) as usize];
                *slot = slot.checked_add(*a as i128 * *b as i128)?;
            }
        }
        let terms = acc
            .into_iter()
            .enumerate()
            .filter(|&(_, v)| v != 0)
            .map(|(i, v)| (lo + i as u64, Coefficient::from_i128(v)))
            .collect();
        Some(CoefficientPolynomial { terms })
    }

    fn mul_sparse(&self, rhs: &CoefficientPolynomial) -> Self {
        let mut acc: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (ea, a) in &self.terms {
            let a = a.to_bigint();
            for (eb, b) in &rhs.terms {
                *acc.entry(ea + eb).or_default() += &a * b.to_bigint();
            }
        }
        Self::from_map(acc)
    }
}

impl Ring for CoefficientPolynomial {
    fn zero() -> Self {
        CoefficientPolynomial::default()
    }

    fn one() -> Self {
        CoefficientPolynomial::monomial(0)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_assign(&mut self, rhs: &Self) -> Result<()> {
        self.merge(rhs, false);
        Ok(())
    }

    fn sub_assign(&mut self, rhs: &Self) -> Result<()> {
        self.merge(rhs, true);
        Ok(())
    }

    fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero());
        }
        let hi = self
            .max_exponent()
            .unwrap()
            .checked_add(rhs.max_exponent().unwrap())
            .ok_or(Error::Overflow("polynomial exponent"))?;
        let lo = self.terms[0].0 + rhs.terms[0].0;
        let width = hi - lo + 1;
        if width <= DENSE_RANGE_LIMIT && self.all_small() && rhs.all_small() {
            if let Some(p) = self.mul_dense(rhs, lo, width as usize) {
                return Ok(p);
            }
        }
        Ok(self.mul_sparse(rhs))
    }
}
