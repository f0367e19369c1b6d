//! Direct `O(3^n)` subset convolutions, kept as oracles.

use super::{ExtCost, Ring, SetFunction};
use crate::error::Result;

/// Calls `visit(T)` for every `T ⊆ s`, including `∅` and `s`.
#[inline]
fn for_each_submask(s: u32, mut visit: impl FnMut(u32) -> Result<()>) -> Result<()> {
    let mut t = s;
    loop {
        visit(t)?;
        if t == 0 {
            return Ok(());
        }
        t = (t - 1) & s;
    }
}

/// `h(S) = Σ_{T ⊆ S} f(T) g(S \ T)`.
pub fn naive_ring_convolution<R: Ring>(
    f: &SetFunction<R>,
    g: &SetFunction<R>,
) -> Result<SetFunction<R>> {
    f.check_same_size(g)?;
    let (fv, gv) = (f.values(), g.values());
    let mut out = Vec::with_capacity(fv.len());
    for s in 0..fv.len() as u32 {
        let mut acc = R::zero();
        for_each_submask(s, |t| {
            acc.mul_acc(&fv[t as usize], &gv[(s ^ t) as usize], false)
        })?;
        out.push(acc);
    }
    SetFunction::from_values(out)
}

/// `h(S) = min_{T ⊆ S} f(T) + g(S \ T)` with `INFINITY` absorbing.
pub fn naive_min_plus_convolution(
    f: &SetFunction<ExtCost>,
    g: &SetFunction<ExtCost>,
) -> Result<SetFunction<ExtCost>> {
    f.check_same_size(g)?;
    let (fv, gv) = (f.values(), g.values());
    let mut out = Vec::with_capacity(fv.len());
    for s in 0..fv.len() as u32 {
        let mut best = ExtCost::INFINITY;
        for_each_submask(s, |t| {
            let v = fv[t as usize].checked_add(gv[(s ^ t) as usize])?;
            best = best.min(v);
            Ok(())
        })?;
        out.push(best);
    }
    SetFunction::from_values(out)
}
