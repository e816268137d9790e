//! Recovery of a decimation exponent and register offset from a decimated
//! m-sequence.
//!
//! An m-sequence with characteristic polynomial equal to the field modulus is
//! `b_t = Tr(u·α^t)`. Its `r`-decimation is `b_(rt) = Tr(u·γ^t)` with
//! `γ = α^r`. For a guessed `r`, the first `m` observed bits give `m` linear
//! equations in the coordinates of `u`:
//!
//! ```text
//! Σ_i u_i · Tr(x^i · γ^t) = observed_t,   t = 0..m
//! ```
//!
//! A unique solution is accepted when it also predicts the next `V` bits.

use crate::error::{Error, Result};
use crate::field::{gcd, FieldContext, FieldElement};
use crate::gf2::{solve_linear_system, BinaryPolynomial, BitMatrix, BitSequence, BitVector, Solution};

/// One `(r, u)` pair consistent with the observed stream, plus the first `m`
/// output bits `Tr(u·α^t)` of the undecimated register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimationSolution {
    pub r: u64,
    pub u: FieldElement,
    pub init: BitSequence,
}

/// The `m×m` coefficient matrix `A[t][i] = Tr(x^i · γ^t)` for `γ = α^r`.
pub fn trace_system(ctx: &FieldContext, r: u64) -> BitMatrix {
    trace_system_raw(ctx, ctx.pow_raw(ctx.alpha().value(), r))
}

fn trace_system_raw(ctx: &FieldContext, gamma: u64) -> BitMatrix {
    let m = ctx.degree();
    let mut a = BitMatrix::zeros(m, m);
    let mut w = 1u64;
    for t in 0..m {
        for i in 0..m {
            if ctx.trace_raw(ctx.mul_raw(1 << i, w)) {
                a.set(t, i, true);
            }
        }
        w = ctx.mul_raw(w, gamma);
    }
    a
}

/// The first `(r, u)` in ascending `r` that reproduces `observed`.
///
/// `observed` must hold at least `m + verify_bits` bits.
pub fn recover_decimation(
    ctx: &FieldContext,
    observed: &BitSequence,
    verify_bits: usize,
) -> Result<DecimationSolution> {
    let mut solves = 0;
    search(ctx, observed, verify_bits, None, true, &mut solves)?
        .into_iter()
        .next()
        .ok_or(Error::NotFound)
}

/// Every `(r, u)` reproducing `observed`, ascending in `r`.
///
/// The observation cannot separate `(r, u)` from `(2r, u²)`: both give
/// `Tr(u·γ^t) = Tr(u²·γ^(2t))`. A correct stream therefore yields the whole
/// Frobenius orbit of `m` pairs, all of which describe keys with identical
/// keystreams.
pub fn decimation_solutions(
    ctx: &FieldContext,
    observed: &BitSequence,
    verify_bits: usize,
) -> Result<Vec<DecimationSolution>> {
    let mut solves = 0;
    search(ctx, observed, verify_bits, None, false, &mut solves)
}

pub(crate) fn search(
    ctx: &FieldContext,
    observed: &BitSequence,
    verify_bits: usize,
    prefilter: Option<&BinaryPolynomial>,
    first_only: bool,
    solves: &mut u64,
) -> Result<Vec<DecimationSolution>> {
    let m = ctx.degree();
    if observed.len() < m + verify_bits {
        return Err(Error::Config(format!(
            "decimation recovery needs {} observed bits, got {}",
            m + verify_bits,
            observed.len()
        )));
    }
    let rhs = observed.prefix(m);
    let order = ctx.order();
    let alpha = ctx.alpha().value();
    let mut out = Vec::new();

    for r in (1..order).filter(|&r| gcd(r, order) == 1) {
        let gamma = ctx.pow_raw(alpha, r);
        if let Some(target) = prefilter {
            if &ctx.element(gamma).minimal_polynomial() != target {
                continue;
            }
        }
        *solves += 1;
        // Rank deficiency is treated as "not this r".
        let Solution::Unique(coords) = solve_linear_system(&trace_system_raw(ctx, gamma), &rhs)? else {
            continue;
        };
        let u = coords.to_u64().expect("field degree below 64");
        if u == 0 {
            continue;
        }
        let mut cur = ctx.mul_raw(u, ctx.pow_raw(gamma, m as u64));
        let consistent = (m..m + verify_bits).all(|t| {
            let ok = ctx.trace_raw(cur) == observed.get(t);
            cur = ctx.mul_raw(cur, gamma);
            ok
        });
        if !consistent {
            continue;
        }
        let mut init = BitVector::with_capacity(m);
        let mut cur = u;
        for _ in 0..m {
            init.push(ctx.trace_raw(cur));
            cur = ctx.mul_raw(cur, alpha);
        }
        out.push(DecimationSolution {
            r,
            u: ctx.element(u),
            init,
        });
        if first_only {
            break;
        }
    }
    Ok(out)
}
