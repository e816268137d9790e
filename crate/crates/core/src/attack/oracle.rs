//! Exhaustive key search, used as ground truth for the attack at desk scale.

use crate::asg::{AsgGenerator, AsgKey, AsgParams, Register};
use crate::error::{Error, Result};
use crate::field::gcd;
use crate::gf2::{BitSequence, BitVector};
use crate::registers::{JumpRegister, LfsrSpec, RegisterState};

/// Work cap for [`brute_force_oracle`]: `2^l · 2^m · 2^n · Φ₁ · Φ₂`.
pub const ORACLE_WORK_CAP: u128 = 1 << 26;

fn coprime_jumps(period: u64) -> Vec<u64> {
    (1..period).filter(|&r| gcd(r, period) == 1).collect()
}

/// `2^l · 2^m · 2^n · Φ₁ · Φ₂` with exact jump counts.
pub fn oracle_work(params: &AsgParams) -> u128 {
    if params.l + params.m + params.n >= 100 || params.m >= 40 || params.n >= 40 {
        return u128::MAX;
    }
    let phi1 = coprime_jumps(params.period(Register::B)).len() as u128;
    let phi2 = coprime_jumps(params.period(Register::C)).len() as u128;
    (1u128 << (params.l + params.m + params.n)) * phi1 * phi2
}

/// Every valid key whose keystream starts with `keystream`, in the order
/// `(state_a, state_b, r, state_c, s)` ascending.
pub fn brute_force_oracle(params: &AsgParams, keystream: &BitSequence) -> Result<Vec<AsgKey>> {
    let v = params.violations();
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let work = oracle_work(params);
    if work > ORACLE_WORK_CAP {
        return Err(Error::Unsupported(format!(
            "brute-force work {work} exceeds the desk-scale cap of 2^26"
        )));
    }
    let (l, m, n) = (params.l, params.m, params.n);
    let a_spec = params.spec(Register::A)?;
    let b_spec = params.spec(Register::B)?;
    let c_spec = params.spec(Register::C)?;
    let jump_regs = |spec: &LfsrSpec, period| -> Result<Vec<(u64, JumpRegister)>> {
        let zero = RegisterState::new(BitVector::zeros(spec.length()));
        coprime_jumps(period)
            .into_iter()
            .map(|r| Ok((r, JumpRegister::new(spec, &zero, r)?)))
            .collect()
    };
    let b_jumps = jump_regs(&b_spec, params.period(Register::B))?;
    let c_jumps = jump_regs(&c_spec, params.period(Register::C))?;

    let mut found = Vec::new();
    for a in 0..1u64 << l {
        for b in 1..1u64 << m {
            for (r, b_reg) in &b_jumps {
                for c in 1..1u64 << n {
                    for (s, c_reg) in &c_jumps {
                        let mut g = AsgGenerator::from_parts(
                            a_spec.clone(),
                            a,
                            b_reg.with_state(b),
                            c_reg.with_state(c),
                        );
                        if keystream.iter().all(|bit| g.next_bit() == bit) {
                            found.push(AsgKey {
                                state_a: BitVector::from_u64(a, l),
                                state_b: BitVector::from_u64(b, m),
                                state_c: BitVector::from_u64(c, n),
                                r: *r,
                                s: *s,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(found)
}
