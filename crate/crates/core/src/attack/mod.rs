//! Algebraic key recovery against ASG(r,s).
//!
//! The attack works on the equivalent classical ASG. For every initial state
//! of the control register and both guesses of `β_0`:
//!
//! 1. [`reconstruct_streams`] peels `β` and `λ` out of the keystream: when
//!    `a_t = 1` the step moved B, so `β_(p+1) = β_p ⊕ z_t ⊕ z_(t+1)`;
//!    otherwise `λ_(q+1) = λ_q ⊕ z_t ⊕ z_(t+1)`.
//! 2. [`fit_candidate`] runs Berlekamp-Massey on both streams and rejects
//!    guesses whose linear complexity exceeds the register length.
//! 3. [`verify_candidate`] regenerates the keystream from the fitted
//!    registers.
//! 4. [`recover_decimation`] solves the trace equations for `(r, u)` and
//!    `(s, v)`, which yields the jumps and the original B and C states.
//!
//! Nothing about `r` or `s` is needed before step 4, so the exhaustive part
//! costs `2^(l+1)` Berlekamp-Massey runs instead of being multiplied by the
//! number of admissible jumps.

mod oracle;
mod trace;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asg::{classical_asg_keystream, keystream, AsgKey, AsgParams, ReducedModel, Register};
use crate::error::{Error, Result};
use crate::field::FieldContext;
use crate::gf2::{BitSequence, BitVector};
use crate::registers::{de_bruijn_next, DeBruijnRegister, LfsrSpec, RegisterState};
use crate::sequence::{berlekamp_massey, LfsrFit};

pub use oracle::{brute_force_oracle, oracle_work, ORACLE_WORK_CAP};
pub use trace::{decimation_solutions, recover_decimation, trace_system, DecimationSolution};

/// Largest control register the exhaustive search accepts.
pub const MAX_CONTROL_LEN: usize = 32;

#[derive(Clone, Debug)]
pub struct AttackConfig {
    pub params: AsgParams,
    pub keystream: BitSequence,
    /// Target number of keystream bits left over for verification after the
    /// fitting prefix. Candidates verified on fewer bits are still reported
    /// and counted in [`AttackCounters::short_margin_candidates`].
    pub verify_margin: usize,
    pub max_candidates: usize,
    pub worker_count: usize,
    /// Skip jump guesses whose minimal polynomial differs from the fitted
    /// feedback polynomial.
    pub prefilter_minpoly: bool,
}

impl AttackConfig {
    /// Defaults: margin `l + 20`, 16 candidates, one worker, no prefilter.
    pub fn new(params: AsgParams, keystream: BitSequence) -> Self {
        Self {
            verify_margin: params.l + 20,
            params,
            keystream,
            max_candidates: 16,
            worker_count: 1,
            prefilter_minpoly: false,
        }
    }

    pub fn check(&self) -> Result<()> {
        let v = self.params.violations();
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        let p = &self.params;
        let need = p.min_keystream_len();
        if self.keystream.len() < need {
            return Err(Error::Config(format!(
                "keystream has {} bits; the attack needs at least 3(m+n) = {need}",
                self.keystream.len()
            )));
        }
        if self.verify_margin < p.l + 20 {
            return Err(Error::Config(format!(
                "verify margin {} is below l + 20 = {}",
                self.verify_margin,
                p.l + 20
            )));
        }
        if p.l > MAX_CONTROL_LEN {
            return Err(Error::Unsupported(format!(
                "control register length {} exceeds {MAX_CONTROL_LEN}",
                p.l
            )));
        }
        if self.worker_count == 0 {
            return Err(Error::Config("worker count must be positive".into()));
        }
        Ok(())
    }
}

/// A guess that survived Berlekamp-Massey.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateModel {
    pub a_init: BitVector,
    pub beta0: bool,
    pub beta_fit: LfsrFit,
    pub lambda_fit: LfsrFit,
    /// Keystream bits needed to harvest `2m` bits of `β` and `2n` of `λ`.
    pub consumed_bits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("insufficient bits: {beta_bits} of beta and {lambda_bits} of lambda reconstructed")]
    InsufficientBits { beta_bits: usize, lambda_bits: usize },
    #[error("register {register}: linear complexity {linear_complexity} exceeds {cap}")]
    Rejected {
        register: Register,
        linear_complexity: usize,
        cap: usize,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackCounters {
    pub a_states_tried: u64,
    pub bm_runs: u64,
    pub trace_solves: u64,
    pub verified_candidates: u64,
    pub short_margin_candidates: u64,
}

impl AttackCounters {
    fn merge(&mut self, o: &AttackCounters) {
        self.a_states_tried += o.a_states_tried;
        self.bm_runs += o.bm_runs;
        self.trace_solves += o.trace_solves;
        self.verified_candidates += o.verified_candidates;
        self.short_margin_candidates += o.short_margin_candidates;
    }
}

#[derive(Clone, Debug)]
pub struct AttackReport {
    pub recovered_keys: Vec<AsgKey>,
    pub counters: AttackCounters,
    pub wall_time: Duration,
}

/// Splits the keystream into `β` and `λ` under a guessed control sequence
/// and `β_0`. Stops early when `a_seq` runs out.
pub fn reconstruct_streams(
    a_seq: &BitSequence,
    keystream: &BitSequence,
    beta0: bool,
) -> (BitSequence, BitSequence) {
    let (beta, lambda, _) = reconstruct(a_seq, keystream, beta0, usize::MAX, usize::MAX);
    (beta, lambda)
}

/// As [`reconstruct_streams`], also returning how many keystream bits were
/// needed before `β` reached `beta_goal` bits and `λ` reached `lambda_goal`
/// (the full length when never reached).
fn reconstruct(
    a_seq: &BitSequence,
    z: &BitSequence,
    beta0: bool,
    beta_goal: usize,
    lambda_goal: usize,
) -> (BitSequence, BitSequence, usize) {
    let mut beta = BitVector::with_capacity(z.len());
    let mut lambda = BitVector::with_capacity(z.len());
    if z.is_empty() {
        return (beta, lambda, 0);
    }
    let (mut bp, mut lq) = (beta0, z.get(0) ^ beta0);
    beta.push(bp);
    lambda.push(lq);
    let mut consumed = None;
    let steps = (z.len() - 1).min(a_seq.len());
    for t in 0..steps {
        if consumed.is_none() && beta.len() >= beta_goal && lambda.len() >= lambda_goal {
            consumed = Some(t + 1);
        }
        let d = z.get(t) ^ z.get(t + 1);
        if a_seq.get(t) {
            bp ^= d;
            beta.push(bp);
        } else {
            lq ^= d;
            lambda.push(lq);
        }
    }
    if consumed.is_none() && beta.len() >= beta_goal && lambda.len() >= lambda_goal {
        consumed = Some(steps + 1);
    }
    (beta, lambda, consumed.unwrap_or(z.len()))
}

/// Shared, immutable per-run context.
struct Search<'a> {
    config: &'a AttackConfig,
    a_spec: LfsrSpec,
    b_field: FieldContext,
    c_field: FieldContext,
}

impl<'a> Search<'a> {
    fn new(config: &'a AttackConfig) -> Result<Self> {
        let p = &config.params;
        Ok(Self {
            config,
            a_spec: p.spec(Register::A)?,
            b_field: FieldContext::new(&p.poly_b)?,
            c_field: FieldContext::new(&p.poly_c)?,
        })
    }

    fn control_bits(&self, a_init: u64) -> BitSequence {
        let count = self.config.keystream.len().saturating_sub(1);
        let mut out = BitVector::with_capacity(count);
        let mut s = a_init;
        for _ in 0..count {
            out.push(s & 1 == 1);
            s = de_bruijn_next(&self.a_spec, s);
        }
        out
    }

    fn fit(
        &self,
        a_init: &BitVector,
        a_seq: &BitSequence,
        beta0: bool,
        counters: &mut AttackCounters,
    ) -> Result<CandidateModel, FitError> {
        let (m, n) = (self.config.params.m, self.config.params.n);
        let (beta, lambda, consumed) = reconstruct(a_seq, &self.config.keystream, beta0, 2 * m, 2 * n);
        if beta.len() < 2 * m || lambda.len() < 2 * n {
            return Err(FitError::InsufficientBits {
                beta_bits: beta.len(),
                lambda_bits: lambda.len(),
            });
        }
        counters.bm_runs += 1;
        let beta_fit = berlekamp_massey(&beta);
        if beta_fit.linear_complexity > m {
            return Err(FitError::Rejected {
                register: Register::B,
                linear_complexity: beta_fit.linear_complexity,
                cap: m,
            });
        }
        counters.bm_runs += 1;
        let lambda_fit = berlekamp_massey(&lambda);
        if lambda_fit.linear_complexity > n {
            return Err(FitError::Rejected {
                register: Register::C,
                linear_complexity: lambda_fit.linear_complexity,
                cap: n,
            });
        }
        Ok(CandidateModel {
            a_init: a_init.clone(),
            beta0,
            beta_fit,
            lambda_fit,
            consumed_bits: consumed,
        })
    }

    fn verify(&self, cand: &CandidateModel) -> bool {
        let (Ok((beta_spec, beta_state)), Ok((lambda_spec, lambda_state))) =
            (cand.beta_fit.to_register(), cand.lambda_fit.to_register())
        else {
            return false;
        };
        let Ok(control) = DeBruijnRegister::new(self.a_spec.clone(), RegisterState::new(cand.a_init.clone())) else {
            return false;
        };
        let model = ReducedModel {
            beta_spec,
            beta_state,
            lambda_spec,
            lambda_state,
            control,
        };
        let z = &self.config.keystream;
        classical_asg_keystream(&model, z.len()).is_ok_and(|regen| &regen == z)
    }

    /// Jump and original state for one generating register.
    fn recover(
        &self,
        field: &FieldContext,
        fit: &LfsrFit,
        counters: &mut AttackCounters,
    ) -> Option<trace::DecimationSolution> {
        let len = field.degree();
        let verify_bits = 2 * len;
        let observed = fit.generate((len + verify_bits).max(fit.initial_state.len()));
        let feedback = fit.feedback();
        let prefilter = self.config.prefilter_minpoly.then_some(&feedback);
        trace::search(field, &observed, verify_bits, prefilter, true, &mut counters.trace_solves)
            .ok()?
            .into_iter()
            .next()
    }

    /// Candidate keys for control states `range`, in ascending order.
    fn run_range(&self, range: std::ops::Range<u64>) -> (Vec<AsgKey>, AttackCounters) {
        let mut counters = AttackCounters::default();
        let mut keys = Vec::new();
        let p = &self.config.params;
        let z = &self.config.keystream;
        for a in range {
            counters.a_states_tried += 1;
            let a_init = BitVector::from_u64(a, p.l);
            let a_seq = self.control_bits(a);
            for beta0 in [false, true] {
                let Ok(cand) = self.fit(&a_init, &a_seq, beta0, &mut counters) else {
                    continue;
                };
                if !self.verify(&cand) {
                    continue;
                }
                counters.verified_candidates += 1;
                if z.len() - cand.consumed_bits < self.config.verify_margin {
                    counters.short_margin_candidates += 1;
                }
                let Some(b) = self.recover(&self.b_field, &cand.beta_fit, &mut counters) else {
                    continue;
                };
                let Some(c) = self.recover(&self.c_field, &cand.lambda_fit, &mut counters) else {
                    continue;
                };
                let key = AsgKey {
                    state_a: a_init.clone(),
                    state_b: RegisterState::from_output_prefix(&b.init).cells().clone(),
                    state_c: RegisterState::from_output_prefix(&c.init).cells().clone(),
                    r: b.r,
                    s: c.r,
                };
                if keystream(p, &key, z.len()).is_ok_and(|k| &k == z) {
                    keys.push(key);
                }
            }
        }
        (keys, counters)
    }
}

/// Runs Berlekamp-Massey on the streams reconstructed under one guess.
pub fn fit_candidate(
    config: &AttackConfig,
    a_init: &BitVector,
    beta0: bool,
) -> Result<Result<CandidateModel, FitError>> {
    let search = Search::new(config)?;
    let a = a_init
        .to_u64()
        .filter(|_| a_init.len() == config.params.l)
        .ok_or_else(|| Error::DimensionMismatch("control state length differs from l".into()))?;
    let a_seq = search.control_bits(a);
    Ok(search.fit(a_init, &a_seq, beta0, &mut AttackCounters::default()))
}

/// True iff the classical ASG over the candidate's fitted registers
/// regenerates every supplied keystream bit.
pub fn verify_candidate(config: &AttackConfig, cand: &CandidateModel) -> Result<bool> {
    Ok(Search::new(config)?.verify(cand))
}

/// The full attack: all `2^l` control states, both `β_0` guesses, and trace
/// recovery for every verified candidate.
///
/// The control-state space is split into `worker_count` contiguous ranges;
/// results are merged in range order, so the report does not depend on the
/// worker count.
pub fn run_attack(config: &AttackConfig) -> Result<AttackReport> {
    config.check()?;
    let start = Instant::now();
    let search = Search::new(config)?;
    let total = 1u64 << config.params.l;
    let workers = (config.worker_count as u64).min(total).max(1);
    let chunk = total.div_ceil(workers);
    let ranges: Vec<_> = (0..workers)
        .map(|w| (w * chunk).min(total)..((w + 1) * chunk).min(total))
        .collect();

    let parts: Vec<(Vec<AsgKey>, AttackCounters)> = if workers == 1 {
        vec![search.run_range(0..total)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|r| {
                    let s = &search;
                    scope.spawn(move || s.run_range(r))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("attack worker panicked"))
                .collect()
        })
    };

    let mut counters = AttackCounters::default();
    let mut recovered_keys = Vec::new();
    for (keys, c) in &parts {
        counters.merge(c);
        recovered_keys.extend(keys.iter().cloned());
    }
    recovered_keys.truncate(config.max_candidates);
    Ok(AttackReport {
        recovered_keys,
        counters,
        wall_time: start.elapsed(),
    })
}
