//! Feedback shift registers.
//!
//! Fibonacci form throughout: cells are indexed `0..len`, the feedback bit
//! enters cell 0 and every other cell moves one index up, so cell `len-1`
//! holds the oldest bit. A register with characteristic polynomial
//! `p(x) = x^L + c_(L-1) x^(L-1) + ... + c_0` emits from cell `L-1` a
//! sequence satisfying `s_(t+L) = Σ c_i s_(t+i)`.
//!
//! Generating registers read their output from cell `L-1`; the control
//! register is read at cell 0.

use crate::error::{Error, Result};
use crate::field::is_primitive;
use crate::gf2::{low_mask, BinaryPolynomial, BitMatrix, BitSequence, BitVector};

/// Longest register the packed stepping code supports.
pub const MAX_REGISTER_LEN: usize = 64;

/// Feedback polynomial and length of an LFSR.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LfsrSpec {
    length: usize,
    feedback: BinaryPolynomial,
    taps: u64,
}

/// Cell contents of a register.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegisterState {
    cells: BitVector,
}

impl LfsrSpec {
    /// The register whose characteristic polynomial is `feedback`; its length
    /// is the polynomial's degree.
    pub fn new(feedback: BinaryPolynomial) -> Result<Self> {
        let length = match feedback.degree() {
            Some(d) if (1..=MAX_REGISTER_LEN).contains(&d) => d,
            d => {
                return Err(Error::Unsupported(format!(
                    "feedback degree {d:?} outside 1..={MAX_REGISTER_LEN}"
                )))
            }
        };
        let mut taps = 0u64;
        for i in 0..length {
            if feedback.coeff(i) {
                taps |= 1 << (length - 1 - i);
            }
        }
        Ok(Self {
            length,
            feedback,
            taps,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn feedback(&self) -> &BinaryPolynomial {
        &self.feedback
    }

    pub fn is_primitive(&self) -> Result<bool> {
        is_primitive(&self.feedback)
    }

    /// Companion matrix `T` with `state(t) = state(t-1) · T`.
    pub fn transition_matrix(&self) -> BitMatrix {
        let n = self.length;
        let mut t = BitMatrix::zeros(n, n);
        for j in 0..n {
            if self.taps >> j & 1 == 1 {
                t.set(j, 0, true);
            }
        }
        for i in 0..n - 1 {
            t.set(i, i + 1, true);
        }
        t
    }

    fn check_state(&self, state: &RegisterState) -> Result<()> {
        if state.len() != self.length {
            return Err(Error::DimensionMismatch(format!(
                "state of length {} for a register of length {}",
                state.len(),
                self.length
            )));
        }
        Ok(())
    }

    /// Advances `state` by `k` clocks. Small jumps are stepped one clock at a
    /// time; jumps of at least `length²` clocks go through `T^k`.
    pub fn step(&self, state: &RegisterState, k: u64) -> Result<RegisterState> {
        self.check_state(state)?;
        let len2 = (self.length * self.length) as u64;
        if k < len2 {
            let mut raw = state.to_raw();
            for _ in 0..k {
                raw = self.step_raw(raw);
            }
            Ok(RegisterState::from_raw(raw, self.length))
        } else {
            let cells = self.transition_matrix().pow(k)?.apply_row(&state.cells)?;
            Ok(RegisterState { cells })
        }
    }

    /// `count` output bits; bit `t` is cell `len-1` after `t` single clocks.
    pub fn output_sequence(&self, init: &RegisterState, count: usize) -> Result<BitSequence> {
        self.check_state(init)?;
        if init.is_zero() && self.is_primitive()? {
            return Err(Error::DegenerateState(
                "all-zero initial state for a primitive register".into(),
            ));
        }
        let mut raw = init.to_raw();
        let mut out = BitVector::with_capacity(count);
        for _ in 0..count {
            out.push(raw >> (self.length - 1) & 1 == 1);
            raw = self.step_raw(raw);
        }
        Ok(out)
    }

    #[inline]
    pub(crate) fn step_raw(&self, state: u64) -> u64 {
        let fb = (state & self.taps).count_ones() as u64 & 1;
        ((state << 1) | fb) & low_mask(self.length)
    }
}

impl RegisterState {
    pub fn new(cells: BitVector) -> Self {
        Self { cells }
    }

    /// The state whose next `bits.len()` outputs from cell `len-1` are
    /// `bits`: cell `len-1-t` holds output bit `t`.
    pub fn from_output_prefix(bits: &BitSequence) -> Self {
        let n = bits.len();
        Self {
            cells: (0..n).map(|i| bits.get(n - 1 - i)).collect(),
        }
    }

    pub fn cells(&self) -> &BitVector {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_zero()
    }

    /// The next `len` output bits, oldest first (inverse of
    /// [`RegisterState::from_output_prefix`]).
    pub fn output_prefix(&self) -> BitSequence {
        let n = self.len();
        (0..n).map(|t| self.cells.get(n - 1 - t)).collect()
    }

    pub(crate) fn to_raw(&self) -> u64 {
        self.cells.to_u64().expect("register lengths are at most 64")
    }

    pub(crate) fn from_raw(raw: u64, len: usize) -> Self {
        Self {
            cells: BitVector::from_u64(raw, len),
        }
    }
}

/// A packed register that advances by a fixed jump per clock, using the
/// precomputed rows of `T^jump` when the jump is large.
#[derive(Clone, Debug)]
pub(crate) struct JumpRegister {
    spec: LfsrSpec,
    jump: u64,
    rows: Option<Vec<u64>>,
    state: u64,
}

impl JumpRegister {
    pub(crate) fn new(spec: &LfsrSpec, state: &RegisterState, jump: u64) -> Result<Self> {
        spec.check_state(state)?;
        let len = spec.length as u64;
        let rows = if jump >= len * len {
            let tk = spec.transition_matrix().pow(jump)?;
            Some(
                (0..spec.length)
                    .map(|i| tk.row(i).to_u64().expect("row fits a word"))
                    .collect(),
            )
        } else {
            None
        };
        Ok(Self {
            spec: spec.clone(),
            jump,
            rows,
            state: state.to_raw(),
        })
    }

    /// Same spec and jump, different state; reuses the jump rows.
    pub(crate) fn with_state(&self, state: u64) -> Self {
        Self {
            state,
            ..self.clone()
        }
    }

    #[inline]
    pub(crate) fn output(&self) -> bool {
        self.state >> (self.spec.length - 1) & 1 == 1
    }

    #[inline]
    pub(crate) fn advance(&mut self) {
        match &self.rows {
            Some(rows) => {
                let mut acc = 0;
                let mut s = self.state;
                let mut i = 0;
                while s != 0 {
                    if s & 1 == 1 {
                        acc ^= rows[i];
                    }
                    s >>= 1;
                    i += 1;
                }
                self.state = acc;
            }
            None => {
                for _ in 0..self.jump {
                    self.state = self.spec.step_raw(self.state);
                }
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn state(&self) -> RegisterState {
        RegisterState::from_raw(self.state, self.spec.length)
    }
}

/// Every `r`-th bit of `seq`, starting with bit 0.
pub fn decimate(seq: &BitSequence, r: usize) -> BitSequence {
    assert!(r > 0, "decimation factor must be positive");
    (0..seq.len()).step_by(r).map(|i| seq.get(i)).collect()
}

/// A span-`l` de Bruijn register: a primitive LFSR whose feedback is
/// complemented whenever the cells that survive the shift (cells
/// `0..l-1`) are all zero. That splices the all-zero state into the
/// m-sequence cycle, giving period `2^l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeBruijnRegister {
    base: LfsrSpec,
    state: RegisterState,
}

impl DeBruijnRegister {
    pub fn new(base: LfsrSpec, state: RegisterState) -> Result<Self> {
        base.check_state(&state)?;
        Ok(Self { base, state })
    }

    pub fn span(&self) -> usize {
        self.base.length
    }

    pub fn base(&self) -> &LfsrSpec {
        &self.base
    }

    pub fn state(&self) -> &RegisterState {
        &self.state
    }

    /// Emits cell 0 and returns the advanced register.
    pub fn step(&self) -> (bool, DeBruijnRegister) {
        let mut next = self.clone();
        let bit = next.clock();
        (bit, next)
    }

    /// In-place form of [`DeBruijnRegister::step`].
    pub fn clock(&mut self) -> bool {
        let raw = self.state.to_raw();
        let out = raw & 1 == 1;
        self.state = RegisterState::from_raw(de_bruijn_next(&self.base, raw), self.base.length);
        out
    }

    /// The next `count` control bits.
    pub fn output(&self, count: usize) -> BitSequence {
        let mut raw = self.state.to_raw();
        let mut out = BitVector::with_capacity(count);
        for _ in 0..count {
            out.push(raw & 1 == 1);
            raw = de_bruijn_next(&self.base, raw);
        }
        out
    }
}

#[inline]
pub(crate) fn de_bruijn_next(base: &LfsrSpec, state: u64) -> u64 {
    let len = base.length;
    let mut fb = (state & base.taps).count_ones() as u64 & 1;
    if state & low_mask(len - 1) == 0 {
        fb ^= 1;
    }
    ((state << 1) | fb) & low_mask(len)
}
