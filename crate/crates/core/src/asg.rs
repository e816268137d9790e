//! The Alternating Step(r,s) generator and its reduction to a classical
//! alternating step generator.
//!
//! Register A is a span-`l` de Bruijn register read at cell 0. Registers B
//! and C are primitive LFSRs of lengths `m` and `n` read at their last cell.
//! The first output is `z_0 = b_0 ⊕ c_0`; afterwards each step reads the
//! control bit `a_t`, jumps B by `r` clocks when it is 1 and C by `s` clocks
//! otherwise, clocks A once and emits the new XOR of the two outputs.
//!
//! Because B is only ever observed every `r`-th clock, its visible sequence
//! is the decimation `β_t = b_(rt)`, itself an m-sequence whenever
//! `gcd(r, 2^m - 1) = 1`. [`reduce`] builds regular registers for `β` and
//! `λ` so that a plain stop/go ASG over them gives the same keystream.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{gcd, is_primitive, FieldContext};
use crate::gf2::{low_mask, BinaryPolynomial, BitSequence, BitVector};
use crate::registers::{de_bruijn_next, DeBruijnRegister, JumpRegister, LfsrSpec, RegisterState};

/// Public structure: register lengths and feedback polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AsgParams {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    /// Base polynomial of the de Bruijn control register.
    pub poly_a: BinaryPolynomial,
    pub poly_b: BinaryPolynomial,
    pub poly_c: BinaryPolynomial,
    /// Enforces `gcd(m, n) = 1`, `gcd(r, 2^m-1) = 1` and `gcd(s, 2^n-1) = 1`.
    pub strict: bool,
}

/// The secret key: three initial states and the two jump lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AsgKey {
    pub state_a: BitVector,
    pub state_b: BitVector,
    pub state_c: BitVector,
    pub r: u64,
    pub s: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Register {
    A,
    B,
    C,
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Register::A => "A",
            Register::B => "B",
            Register::C => "C",
        })
    }
}

/// A single violated constraint. Validation reports every one it finds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    ZeroLength(Register),
    DegreeMismatch { register: Register, length: usize, degree: Option<usize> },
    NotPrimitive(Register),
    LengthsNotCoprime { m: usize, n: usize, gcd: u64 },
    StateLength { register: Register, expected: usize, actual: usize },
    ZeroState(Register),
    JumpIsZero { register: Register },
    JumpNotCoprime { register: Register, jump: u64, period: u64, gcd: u64 },
    Unsupported(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroLength(r) => write!(f, "register {r} has length 0"),
            Violation::DegreeMismatch { register, length, degree } => write!(
                f,
                "register {register}: polynomial degree {} does not match length {length}",
                degree.map_or("-inf".to_string(), |d| d.to_string())
            ),
            Violation::NotPrimitive(r) => write!(f, "register {r}: feedback polynomial is not primitive"),
            Violation::LengthsNotCoprime { m, n, gcd } => write!(f, "gcd(m, n) = gcd({m}, {n}) = {gcd}"),
            Violation::StateLength { register, expected, actual } => write!(
                f,
                "register {register}: state has {actual} cells, expected {expected}"
            ),
            Violation::ZeroState(r) => write!(f, "register {r}: all-zero initial state"),
            Violation::JumpIsZero { register } => {
                write!(f, "register {register}: jump is a multiple of the sequence period")
            }
            Violation::JumpNotCoprime { register, jump, period, gcd } => write!(
                f,
                "register {register}: gcd({jump}, {period}) = {gcd}"
            ),
            Violation::Unsupported(msg) => f.write_str(msg),
        }
    }
}

impl AsgParams {
    /// Period `2^len - 1` of the m-sequences of B (`Register::B`) or C.
    pub fn period(&self, reg: Register) -> u64 {
        let len = match reg {
            Register::A => return 1 << self.l,
            Register::B => self.m,
            Register::C => self.n,
        };
        (1u64 << len) - 1
    }

    /// Structural checks that do not involve a key.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (reg, len, poly) in [
            (Register::A, self.l, &self.poly_a),
            (Register::B, self.m, &self.poly_b),
            (Register::C, self.n, &self.poly_c),
        ] {
            if len == 0 {
                out.push(Violation::ZeroLength(reg));
                continue;
            }
            if poly.degree() != Some(len) {
                out.push(Violation::DegreeMismatch {
                    register: reg,
                    length: len,
                    degree: poly.degree(),
                });
                continue;
            }
            match is_primitive(poly) {
                Ok(true) => {}
                Ok(false) => out.push(Violation::NotPrimitive(reg)),
                Err(e) => out.push(Violation::Unsupported(format!("register {reg}: {e}"))),
            }
        }
        if self.strict && self.m > 0 && self.n > 0 {
            let g = gcd(self.m as u64, self.n as u64);
            if g != 1 {
                out.push(Violation::LengthsNotCoprime {
                    m: self.m,
                    n: self.n,
                    gcd: g,
                });
            }
        }
        out
    }

    pub fn spec(&self, reg: Register) -> Result<LfsrSpec> {
        LfsrSpec::new(
            match reg {
                Register::A => &self.poly_a,
                Register::B => &self.poly_b,
                Register::C => &self.poly_c,
            }
            .clone(),
        )
    }

    /// `3(m+n)`, the fewest keystream bits the attack accepts.
    pub fn min_keystream_len(&self) -> usize {
        3 * (self.m + self.n)
    }
}

impl AsgKey {
    /// Copy with `r`, `s` reduced into `[0, 2^m-1)` and `[0, 2^n-1)`.
    pub fn normalized(&self, params: &AsgParams) -> AsgKey {
        let mut k = self.clone();
        if params.m > 0 && params.m < 64 {
            k.r %= params.period(Register::B);
        }
        if params.n > 0 && params.n < 64 {
            k.s %= params.period(Register::C);
        }
        k
    }
}

/// A uniformly random valid key, by rejection sampling on the nonzero and
/// gcd constraints. Fails if `params` itself is invalid.
pub fn random_key<R: Rng + ?Sized>(params: &AsgParams, rng: &mut R) -> Result<AsgKey> {
    let v = params.violations();
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    if params.l > 64 || params.m > 63 || params.n > 63 {
        return Err(Error::Unsupported("random keys need l <= 64 and m, n <= 63".into()));
    }
    let nonzero = |rng: &mut R, len: usize| loop {
        let v = BitVector::from_u64(rng.random::<u64>() & low_mask(len), len);
        if !v.is_zero() {
            break v;
        }
    };
    let jump = |rng: &mut R, period: u64| loop {
        let j = rng.random_range(1..period.max(2));
        if !params.strict || gcd(j, period) == 1 {
            break j;
        }
    };
    Ok(AsgKey {
        state_a: BitVector::from_u64(rng.random::<u64>() & low_mask(params.l), params.l),
        state_b: nonzero(rng, params.m),
        state_c: nonzero(rng, params.n),
        r: jump(rng, params.period(Register::B)),
        s: jump(rng, params.period(Register::C)),
    })
}

/// Every violated constraint of `params` together with `key`; empty means
/// valid. Jumps are reduced modulo the register period before checking.
pub fn validate(params: &AsgParams, key: &AsgKey) -> Vec<Violation> {
    let mut out = params.violations();
    let key = key.normalized(params);
    for (reg, len, st) in [
        (Register::A, params.l, &key.state_a),
        (Register::B, params.m, &key.state_b),
        (Register::C, params.n, &key.state_c),
    ] {
        if st.len() != len {
            out.push(Violation::StateLength {
                register: reg,
                expected: len,
                actual: st.len(),
            });
        } else if reg != Register::A && st.is_zero() {
            out.push(Violation::ZeroState(reg));
        }
    }
    for (reg, len, jump) in [(Register::B, params.m, key.r), (Register::C, params.n, key.s)] {
        if len == 0 || len >= 64 {
            continue;
        }
        let period = params.period(reg);
        if jump == 0 {
            out.push(Violation::JumpIsZero { register: reg });
        } else if params.strict {
            let g = gcd(jump, period);
            if g != 1 {
                out.push(Violation::JumpNotCoprime {
                    register: reg,
                    jump,
                    period,
                    gcd: g,
                });
            }
        }
    }
    out
}

fn ensure_valid(params: &AsgParams, key: &AsgKey) -> Result<AsgKey> {
    let v = validate(params, key);
    if v.is_empty() {
        Ok(key.normalized(params))
    } else {
        Err(Error::Validation(v))
    }
}

/// Streaming keystream generator. Works both for ASG(r,s) and, with unit
/// jumps, for the classical ASG.
#[derive(Clone, Debug)]
pub struct AsgGenerator {
    control_base: LfsrSpec,
    control: u64,
    b: JumpRegister,
    c: JumpRegister,
    started: bool,
    beta_index: u64,
    lambda_index: u64,
}

impl AsgGenerator {
    pub fn new(params: &AsgParams, key: &AsgKey) -> Result<Self> {
        let key = ensure_valid(params, key)?;
        Self::from_registers(
            DeBruijnRegister::new(params.spec(Register::A)?, RegisterState::new(key.state_a))?,
            &params.spec(Register::B)?,
            &RegisterState::new(key.state_b),
            key.r,
            &params.spec(Register::C)?,
            &RegisterState::new(key.state_c),
            key.s,
        )
    }

    pub fn from_registers(
        control: DeBruijnRegister,
        b_spec: &LfsrSpec,
        b_state: &RegisterState,
        r: u64,
        c_spec: &LfsrSpec,
        c_state: &RegisterState,
        s: u64,
    ) -> Result<Self> {
        Ok(Self {
            control: control.state().to_raw(),
            control_base: control.base().clone(),
            b: JumpRegister::new(b_spec, b_state, r)?,
            c: JumpRegister::new(c_spec, c_state, s)?,
            started: false,
            beta_index: 0,
            lambda_index: 0,
        })
    }

    pub(crate) fn from_parts(control_base: LfsrSpec, control: u64, b: JumpRegister, c: JumpRegister) -> Self {
        Self {
            control_base,
            control,
            b,
            c,
            started: false,
            beta_index: 0,
            lambda_index: 0,
        }
    }

    /// The next keystream bit.
    pub fn next_bit(&mut self) -> bool {
        if self.started {
            if self.control & 1 == 1 {
                self.b.advance();
                self.beta_index += 1;
            } else {
                self.c.advance();
                self.lambda_index += 1;
            }
            self.control = de_bruijn_next(&self.control_base, self.control);
        } else {
            self.started = true;
        }
        self.b.output() ^ self.c.output()
    }

    /// The control bit that will steer the next step.
    pub fn control_bit(&self) -> bool {
        self.control & 1 == 1
    }

    /// Index `p` of the current bit of `β`, i.e. the number of B jumps so far.
    pub fn beta_index(&self) -> u64 {
        self.beta_index
    }

    /// Index `q` of the current bit of `λ`.
    pub fn lambda_index(&self) -> u64 {
        self.lambda_index
    }

    /// Current outputs `(β_p, λ_q)`.
    pub fn generating_outputs(&self) -> (bool, bool) {
        (self.b.output(), self.c.output())
    }

    pub fn take_bits(&mut self, count: usize) -> BitSequence {
        let mut out = BitVector::with_capacity(count);
        for _ in 0..count {
            out.push(self.next_bit());
        }
        out
    }
}

impl Iterator for AsgGenerator {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        Some(self.next_bit())
    }
}

/// `count` bits of ASG(r,s) output.
pub fn keystream(params: &AsgParams, key: &AsgKey, count: usize) -> Result<BitSequence> {
    Ok(AsgGenerator::new(params, key)?.take_bits(count))
}

/// A classical ASG equivalent to a given ASG(r,s) instance: regular
/// registers for the decimated sequences plus the unchanged control register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedModel {
    pub beta_spec: LfsrSpec,
    pub beta_state: RegisterState,
    pub lambda_spec: LfsrSpec,
    pub lambda_state: RegisterState,
    pub control: DeBruijnRegister,
}

/// `count` bits of a classical (stop/go) ASG over `model`.
pub fn classical_asg_keystream(model: &ReducedModel, count: usize) -> Result<BitSequence> {
    if model.beta_state.is_zero() {
        return Err(Error::DegenerateState("all-zero beta register".into()));
    }
    if model.lambda_state.is_zero() {
        return Err(Error::DegenerateState("all-zero lambda register".into()));
    }
    Ok(AsgGenerator::from_registers(
        model.control.clone(),
        &model.beta_spec,
        &model.beta_state,
        1,
        &model.lambda_spec,
        &model.lambda_state,
        1,
    )?
    .take_bits(count))
}

/// Replaces the jumping registers by regular ones: feedback is the minimal
/// polynomial of `α^r` (resp. `α^s`), initial state the first `m` (resp. `n`)
/// decimated output bits.
pub fn reduce(params: &AsgParams, key: &AsgKey) -> Result<ReducedModel> {
    let key = ensure_valid(params, key)?;
    let (beta_spec, beta_state) = decimated_register(
        &params.spec(Register::B)?,
        &RegisterState::new(key.state_b.clone()),
        key.r,
    )?;
    let (lambda_spec, lambda_state) = decimated_register(
        &params.spec(Register::C)?,
        &RegisterState::new(key.state_c.clone()),
        key.s,
    )?;
    Ok(ReducedModel {
        beta_spec,
        beta_state,
        lambda_spec,
        lambda_state,
        control: DeBruijnRegister::new(params.spec(Register::A)?, RegisterState::new(key.state_a))?,
    })
}

fn decimated_register(
    spec: &LfsrSpec,
    state: &RegisterState,
    jump: u64,
) -> Result<(LfsrSpec, RegisterState)> {
    let field = FieldContext::new(spec.feedback())?;
    let feedback = field.alpha().pow(jump).minimal_polynomial();
    let out_spec = LfsrSpec::new(feedback)?;
    if out_spec.length() != spec.length() {
        return Err(Error::Unsupported(format!(
            "decimation by {jump} does not preserve the register length"
        )));
    }
    let mut reg = JumpRegister::new(spec, state, jump)?;
    let mut prefix = BitVector::with_capacity(spec.length());
    for _ in 0..spec.length() {
        prefix.push(reg.output());
        reg.advance();
    }
    Ok((out_spec, RegisterState::from_output_prefix(&prefix)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registers::decimate;

    pub(crate) fn params_334() -> AsgParams {
        AsgParams {
            l: 3,
            m: 3,
            n: 4,
            poly_a: BinaryPolynomial::from_mask(0b1011),
            poly_b: BinaryPolynomial::from_mask(0b1011),
            poly_c: BinaryPolynomial::from_mask(0b1_0011),
            strict: true,
        }
    }

    fn key(a: &str, b: &str, c: &str, r: u64, s: u64) -> AsgKey {
        AsgKey {
            state_a: a.parse().unwrap(),
            state_b: b.parse().unwrap(),
            state_c: c.parse().unwrap(),
            r,
            s,
        }
    }

    #[test]
    fn validation_examples() {
        let p = params_334();
        assert!(validate(&p, &key("101", "100", "0110", 2, 2)).is_empty());

        let mut p4 = p.clone();
        p4.m = 4;
        p4.poly_b = BinaryPolynomial::from_mask(0b1_0011);
        p4.strict = false;
        let v = validate(&p4, &key("101", "1000", "0110", 3, 2));
        assert!(v.is_empty(), "{v:?}");
        p4.strict = true;
        let v = validate(&p4, &key("101", "1000", "0110", 3, 1));
        assert!(v.contains(&Violation::JumpNotCoprime {
            register: Register::B,
            jump: 3,
            period: 15,
            gcd: 3
        }));
        assert!(v.contains(&Violation::LengthsNotCoprime { m: 4, n: 4, gcd: 4 }));

        let mut p46 = p.clone();
        p46.m = 4;
        p46.n = 6;
        p46.poly_b = BinaryPolynomial::from_mask(0b1_0011);
        p46.poly_c = BinaryPolynomial::from_mask(0b100_0011);
        assert!(p46
            .violations()
            .contains(&Violation::LengthsNotCoprime { m: 4, n: 6, gcd: 2 }));
    }

    #[test]
    fn validation_lists_everything() {
        let mut p = params_334();
        p.poly_c = BinaryPolynomial::from_mask(0b1_1111);
        let v = validate(&p, &key("10", "000", "0110", 7, 5));
        assert!(v.contains(&Violation::NotPrimitive(Register::C)));
        assert!(v.contains(&Violation::StateLength { register: Register::A, expected: 3, actual: 2 }));
        assert!(v.contains(&Violation::ZeroState(Register::B)));
        assert!(v.contains(&Violation::JumpIsZero { register: Register::B }));
        assert!(v.contains(&Violation::JumpNotCoprime { register: Register::C, jump: 5, period: 15, gcd: 5 }));
    }

    #[test]
    fn jumps_reduce_modulo_period() {
        let p = params_334();
        let k = key("101", "100", "0110", 2, 2);
        let k_big = key("101", "100", "0110", 2 + 7 * 3, 2 + 15);
        assert!(validate(&p, &k_big).is_empty());
        assert_eq!(keystream(&p, &k, 100).unwrap(), keystream(&p, &k_big, 100).unwrap());
    }

    #[test]
    fn keystream_basics() {
        let p = params_334();
        let k = key("101", "100", "0110", 2, 2);
        assert!(keystream(&p, &k, 0).unwrap().is_empty());
        let z = keystream(&p, &k, 1).unwrap();
        // b_0 is cell 2 of B, c_0 is cell 3 of C.
        assert!(!z.get(0));
        let k2 = key("011", "001", "0110", 2, 2);
        assert!(keystream(&p, &k2, 1).unwrap().get(0));
        let bad = key("101", "000", "0110", 2, 2);
        assert!(matches!(keystream(&p, &bad, 4), Err(Error::Validation(_))));
    }

    #[test]
    fn one_register_advances_per_step() {
        let p = params_334();
        let mut g = AsgGenerator::new(&p, &key("110", "101", "1001", 5, 7)).unwrap();
        g.next_bit();
        for t in 1..200u64 {
            g.next_bit();
            assert_eq!(g.beta_index() + g.lambda_index(), t);
        }
    }

    #[test]
    fn reduce_examples() {
        let p = params_334();
        let m1 = reduce(&p, &key("101", "100", "0110", 1, 1)).unwrap();
        assert_eq!(m1.beta_spec.feedback(), &p.poly_b);
        assert_eq!(m1.lambda_spec.feedback(), &p.poly_c);
        assert_eq!(m1.beta_state.cells().to_string(), "100");

        let m3 = reduce(&p, &key("101", "100", "0110", 3, 1)).unwrap();
        assert_eq!(m3.beta_spec.feedback(), &BinaryPolynomial::from_mask(0b1101));
        let m2 = reduce(&p, &key("101", "100", "0110", 2, 1)).unwrap();
        assert_eq!(m2.beta_spec.feedback(), &BinaryPolynomial::from_mask(0b1011));
    }

    #[test]
    fn reduced_state_is_decimated_output() {
        let p = params_334();
        let k = key("101", "110", "0111", 5, 11);
        let model = reduce(&p, &k).unwrap();
        let b_out = p
            .spec(Register::B)
            .unwrap()
            .output_sequence(&RegisterState::new(k.state_b.clone()), 5 * 40)
            .unwrap();
        let beta = decimate(&b_out, 5).prefix(40);
        assert_eq!(model.beta_spec.output_sequence(&model.beta_state, 40).unwrap(), beta);
        assert_eq!(
            classical_asg_keystream(&model, 500).unwrap(),
            keystream(&p, &k, 500).unwrap()
        );
    }

    #[test]
    fn classical_rejects_zero_lambda() {
        let p = params_334();
        let mut model = reduce(&p, &key("101", "100", "0110", 1, 1)).unwrap();
        model.lambda_state = RegisterState::new(BitVector::zeros(4));
        assert!(matches!(
            classical_asg_keystream(&model, 10),
            Err(Error::DegenerateState(_))
        ));
    }
}
