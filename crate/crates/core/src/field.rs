//! GF(2^m) arithmetic in the polynomial basis `{1, x, ..., x^(m-1)}` modulo
//! a primitive polynomial.
//!
//! The basis is fixed to the register's own characteristic polynomial, so the
//! class of `x` is the primitive element `α` whose powers drive the register:
//! an m-sequence with that characteristic polynomial is `b_t = Tr(u·α^t)` for
//! a unique nonzero `u`.

use crate::error::{Error, Result};
use crate::gf2::BinaryPolynomial;

/// Largest extension degree supported by the field and primitivity code.
pub const MAX_FIELD_DEGREE: usize = 24;

/// GF(2^m) defined by a primitive modulus of degree `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldContext {
    degree: usize,
    modulus: u64,
    /// Bit `i` is `Tr(x^i)`, so `Tr(v) = parity(v & trace_mask)`.
    trace_mask: u64,
}

/// An element of a [`FieldContext`], carried as its coefficient mask plus the
/// modulus that identifies the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldContext {
    /// Builds the field, rejecting moduli that are not primitive.
    pub fn new(modulus: &BinaryPolynomial) -> Result<Self> {
        if !is_primitive(modulus)? {
            return Err(Error::Unsupported(format!(
                "field modulus {modulus} is not primitive"
            )));
        }
        Ok(Self::new_unchecked(modulus))
    }

    fn new_unchecked(modulus: &BinaryPolynomial) -> Self {
        let degree = modulus.degree().expect("nonzero modulus");
        let mask = modulus.to_mask().expect("degree checked");
        let mut ctx = Self {
            degree,
            modulus: mask,
            trace_mask: 0,
        };
        for i in 0..degree {
            if ctx.trace_by_conjugates(1 << i) {
                ctx.trace_mask |= 1 << i;
            }
        }
        ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> BinaryPolynomial {
        BinaryPolynomial::from_mask(self.modulus)
    }

    /// Number of nonzero elements, `2^m - 1`.
    pub fn order(&self) -> u64 {
        (1u64 << self.degree) - 1
    }

    /// The element whose coefficient mask is `value` (reduced to `m` bits).
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value & ((1 << self.degree) - 1),
            modulus: self.modulus,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// The class of `x`, a root of the modulus.
    pub fn alpha(&self) -> FieldElement {
        if self.degree == 1 {
            // GF(2) modulo x+1: x reduces to 1.
            self.one()
        } else {
            self.element(0b10)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..1u64 << self.degree).map(|v| self.element(v))
    }

    /// Trace through the precomputed linear form.
    pub fn trace(&self, x: FieldElement) -> Result<bool> {
        self.check(x)?;
        Ok(self.trace_raw(x.value))
    }

    pub(crate) fn check(&self, x: FieldElement) -> Result<()> {
        if x.modulus != self.modulus {
            return Err(Error::MixedContexts);
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn trace_raw(&self, v: u64) -> bool {
        (v & self.trace_mask).count_ones() & 1 == 1
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.modulus, self.degree)
    }

    pub(crate) fn pow_raw(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.modulus, self.degree)
    }

    fn trace_by_conjugates(&self, v: u64) -> bool {
        let mut acc = 0;
        let mut c = v;
        for _ in 0..self.degree {
            acc ^= c;
            c = self.mul_raw(c, c);
        }
        debug_assert!(acc <= 1, "trace must land in GF(2)");
        acc == 1
    }
}

#[inline]
fn mul_mod(mut a: u64, mut b: u64, modulus: u64, degree: usize) -> u64 {
    let top = 1u64 << degree;
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn pow_mod(mut base: u64, mut e: u64, modulus: u64, degree: usize) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, modulus, degree);
        }
        base = mul_mod(base, base, modulus, degree);
        e >>= 1;
    }
    acc
}

impl FieldElement {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn degree(self) -> usize {
        63 - self.modulus.leading_zeros() as usize
    }

    fn same_field(self, other: Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::MixedContexts);
        }
        Ok(())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self {
            value: self.value ^ other.value,
            ..self
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self {
            value: mul_mod(self.value, other.value, self.modulus, self.degree()),
            ..self
        })
    }

    /// `self^e`, with `self^0 = 1`.
    pub fn pow(self, e: u64) -> Self {
        Self {
            value: pow_mod(self.value, e, self.modulus, self.degree()),
            ..self
        }
    }

    pub fn square(self) -> Self {
        Self {
            value: mul_mod(self.value, self.value, self.modulus, self.degree()),
            ..self
        }
    }

    /// `Tr(x) = x + x^2 + x^4 + ... + x^(2^(m-1))`, summed directly.
    pub fn trace(self) -> bool {
        let mut acc = 0;
        let mut c = self;
        for _ in 0..self.degree() {
            acc ^= c.value;
            c = c.square();
        }
        acc & 1 == 1
    }

    /// The distinct Frobenius conjugates `x, x^2, x^4, ...`.
    pub fn conjugates(self) -> Vec<FieldElement> {
        let mut out = vec![self];
        let mut c = self.square();
        while c != self {
            out.push(c);
            c = c.square();
        }
        out
    }

    /// Product of `(y - c)` over the conjugates of `self`, which has
    /// coefficients in GF(2).
    pub fn minimal_polynomial(self) -> BinaryPolynomial {
        let (modulus, degree) = (self.modulus, self.degree());
        // Coefficients in the field, lowest degree first.
        let mut coeffs: Vec<u64> = vec![1];
        for c in self.conjugates() {
            let mut next = vec![0u64; coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] ^= a;
                next[i] ^= mul_mod(a, c.value, modulus, degree);
            }
            coeffs = next;
        }
        let mut p = BinaryPolynomial::zero();
        for (i, &c) in coeffs.iter().enumerate() {
            assert!(c <= 1, "minimal polynomial coefficient outside GF(2)");
            if c == 1 {
                p.set_coeff(i, true);
            }
        }
        p
    }
}

/// Prime factors of `n` by trial division.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn check_degree(p: &BinaryPolynomial) -> Result<Option<usize>> {
    match p.degree() {
        Some(d) if d > MAX_FIELD_DEGREE => Err(Error::Unsupported(format!(
            "polynomial degree {d} exceeds the supported bound {MAX_FIELD_DEGREE}"
        ))),
        d => Ok(d),
    }
}

/// True iff `p` is irreducible over GF(2) (Rabin's test).
pub fn is_irreducible(p: &BinaryPolynomial) -> Result<bool> {
    let Some(m) = check_degree(p)? else {
        return Ok(false);
    };
    if m == 0 {
        return Ok(false);
    }
    let mask = p.to_mask().expect("degree bounded");
    // x^(2^k) mod p for k = 1..=m.
    let mut frob = Vec::with_capacity(m);
    let mut x = if m == 1 { mask ^ (1 << m) } else { 0b10 };
    let x0 = x;
    for _ in 0..m {
        x = mul_mod(x, x, mask, m);
        frob.push(x);
    }
    if frob[m - 1] != x0 {
        return Ok(false);
    }
    for q in prime_factors(m as u64) {
        let k = m / q as usize;
        let diff = BinaryPolynomial::from_mask(frob[k - 1] ^ x0);
        if !diff.gcd(p).is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `p` is irreducible and its root has order `2^deg - 1`.
pub fn is_primitive(p: &BinaryPolynomial) -> Result<bool> {
    let Some(m) = check_degree(p)? else {
        return Ok(false);
    };
    if m == 0 || !p.coeff(0) || !is_irreducible(p)? {
        return Ok(false);
    }
    if m == 1 {
        // x + 1: the root 1 generates GF(2)*.
        return Ok(true);
    }
    let mask = p.to_mask().expect("degree bounded");
    let order = (1u64 << m) - 1;
    if pow_mod(0b10, order, mask, m) != 1 {
        return Ok(false);
    }
    Ok(prime_factors(order)
        .into_iter()
        .all(|q| pow_mod(0b10, order / q, mask, m) != 1))
}

/// The primitive polynomial of the given degree with the smallest coefficient
/// mask.
pub fn first_primitive(degree: usize) -> Result<BinaryPolynomial> {
    if degree == 0 || degree > MAX_FIELD_DEGREE {
        return Err(Error::Unsupported(format!(
            "no primitive search for degree {degree}"
        )));
    }
    let top = 1u64 << degree;
    (top | 1..top << 1)
        .step_by(2)
        .map(BinaryPolynomial::from_mask)
        .find(|p| is_primitive(p).unwrap_or(false))
        .ok_or_else(|| Error::Unsupported(format!("no primitive polynomial of degree {degree}")))
}

/// Euler's totient of `2^m - 1`: the number of jump values coprime to the
/// m-sequence period.
pub fn coprime_jump_count(m: usize) -> u64 {
    let n = (1u64 << m) - 1;
    prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
