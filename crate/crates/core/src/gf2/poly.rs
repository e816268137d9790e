use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// A polynomial in GF(2)[x]. Bit `i` of the coefficient mask is the
/// coefficient of `x^i`; the mask is kept without trailing zero words.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryPolynomial {
    words: Vec<u64>,
}

impl BinaryPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_mask(1)
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut p = Self::zero();
        p.set_coeff(k, true);
        p
    }

    pub fn from_mask(mask: u64) -> Self {
        let mut p = Self { words: vec![mask] };
        p.normalize();
        p
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        let mut p = Self { words };
        p.normalize();
        p
    }

    /// Sum of `x^e` for each listed exponent (repeats cancel).
    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = Self::zero();
        for &e in exps {
            let c = p.coeff(e);
            p.set_coeff(e, !c);
        }
        p
    }

    /// The coefficient mask when the degree is below 64.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words == [1]
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i >> 6)
            .is_some_and(|w| (w >> (i & 63)) & 1 == 1)
    }

    pub fn set_coeff(&mut self, i: usize, v: bool) {
        if self.words.len() <= i >> 6 {
            if !v {
                return;
            }
            self.words.resize((i >> 6) + 1, 0);
        }
        if v {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
        self.normalize();
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `x^len · p(1/x)`: reverses coefficients `0..=len`.
    ///
    /// Maps a connection polynomial of an LFSR of length `len` to its
    /// characteristic polynomial and back.
    pub fn reciprocal(&self, len: usize) -> Self {
        let mut r = Self::zero();
        for i in 0..=len {
            if self.coeff(i) {
                r.set_coeff(len - i, true);
            }
        }
        r
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    fn shl(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (ws, bs) = (k / 64, k % 64);
        let mut out = vec![0u64; self.words.len() + ws + 1];
        for (i, &w) in self.words.iter().enumerate() {
            out[i + ws] ^= w << bs;
            if bs != 0 {
                out[i + ws + 1] ^= w >> (64 - bs);
            }
        }
        Self::from_words(out)
    }

    fn xor_in(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        self.normalize();
    }

    /// Quotient and remainder with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let d = divisor.degree().ok_or(Error::DivisionByZero)?;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(rd) = rem.degree() {
            if rd < d {
                break;
            }
            let shift = rd - d;
            quot.set_coeff(shift, true);
            rem.xor_in(&divisor.shl(shift));
        }
        Ok((quot, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Greatest common divisor; monic automatically over GF(2).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a
    }

    /// Evaluates the polynomial at `x = 1`, i.e. the parity of its weight.
    pub fn eval_at_one(&self) -> bool {
        self.weight() % 2 == 1
    }
}

impl Add for &BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn add(self, rhs: &BinaryPolynomial) -> BinaryPolynomial {
        let mut r = self.clone();
        r.xor_in(rhs);
        r
    }
}

impl Add for BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn add(self, rhs: BinaryPolynomial) -> BinaryPolynomial {
        &self + &rhs
    }
}

impl Mul for &BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn mul(self, rhs: &BinaryPolynomial) -> BinaryPolynomial {
        let mut acc = BinaryPolynomial::zero();
        let Some(deg) = rhs.degree() else {
            return acc;
        };
        for i in 0..=deg {
            if rhs.coeff(i) {
                acc.xor_in(&self.shl(i));
            }
        }
        acc
    }
}

impl Mul for BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn mul(self, rhs: BinaryPolynomial) -> BinaryPolynomial {
        &self * &rhs
    }
}

impl fmt::Display for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(deg) = self.degree() else {
            return f.write_str("0");
        };
        let mut first = true;
        for i in (0..=deg).rev().filter(|&i| self.coeff(i)) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryPolynomial({self})")
    }
}

/// Hexadecimal coefficient mask, most significant word first.
impl fmt::LowerHex for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if f.alternate() {
            f.write_str("0x")?;
        }
        if self.words.is_empty() {
            return f.write_str("0");
        }
        let mut it = self.words.iter().rev();
        write!(f, "{:x}", it.next().unwrap())?;
        for w in it {
            write!(f, "{w:016x}")?;
        }
        Ok(())
    }
}
