use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A packed vector over GF(2).
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. Bits past `len` are
/// always zero, so the derived equality is bitwise equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

/// Shorter vectors first, then lexicographic from bit 0.
impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len.cmp(&other.len).then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered bits of a keystream or register output. Same representation as a
/// state vector.
pub type BitSequence = BitVector;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(words_for(bits)),
            len: 0,
        }
    }

    /// Builds a vector of `len` bits from the low bits of `mask` (bit `i` of
    /// the mask becomes element `i`). `len` must be at most 64.
    pub fn from_u64(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = mask & low_mask(len);
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`]; `None` if longer than 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=64 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let m = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let b = self.get(i);
        self.set(i, !b);
    }

    pub fn push(&mut self, value: bool) {
        if self.len & 63 == 0 {
            self.words.push(0);
        }
        self.len += 1;
        let i = self.len - 1;
        if value {
            self.words[i >> 6] |= 1 << (i & 63);
        }
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { v: self, pos: 0 }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// The first `n` bits (or the whole vector when shorter).
    pub fn prefix(&self, n: usize) -> Self {
        self.range(0, n.min(self.len))
    }

    /// Bits `start..end`.
    pub fn range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.len);
        (start..end).map(|i| self.get(i)).collect()
    }

    /// In-place XOR with a vector of the same length.
    pub fn xor_assign(&mut self, other: &Self) -> Result<(), Error> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch(format!(
                "xor of lengths {} and {}",
                self.len, other.len
            )));
        }
        self.xor_words(&other.words);
        Ok(())
    }

    #[inline]
    pub(crate) fn xor_words(&mut self, words: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(words) {
            *a ^= *b;
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Self) -> Result<bool, Error> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch(format!(
                "dot of lengths {} and {}",
                self.len, other.len
            )));
        }
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones & 1 == 1)
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

pub struct Iter<'a> {
    v: &'a BitVector,
    pos: usize,
}

impl Iterator for Iter<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        if self.pos < self.v.len {
            self.pos += 1;
            Some(self.v.get(self.pos - 1))
        } else {
            None
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.v.len - self.pos;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter<'_> {}

impl<'a> IntoIterator for &'a BitVector {
    type Item = bool;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut v = BitVector::new();
        v.extend(iter);
        v
    }
}

impl Extend<bool> for BitVector {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        for b in iter {
            self.push(b);
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(\"{self}\")")
    }
}

/// Renders as a string of `0`/`1`, element 0 first.
impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses `0`/`1` characters, ignoring whitespace.
impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("unexpected character {other:?} in bit string"))),
            })
            .collect()
    }
}
