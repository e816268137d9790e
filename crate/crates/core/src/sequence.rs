//! Berlekamp-Massey synthesis and period detection for binary sequences.
//!
//! Connection polynomials use the usual orientation
//! `C(x) = 1 + c_1 x + ... + c_L x^L` with `s_t = Σ c_i s_(t-i)`: the
//! coefficient of `x^i` multiplies the bit `i` steps back. The matching
//! register characteristic polynomial is the reciprocal `x^L C(1/x)`,
//! exposed as [`LfsrFit::feedback`].

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{BinaryPolynomial, BitSequence, BitVector};
use crate::registers::{LfsrSpec, RegisterState};

/// The shortest LFSR generating an analyzed sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LfsrFit {
    pub linear_complexity: usize,
    pub connection: BinaryPolynomial,
    /// The first `linear_complexity` bits of the analyzed sequence.
    pub initial_state: BitVector,
}

impl LfsrFit {
    /// Characteristic polynomial `x^L C(1/x)` of degree `L`.
    pub fn feedback(&self) -> BinaryPolynomial {
        self.connection.reciprocal(self.linear_complexity)
    }

    /// Regenerates `count` bits from the fitted register.
    pub fn generate(&self, count: usize) -> BitSequence {
        let l = self.linear_complexity;
        let taps: Vec<usize> = (1..=l).filter(|&i| self.connection.coeff(i)).collect();
        let mut out = BitVector::with_capacity(count);
        for t in 0..count {
            let bit = if t < l {
                self.initial_state.get(t)
            } else {
                taps.iter().fold(false, |acc, &i| acc ^ out.get(t - i))
            };
            out.push(bit);
        }
        out
    }

    /// The fit as a register spec plus initial state. Fails for `L = 0` or
    /// registers longer than the packed limit.
    pub fn to_register(&self) -> Result<(LfsrSpec, RegisterState)> {
        if self.linear_complexity == 0 {
            return Err(Error::DegenerateState("zero-length fitted register".into()));
        }
        let spec = LfsrSpec::new(self.feedback())?;
        Ok((spec, RegisterState::from_output_prefix(&self.initial_state)))
    }
}

/// Berlekamp-Massey over GF(2). Empty and all-zero inputs give `L = 0`.
pub fn berlekamp_massey(seq: &BitSequence) -> LfsrFit {
    let n = seq.len();
    let s: Vec<u8> = seq.iter().map(u8::from).collect();
    let mut c = vec![0u8; n + 1];
    let mut b = vec![0u8; n + 1];
    c[0] = 1;
    b[0] = 1;
    let mut l = 0usize;
    let mut shift = 1usize;

    for i in 0..n {
        let mut d = s[i];
        for j in 1..=l {
            d ^= c[j] & s[i - j];
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        if 2 * l <= i {
            let prev = c.clone();
            for j in 0..=n - shift {
                c[j + shift] ^= b[j];
            }
            l = i + 1 - l;
            b = prev;
            shift = 1;
        } else {
            for j in 0..=n - shift {
                c[j + shift] ^= b[j];
            }
            shift += 1;
        }
    }

    let mut connection = BinaryPolynomial::zero();
    for (j, &cj) in c.iter().enumerate().take(l + 1) {
        if cj == 1 {
            connection.set_coeff(j, true);
        }
    }
    LfsrFit {
        linear_complexity: l,
        connection,
        initial_state: seq.prefix(l),
    }
}

pub fn linear_complexity(seq: &BitSequence) -> usize {
    berlekamp_massey(seq).linear_complexity
}

/// The window is too short to confirm any period (it must cover two full
/// periods).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AperiodicWithinWindow;

impl fmt::Display for AperiodicWithinWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("aperiodic within window")
    }
}

/// Least `p` with `seq[t+p] == seq[t]` for every valid `t`, accepted only if
/// the window holds at least `2p` bits.
pub fn measure_period(seq: &BitSequence) -> Result<usize, AperiodicWithinWindow> {
    let n = seq.len();
    if n == 0 {
        return Err(AperiodicWithinWindow);
    }
    // Prefix function: the least period of the whole window is n - border.
    let s: Vec<bool> = seq.iter().collect();
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && s[i] != s[k] {
            k = pi[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let p = n - pi[n - 1];
    if 2 * p <= n {
        Ok(p)
    } else {
        Err(AperiodicWithinWindow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitSequence {
        s.parse().unwrap()
    }

    /// Shortest LFSR by exhaustive search over connection polynomials.
    pub(crate) fn brute_force_complexity(seq: &BitSequence) -> usize {
        let n = seq.len();
        for l in 0..=n {
            for mask in 0u64..(1 << l) {
                // mask bit i-1 is c_i
                let ok = (l..n).all(|t| {
                    let pred = (1..=l).fold(false, |acc, i| acc ^ (mask >> (i - 1) & 1 == 1 && seq.get(t - i)));
                    pred == seq.get(t)
                });
                if ok {
                    return l;
                }
            }
        }
        n
    }

    #[test]
    fn zero_and_empty() {
        assert_eq!(berlekamp_massey(&BitVector::new()).linear_complexity, 0);
        assert_eq!(berlekamp_massey(&bits("00000")).linear_complexity, 0);
    }

    #[test]
    fn m_sequence_fit() {
        let seq = bits("1001011");
        assert_eq!(brute_force_complexity(&seq), 3);
        let fit = berlekamp_massey(&seq);
        assert_eq!(fit.linear_complexity, 3);
        assert_eq!(fit.feedback(), BinaryPolynomial::from_mask(0b1011));
        assert_eq!(fit.connection, BinaryPolynomial::from_mask(0b1101));
        assert_eq!(fit.generate(7), seq);
        let (spec, st) = fit.to_register().unwrap();
        assert_eq!(spec.output_sequence(&st, 7).unwrap(), seq);
    }

    #[test]
    fn impulse() {
        let seq = bits("0001");
        assert_eq!(brute_force_complexity(&seq), 4);
        let fit = berlekamp_massey(&seq);
        assert_eq!(fit.linear_complexity, 4);
        assert_eq!(fit.generate(4), seq);
    }

    #[test]
    fn periods() {
        assert_eq!(measure_period(&bits("010101")), Ok(2));
        assert_eq!(measure_period(&bits("1111")), Ok(1));
        assert_eq!(measure_period(&bits("0001")), Err(AperiodicWithinWindow));
        assert_eq!(measure_period(&bits("1001011100")), Err(AperiodicWithinWindow));
        assert_eq!(measure_period(&bits("10010111001011")), Ok(7));
    }

    #[test]
    fn linear_complexity_matches_brute_force_on_small_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let len = rng.random_range(0..=14);
            let seq: BitSequence = (0..len).map(|_| rng.random::<bool>()).collect();
            assert_eq!(linear_complexity(&seq), brute_force_complexity(&seq), "{seq}");
        }
    }
}
