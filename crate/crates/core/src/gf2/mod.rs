//! Exact linear algebra and polynomial arithmetic over GF(2).

mod bitvec;
mod matrix;
mod poly;

pub use bitvec::{BitSequence, BitVector, Iter};
pub(crate) use bitvec::low_mask;
pub use matrix::{solve_linear_system, BitMatrix, Solution};
pub use poly::BinaryPolynomial;
