//! Cryptanalysis workbench for the Alternating Step(r,s) generator.
//!
//! The crate is layered bottom-up:
//!
//! * [`gf2`]: bit vectors, bit matrices, linear systems and polynomials over GF(2).
//! * [`field`]: GF(2^m) arithmetic, trace, minimal polynomials, primitivity.
//! * [`registers`]: LFSRs with jump clocking, de Bruijn control register, decimation.
//! * [`sequence`]: Berlekamp-Massey and period detection.
//! * [`asg`]: the ASG(r,s) keystream generator and its classical-ASG reduction.
//! * [`attack`]: control-register search, stream reconstruction, model fitting,
//!   trace-based recovery of the jumps, and a brute-force key oracle.
//! * [`complexity`]: closed-form attack complexity estimates in log2 units.
//! * [`io`]: parameter, key, report and bitstream file formats.
//!
//! ```
//! use asg_core::asg::{keystream, reduce, classical_asg_keystream, AsgKey, AsgParams};
//! use asg_core::gf2::BinaryPolynomial;
//!
//! let params = AsgParams {
//!     l: 3, m: 3, n: 4,
//!     poly_a: BinaryPolynomial::from_mask(0b1011),
//!     poly_b: BinaryPolynomial::from_mask(0b1011),
//!     poly_c: BinaryPolynomial::from_mask(0b1_0011),
//!     strict: true,
//! };
//! let key = AsgKey {
//!     state_a: "101".parse().unwrap(),
//!     state_b: "110".parse().unwrap(),
//!     state_c: "0111".parse().unwrap(),
//!     r: 5,
//!     s: 11,
//! };
//! let z = keystream(&params, &key, 64).unwrap();
//! let model = reduce(&params, &key).unwrap();
//! assert_eq!(classical_asg_keystream(&model, 64).unwrap(), z);
//! ```

pub mod asg;
pub mod attack;
pub mod complexity;
pub mod error;
pub mod field;
pub mod gf2;
pub mod io;
pub mod registers;
pub mod sequence;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
