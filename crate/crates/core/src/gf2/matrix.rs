use std::fmt;

use super::bitvec::BitVector;
use crate::error::{Error, Result};

/// A dense matrix over GF(2), stored as packed rows.
///
/// State vectors are row vectors multiplied on the right, so a register
/// transition reads `next = state · T` (see [`BitMatrix::apply_row`]).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVector::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from its rows; all rows must share one length.
    pub fn from_rows(rows: Vec<BitVector>) -> Result<Self> {
        let cols = rows.first().map_or(0, BitVector::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.rows[i].set(j, v)
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    /// Exact product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols,
                other.rows(),
                other.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| combine_rows(r, other))
            .collect();
        Ok(BitMatrix {
            rows,
            cols: other.cols,
        })
    }

    /// `self^t` by repeated squaring; `self^0` is the identity.
    pub fn pow(&self, mut t: u64) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows(),
                cols: self.cols,
            });
        }
        let mut result = BitMatrix::identity(self.cols);
        let mut base = self.clone();
        while t > 0 {
            if t & 1 == 1 {
                result = result.mul(&base)?;
            }
            t >>= 1;
            if t > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Row vector times matrix: `v · self`.
    pub fn apply_row(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "row vector of length {} against {} rows",
                v.len(),
                self.rows()
            )));
        }
        Ok(combine_rows(v, self))
    }

    /// Matrix times column vector: `self · v`.
    pub fn apply_col(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "column vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        self.rows.iter().map(|r| r.dot(v)).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for i in 0..self.rows() {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row.get(col) {
                    row.xor_words(pivot.words());
                }
            }
            rank += 1;
        }
        rank
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Result<Option<BitMatrix>> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows(),
                cols: self.cols,
            });
        }
        let n = self.cols;
        let mut a = self.rows.clone();
        let mut inv = BitMatrix::identity(n).rows;
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| a[i].get(col)) else {
                return Ok(None);
            };
            a.swap(col, p);
            inv.swap(col, p);
            let (pa, pi) = (a[col].clone(), inv[col].clone());
            for i in 0..n {
                if i != col && a[i].get(col) {
                    a[i].xor_words(pa.words());
                    inv[i].xor_words(pi.words());
                }
            }
        }
        Ok(Some(BitMatrix { rows: inv, cols: n }))
    }
}

/// XOR of the rows of `m` selected by the set bits of `v`.
fn combine_rows(v: &BitVector, m: &BitMatrix) -> BitVector {
    let mut acc = BitVector::zeros(m.cols);
    for (i, bit) in v.iter().enumerate() {
        if bit {
            acc.xor_words(m.rows[i].words());
        }
    }
    acc
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Outcome of [`solve_linear_system`]. Rank deficiency is data, not an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(BitVector),
    NoSolution,
    Underdetermined { rank: usize },
}

/// Solves `a · x = rhs` by Gaussian elimination on the augmented matrix.
pub fn solve_linear_system(a: &BitMatrix, rhs: &BitVector) -> Result<Solution> {
    if a.rows() != rhs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} equations but right-hand side of length {}",
            a.rows(),
            rhs.len()
        )));
    }
    let cols = a.cols();
    let mut aug: Vec<BitVector> = a
        .rows
        .iter()
        .zip(rhs.iter())
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b);
            row
        })
        .collect();

    let mut pivots = Vec::with_capacity(cols);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..aug.len()).find(|&i| aug[i].get(col)) else {
            continue;
        };
        aug.swap(rank, p);
        let pivot = aug[rank].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != rank && row.get(col) {
                row.xor_words(pivot.words());
            }
        }
        pivots.push(col);
        rank += 1;
    }

    // A zero row with a set right-hand side is an inconsistency.
    if aug[rank..].iter().any(|r| r.get(cols)) {
        return Ok(Solution::NoSolution);
    }
    if rank < cols {
        return Ok(Solution::Underdetermined { rank });
    }
    let mut x = BitVector::zeros(cols);
    for (row, &col) in aug.iter().zip(&pivots) {
        x.set(col, row.get(cols));
    }
    Ok(Solution::Unique(x))
}
