//! Dense GF(2) vectors and matrices.
//!
//! Matrices are stored row-major with each row packed into 64-bit words, so
//! row additions and vector-matrix products are word-parallel XORs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector over GF(2), one byte per bit (each byte is 0 or 1).
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// Builds a vector from 0/1 values; any other byte is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Domain(format!(
                "bit {pos} has value {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(Self(bits.to_vec()))
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        self.0[i] = bit & 1;
    }

    pub fn push(&mut self, bit: u8) {
        self.0.push(bit & 1);
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> Result<u8> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "dot product of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(0, |acc, (a, b)| acc ^ (a & b)))
    }

    /// Row vector times matrix: `self · m`.
    pub fn mul_matrix(&self, m: &BitMatrix) -> Result<BitVector> {
        if self.len() != m.rows() {
            return Err(Error::Shape(format!(
                "vector of length {} times {}x{} matrix",
                self.len(),
                m.rows(),
                m.cols()
            )));
        }
        let mut acc = vec![0u64; m.words_per_row];
        for (r, &bit) in self.0.iter().enumerate() {
            if bit == 1 {
                for (a, w) in acc.iter_mut().zip(m.row_words(r)) {
                    *a ^= w;
                }
            }
        }
        Ok(BitVector(
            (0..m.cols())
                .map(|c| ((acc[c / 64] >> (c % 64)) & 1) as u8)
                .collect(),
        ))
    }

    /// Subvector at the given positions, in the order listed.
    pub fn select(&self, idx: &[usize]) -> Result<BitVector> {
        idx.iter()
            .map(|&i| {
                self.0.get(i).copied().ok_or(Error::Bounds {
                    index: i,
                    len: self.len(),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(BitVector)
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl From<Vec<u8>> for BitVector {
    /// Values are reduced mod 2.
    fn from(bits: Vec<u8>) -> Self {
        Self(bits.into_iter().map(|b| b & 1).collect())
    }
}

/// A dense `rows × cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from nested rows of 0/1 values.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::Domain(format!("entry ({r},{c}) = {v}")));
                }
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    /// The 2×2 polarization kernel `[[1,0],[1,1]]`.
    pub fn polar_kernel() -> Self {
        Self::from_rows(&[vec![1, 0], vec![1, 1]]).expect("static kernel")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        debug_assert!(r < self.rows && c < self.cols);
        ((self.data[r * self.words_per_row + c / 64] >> (c % 64)) & 1) as u8
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words_per_row + c / 64];
        let mask = 1u64 << (c % 64);
        if v & 1 == 1 {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector((0..self.cols).map(|c| self.get(r, c)).collect())
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector((0..self.rows).map(|r| self.get(r, c)).collect())
    }

    /// Positions of the ones in column `c`.
    pub fn column_support(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c) == 1).collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) == 1 {
                    t.set(c, r, 1);
                }
            }
        }
        t
    }

    /// GF(2) product `self · other`.
    pub fn mat_mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) == 1 {
                    let (src, dst) = (other.row_words(k).to_vec(), out.row_words_mut(r));
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Submatrix with the given row and column indices, in the order listed.
    pub fn slice(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<BitMatrix> {
        if let Some(&r) = row_idx.iter().find(|&&r| r >= self.rows) {
            return Err(Error::Bounds {
                index: r,
                len: self.rows,
            });
        }
        if let Some(&c) = col_idx.iter().find(|&&c| c >= self.cols) {
            return Err(Error::Bounds {
                index: c,
                len: self.cols,
            });
        }
        let mut out = BitMatrix::zeros(row_idx.len(), col_idx.len());
        for (i, &r) in row_idx.iter().enumerate() {
            for (j, &c) in col_idx.iter().enumerate() {
                if self.get(r, c) == 1 {
                    out.set(i, j, 1);
                }
            }
        }
        Ok(out)
    }

    /// Selects whole columns; shorthand for `slice(all_rows, col_idx)`.
    pub fn select_columns(&self, col_idx: &[usize]) -> Result<BitMatrix> {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.slice(&rows, col_idx)
    }

    /// Selects whole rows; shorthand for `slice(row_idx, all_cols)`.
    pub fn select_rows(&self, row_idx: &[usize]) -> Result<BitMatrix> {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.slice(row_idx, &cols)
    }

    /// The `n`-th Kronecker power of `base`; the 0-th power is the 1×1 identity.
    pub fn kron_power(base: &BitMatrix, n: u32) -> BitMatrix {
        let mut acc = BitMatrix::identity(1);
        for _ in 0..n {
            acc = acc.kron(base);
        }
        acc
    }

    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) == 1 {
                    for i in 0..other.rows {
                        for j in 0..other.cols {
                            if other.get(i, j) == 1 {
                                out.set(r * other.rows + i, c * other.cols + j, 1);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Minimum Hamming weight over the non-zero rows, or 0 if every row is zero.
    pub fn min_nonzero_row_weight(&self) -> usize {
        (0..self.rows)
            .map(|r| self.row_weight(r))
            .filter(|&w| w > 0)
            .min()
            .unwrap_or(0)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols.min(r)).all(|c| self.get(r, c) == 0))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|r| ((r + 1)..self.cols).all(|c| self.get(r, c) == 0))
    }

    /// Rank over GF(2) by forward elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, c) == 1) else {
                continue;
            };
            m.swap_rows(p, rank);
            let pivot = m.row_words(rank).to_vec();
            for r in 0..m.rows {
                if r != rank && m.get(r, c) == 1 {
                    for (d, s) in m.row_words_mut(r).iter_mut().zip(&pivot) {
                        *d ^= s;
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words_per_row;
        for k in 0..w {
            self.data.swap(a * w + k, b * w + k);
        }
    }

    /// Plain-text form: `"rows cols"` on the first line, then one line of
    /// `0`/`1` characters per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                s.push(if self.get(r, c) == 1 { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<BitMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad dimension {t:?}")))
            })
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("bad header {header:?}")));
        };
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {r}")))?
                .trim();
            if line.len() != cols {
                return Err(Error::Parse(format!(
                    "row {r} has {} characters, expected {cols}",
                    line.len()
                )));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, 1),
                    other => return Err(Error::Parse(format!("bad character {other:?}"))),
                }
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "\n  ")?;
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c))?;
            }
        }
        Ok(())
    }
}

/// In-place polar transform `x = u · F^{⊗n}` for a slice whose length is a
/// power of two.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two() || n == 0);
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for k in block..block + half {
                bits[k] ^= bits[k + half];
            }
        }
        half *= 2;
    }
}
