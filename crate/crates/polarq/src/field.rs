//! Exact arithmetic and dense linear algebra over prime fields F_q.
//!
//! Residues are stored as machine integers and reduced eagerly after every
//! operation. The moduli of interest are small, so there is no need for
//! Montgomery or Barrett tricks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from field and matrix operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
}

/// A validated prime modulus q >= 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    /// Validates primality (deterministic trial division) and wraps `q`.
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if is_prime(q) {
            Ok(PrimeModulus(q))
        } else {
            Err(FieldError::NotPrime(q))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.0
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        (self.0 + a % self.0 - b % self.0) % self.0
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        (self.0 - a % self.0) % self.0
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        base %= self.0;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = FieldError;
    fn try_from(q: u64) -> Result<Self, FieldError> {
        PrimeModulus::new(q)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(q: PrimeModulus) -> u64 {
        q.0
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Multiplicative inverse of `a` modulo `q` (Fermat).
pub fn field_inv(a: u64, q: PrimeModulus) -> Result<u64, FieldError> {
    let a = q.reduce(a);
    if a == 0 {
        return Err(FieldError::ZeroInverse);
    }
    Ok(q.pow(a, q.get() - 2))
}

/// A dense matrix over F_q, row-major, every entry reduced mod q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FieldMatrix {
    /// Builds a matrix from raw entries, reducing each mod q.
    pub fn new(
        rows: usize,
        cols: usize,
        entries: &[u64],
        q: PrimeModulus,
    ) -> Result<Self, FieldError> {
        if entries.len() != rows * cols {
            return Err(FieldError::Shape(format!(
                "expected {}x{} = {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        Ok(FieldMatrix {
            rows,
            cols,
            data: entries.iter().map(|&e| q.reduce(e)).collect(),
        })
    }

    /// Builds from nested row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<u64>], q: PrimeModulus) -> Result<Self, FieldError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(FieldError::Shape("ragged rows".into()));
        }
        let data: Vec<u64> = rows.iter().flatten().copied().collect();
        FieldMatrix::new(r, c, &data, q)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0u64; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        FieldMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Returns a copy with rows reordered so that row `p` of the result is
    /// row `perm[p]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> FieldMatrix {
        assert_eq!(perm.len(), self.rows);
        let mut out = FieldMatrix::zeros(self.rows, self.cols);
        for (p, &r) in perm.iter().enumerate() {
            for c in 0..self.cols {
                out.set(p, c, self.get(r, c));
            }
        }
        out
    }
}

/// Exact matrix product mod q.
pub fn mat_mul(
    a: &FieldMatrix,
    b: &FieldMatrix,
    q: PrimeModulus,
) -> Result<FieldMatrix, FieldError> {
    if a.cols != b.rows {
        return Err(FieldError::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = FieldMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for l in 0..a.cols {
            let v = a.get(i, l);
            if v == 0 {
                continue;
            }
            for j in 0..b.cols {
                let cur = out.get(i, j);
                out.set(i, j, q.add(cur, q.mul(v, b.get(l, j))));
            }
        }
    }
    Ok(out)
}

/// Row vector times matrix: out[c] = sum_r v[r] * m[r][c] mod q.
pub fn vec_mat_mul(v: &[u64], m: &FieldMatrix, q: PrimeModulus) -> Result<Vec<u64>, FieldError> {
    if v.len() != m.rows {
        return Err(FieldError::Shape(format!(
            "vector of length {} times {}x{} matrix",
            v.len(),
            m.rows,
            m.cols
        )));
    }
    let mut out = vec![0u64; m.cols];
    for (r, &x) in v.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (c, slot) in out.iter_mut().enumerate() {
            *slot = q.add(*slot, q.mul(x, m.get(r, c)));
        }
    }
    Ok(out)
}

/// Matrix inverse by Gauss-Jordan elimination with first-nonzero pivots.
pub fn mat_inverse(m: &FieldMatrix, q: PrimeModulus) -> Result<FieldMatrix, FieldError> {
    if !m.is_square() {
        return Err(FieldError::Shape(format!(
            "{}x{} matrix is not square",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = FieldMatrix::identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| a.get(r, col) != 0)
            .ok_or(FieldError::Singular)?;
        if pivot != col {
            for c in 0..n {
                let (x, y) = (a.get(col, c), a.get(pivot, c));
                a.set(col, c, y);
                a.set(pivot, c, x);
                let (x, y) = (inv.get(col, c), inv.get(pivot, c));
                inv.set(col, c, y);
                inv.set(pivot, c, x);
            }
        }
        let scale = field_inv(a.get(col, col), q)?;
        for c in 0..n {
            a.set(col, c, q.mul(a.get(col, c), scale));
            inv.set(col, c, q.mul(inv.get(col, c), scale));
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a.get(r, col);
            if factor == 0 {
                continue;
            }
            for c in 0..n {
                a.set(r, c, q.sub(a.get(r, c), q.mul(factor, a.get(col, c))));
                inv.set(r, c, q.sub(inv.get(r, c), q.mul(factor, inv.get(col, c))));
            }
        }
    }
    Ok(inv)
}

/// Rank of the matrix over F_q (row echelon).
pub fn mat_rank(m: &FieldMatrix, q: PrimeModulus) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(pivot) = (rank..a.rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        if pivot != rank {
            for c in 0..a.cols {
                let (x, y) = (a.get(rank, c), a.get(pivot, c));
                a.set(rank, c, y);
                a.set(pivot, c, x);
            }
        }
        let scale = field_inv(a.get(rank, col), q).expect("pivot is nonzero");
        for c in 0..a.cols {
            a.set(rank, c, q.mul(a.get(rank, c), scale));
        }
        for r in 0..a.rows {
            if r == rank {
                continue;
            }
            let factor = a.get(r, col);
            if factor == 0 {
                continue;
            }
            for c in 0..a.cols {
                a.set(r, c, q.sub(a.get(r, c), q.mul(factor, a.get(rank, c))));
            }
        }
        rank += 1;
    }
    rank
}
