//! Kernel validation and the column-elimination machinery behind the
//! suction reductions.
//!
//! A kernel is *mixing* when it is invertible and no row permutation of it
//! is upper triangular. Mixing is what makes the per-index entropies drift
//! apart under the recursive transform; the reduction searches below locate
//! the column where a single-step entropy comparison against a two-variable
//! sum becomes available.

use crate::field::{field_inv, mat_inverse, mat_rank, FieldError, FieldMatrix, PrimeModulus};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("matrix must be square, got {0}x{1}")]
    Shape(usize, usize),
    #[error("kernel must be invertible")]
    NotInvertible,
    #[error("missing pivot in column {0}")]
    Pivot(usize),
    #[error("kernel is not mixing")]
    NotMixing,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A validated k x k kernel together with its inverse and derived data.
#[derive(Debug, Clone)]
pub struct Kernel {
    q: PrimeModulus,
    matrix: FieldMatrix,
    inverse: FieldMatrix,
    mixing: bool,
    /// Row permutation of `matrix` that puts the column-elimination pivots
    /// on the diagonal; row `p` of `pivoted` is row `pivot_perm[p]` of
    /// `matrix`.
    pivot_perm: Vec<usize>,
    pivoted: FieldMatrix,
}

impl Kernel {
    pub fn new(matrix: FieldMatrix, q: PrimeModulus) -> Result<Self, KernelError> {
        if !matrix.is_square() {
            return Err(KernelError::Shape(matrix.rows(), matrix.cols()));
        }
        let inverse = mat_inverse(&matrix, q).map_err(|e| match e {
            FieldError::Singular => KernelError::NotInvertible,
            other => KernelError::Field(other),
        })?;
        let report = check_mixing(&matrix, q)?;
        let pivot_perm = pivot_permutation(&matrix, q)?;
        let pivoted = matrix.permute_rows(&pivot_perm);
        Ok(Kernel {
            q,
            matrix,
            inverse,
            mixing: report.mixing,
            pivot_perm,
            pivoted,
        })
    }

    pub fn q(&self) -> PrimeModulus {
        self.q
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &FieldMatrix {
        &self.inverse
    }

    pub fn is_mixing(&self) -> bool {
        self.mixing
    }

    /// The pivots-on-diagonal row permutation M' of the kernel.
    pub fn pivoted(&self) -> &FieldMatrix {
        &self.pivoted
    }

    pub fn pivot_perm(&self) -> &[usize] {
        &self.pivot_perm
    }
}

/// Result of the mixing check.
///
/// `witness`, when present, is a row permutation that upper-triangularizes
/// the matrix: placing row `witness[p]` at position `p` yields an upper
/// triangular matrix. It is present exactly when the matrix is invertible
/// but not mixing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MixingReport {
    pub invertible: bool,
    pub mixing: bool,
    pub witness: Option<Vec<usize>>,
}

/// Checks the mixing condition.
///
/// A triangularizing row permutation exists iff, with f_i the first nonzero
/// column of row i and f sorted ascending, f_(p) >= p for every position p
/// (Hall's condition for the assignment "position p needs a row with
/// f >= p"). This is O(k^2) instead of enumerating all k! permutations.
pub fn check_mixing(m: &FieldMatrix, q: PrimeModulus) -> Result<MixingReport, KernelError> {
    if !m.is_square() {
        return Err(KernelError::Shape(m.rows(), m.cols()));
    }
    let k = m.rows();
    let invertible = mat_rank(m, q) == k;

    // first nonzero column per row; an all-zero row means singular
    let firsts: Vec<Option<usize>> = (0..k).map(|r| (0..k).find(|&c| m.get(r, c) != 0)).collect();

    let mut witness = None;
    if firsts.iter().all(|f| f.is_some()) {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&r| (firsts[r].unwrap(), r));
        if order
            .iter()
            .enumerate()
            .all(|(p, &r)| firsts[r].unwrap() >= p)
        {
            witness = Some(order);
        }
    }

    let mixing = invertible && witness.is_none();
    if !invertible {
        witness = None;
    }
    if let Some(perm) = &witness {
        debug_assert!(is_upper_triangular(&m.permute_rows(perm)));
    }
    Ok(MixingReport {
        invertible,
        mixing,
        witness,
    })
}

fn is_upper_triangular(m: &FieldMatrix) -> bool {
    (0..m.rows()).all(|r| (0..r.min(m.cols())).all(|c| m.get(r, c) == 0))
}

/// Pivot rows of column-wise Gaussian elimination, one per column, chosen as
/// the first not-yet-used row with a nonzero entry after eliminating the
/// previous pivot rows. The returned permutation places the pivot row of
/// column c at position c.
pub fn pivot_permutation(m: &FieldMatrix, q: PrimeModulus) -> Result<Vec<usize>, KernelError> {
    if !m.is_square() {
        return Err(KernelError::Shape(m.rows(), m.cols()));
    }
    let k = m.rows();
    let mut a = m.clone();
    let mut used = vec![false; k];
    let mut perm = Vec::with_capacity(k);
    for col in 0..k {
        let pivot = (0..k)
            .find(|&r| !used[r] && a.get(r, col) != 0)
            .ok_or(KernelError::Pivot(col))?;
        used[pivot] = true;
        perm.push(pivot);
        // forward-eliminate this column's pivot row from later columns
        let scale = field_inv(a.get(pivot, col), q)?;
        for c in (col + 1)..k {
            let factor = q.mul(a.get(pivot, c), scale);
            if factor == 0 {
                continue;
            }
            for r in 0..k {
                let v = q.sub(a.get(r, c), q.mul(factor, a.get(r, col)));
                a.set(r, c, v);
            }
        }
    }
    Ok(perm)
}

/// Column-wise elimination state M^(j) of the pivoted matrix M'.
///
/// 0-based `j`: columns `0..j` are first reduced so the top-left j x j block
/// is the identity (forward and backward pass), then column `j` is
/// forward-eliminated against them, zeroing its entries above row `j`, and
/// scaled so its diagonal entry is 1. Only the first `j + 1` columns differ
/// from `mp`.
pub fn reduced_matrix(
    mp: &FieldMatrix,
    j: usize,
    q: PrimeModulus,
) -> Result<FieldMatrix, KernelError> {
    if !mp.is_square() {
        return Err(KernelError::Shape(mp.rows(), mp.cols()));
    }
    let k = mp.rows();
    assert!(j < k, "column index {j} out of range for k = {k}");
    let mut a = mp.clone();
    // Gauss-Jordan on the leading block, pivots fixed on the diagonal.
    for c in 0..j {
        let pivot = a.get(c, c);
        if pivot == 0 {
            return Err(KernelError::Pivot(c));
        }
        let scale = field_inv(pivot, q)?;
        if scale != 1 {
            for r in 0..k {
                a.set(r, c, q.mul(a.get(r, c), scale));
            }
        }
        for d in 0..j {
            if d == c {
                continue;
            }
            let factor = a.get(c, d);
            if factor == 0 {
                continue;
            }
            for r in 0..k {
                let v = q.sub(a.get(r, d), q.mul(factor, a.get(r, c)));
                a.set(r, d, v);
            }
        }
    }
    // forward-eliminate column j using the reduced leading columns
    for c in 0..j {
        let factor = a.get(c, j);
        if factor == 0 {
            continue;
        }
        for r in 0..k {
            let v = q.sub(a.get(r, j), q.mul(factor, a.get(r, c)));
            a.set(r, j, v);
        }
    }
    // pivot normalization: the eliminated column carries a unit diagonal
    let pivot = a.get(j, j);
    if pivot == 0 {
        return Err(KernelError::Pivot(j));
    }
    let scale = field_inv(pivot, q)?;
    if scale != 1 {
        for r in 0..k {
            a.set(r, j, q.mul(a.get(r, j), scale));
        }
    }
    Ok(a)
}

/// Indices located by the reduction searches, all 0-based and relative to
/// the kernel's pivoted matrix M'.
///
/// Upper reduction: `s` is present, `ell == col`, and alpha = M^(col)[s][col]
/// with s > col. Lower reduction: `s` is absent and column `ell < col` of
/// M^(col) equals e_ell + alpha * e_col.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionIndices {
    pub col: usize,
    pub ell: usize,
    pub s: Option<usize>,
    pub alpha: u64,
}

/// Finds the first column of M^(j) whose support exceeds the diagonal,
/// yielding the comparison H((UM')_j | (UM')_{<j}, W) >= H(U_j + alpha U_s | W)
/// on independent-coordinate inputs.
pub fn find_upper_reduction(kernel: &Kernel) -> Result<ReductionIndices, KernelError> {
    if !kernel.is_mixing() {
        return Err(KernelError::NotMixing);
    }
    let q = kernel.q();
    let k = kernel.k();
    for j in 0..k {
        let reduced = reduced_matrix(kernel.pivoted(), j, q)?;
        if let Some(s) = (j + 1..k).find(|&r| reduced.get(r, j) != 0) {
            return Ok(ReductionIndices {
                col: j,
                ell: j,
                s: Some(s),
                alpha: reduced.get(s, j),
            });
        }
    }
    // a mixing kernel always has such a column: otherwise M' would be
    // upper triangular
    unreachable!("mixing kernel without an upper-reduction column")
}

/// Finds the last column j of M' whose preceding columns do not span
/// {e_0, ..., e_{j-1}}, yielding H((UM')_j | (UM')_{<j}, W) <=
/// H(U_j | U_ell + alpha U_j, W).
pub fn find_lower_reduction(kernel: &Kernel) -> Result<ReductionIndices, KernelError> {
    if !kernel.is_mixing() {
        return Err(KernelError::NotMixing);
    }
    let q = kernel.q();
    let k = kernel.k();
    let mp = kernel.pivoted();
    // span(cols < j) == span{e_0..e_{j-1}} iff those columns vanish below
    // row j - 1 (they are independent since M' is invertible)
    let j = (1..k)
        .rev()
        .find(|&j| (0..j).any(|c| (j..k).any(|r| mp.get(r, c) != 0)))
        .ok_or(KernelError::NotMixing)?;
    let reduced = reduced_matrix(mp, j, q)?;
    let ell = (0..j)
        .find(|&c| reduced.get(j, c) != 0)
        .expect("lower-reduction column must exist for a mixing kernel");
    let alpha = reduced.get(j, ell);
    // by construction this column is exactly e_ell + alpha e_j
    debug_assert!((0..k).all(|r| {
        let expected = if r == ell {
            1
        } else if r == j {
            alpha
        } else {
            0
        };
        reduced.get(r, ell) == expected
    }));
    Ok(ReductionIndices {
        col: j,
        ell,
        s: None,
        alpha,
    })
}
