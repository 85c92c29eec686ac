//! Tensor-power transforms: the explicit reference matrix and the fast
//! level-by-level encoder/inverse.
//!
//! Length-k^t vectors are flattened from multi-indices (i_1, ..., i_t) with
//! digit 1 most significant. The fast path applies the kernel along one
//! digit axis at a time; since the axis applications commute, the result is
//! exactly the tensor-power linear map.

use crate::code::{checked_len, CodeSpec};
use crate::field::{FieldMatrix, PrimeModulus};
use crate::kernel::Kernel;
use thiserror::Error;

/// Hard cap on k^t for materializing the explicit tensor matrix.
pub const TENSOR_MATRIX_MAX: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("size {n} exceeds bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Flattens a multi-index with digit 0 most significant.
pub fn flatten_index(digits: &[usize], k: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * k + d)
}

/// Inverse of [`flatten_index`] for t digits.
pub fn unflatten_index(mut idx: usize, k: usize, t: u32) -> Vec<usize> {
    let mut digits = vec![0usize; t as usize];
    for d in digits.iter_mut().rev() {
        *d = idx % k;
        idx /= k;
    }
    digits
}

/// Explicit k^t x k^t matrix of the t-fold tensor power of `m` under the
/// canonical flattening: entry ((i_1..i_t), (j_1..j_t)) = prod_d m[i_d][j_d].
pub fn tensor_matrix(
    m: &FieldMatrix,
    t: u32,
    q: PrimeModulus,
) -> Result<FieldMatrix, TransformError> {
    let k = m.rows();
    let n = checked_len(k, t)
        .filter(|&n| n <= TENSOR_MATRIX_MAX)
        .ok_or(TransformError::TooLarge {
            n: checked_len(k, t).unwrap_or(usize::MAX),
            bound: TENSOR_MATRIX_MAX,
        })?;
    let mut acc = FieldMatrix::identity(1);
    for _ in 0..t {
        acc = kronecker(&acc, m, q);
    }
    debug_assert_eq!(acc.rows(), n);
    Ok(acc)
}

fn kronecker(a: &FieldMatrix, b: &FieldMatrix, q: PrimeModulus) -> FieldMatrix {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    let mut out = FieldMatrix::zeros(ar * br, ac * bc);
    for ia in 0..ar {
        for ja in 0..ac {
            let v = a.get(ia, ja);
            if v == 0 {
                continue;
            }
            for ib in 0..br {
                for jb in 0..bc {
                    out.set(ia * br + ib, ja * bc + jb, q.mul(v, b.get(ib, jb)));
                }
            }
        }
    }
    out
}

/// Applies the t-fold tensor power of `m` to a row vector, one digit axis at
/// a time. Returns the transformed vector and the number of field
/// multiplications performed.
fn apply_tensor_power(v: &[u64], m: &FieldMatrix, t: u32, q: PrimeModulus) -> (Vec<u64>, u64) {
    let k = m.rows();
    let n = v.len();
    let mut buf = v.to_vec();
    let mut scratch = vec![0u64; k];
    let mut mults = 0u64;
    for axis in 0..t {
        // stride between consecutive values of this digit
        let stride = k.pow(t - 1 - axis);
        let block = stride * k;
        for base in (0..n).step_by(block) {
            for off in 0..stride {
                for (j, s) in scratch.iter_mut().enumerate() {
                    let mut acc = 0u64;
                    for i in 0..k {
                        acc = q.add(acc, q.mul(buf[base + off + i * stride], m.get(i, j)));
                        mults += 1;
                    }
                    *s = acc;
                }
                for (i, &s) in scratch.iter().enumerate() {
                    buf[base + off + i * stride] = s;
                }
            }
        }
    }
    (buf, mults)
}

fn check_length(len: usize, k: usize, t: u32) -> Result<usize, TransformError> {
    let n = checked_len(k, t).ok_or(TransformError::TooLarge {
        n: usize::MAX,
        bound: usize::MAX,
    })?;
    if len != n {
        return Err(TransformError::Shape(format!(
            "expected k^t = {n} symbols, got {len}"
        )));
    }
    Ok(n)
}

/// Reference encoder: extends the message with the frozen values and
/// multiplies by the explicit tensor power of the inverse kernel.
pub fn encode_reference(msg: &[u64], code: &CodeSpec) -> Result<Vec<u64>, TransformError> {
    let full = code
        .extend_message(msg)
        .map_err(|e| TransformError::Shape(e.to_string()))?;
    let q = code.kernel().q();
    let tm = tensor_matrix(code.kernel().inverse(), code.t(), q)?;
    Ok(crate::field::vec_mat_mul(&full, &tm, q).expect("length checked"))
}

/// Fast encoder: Z = Ubar (M^-1)^{tensor t} in O(n log n) field operations.
pub fn encode_fast(ubar: &[u64], kernel: &Kernel, t: u32) -> Result<Vec<u64>, TransformError> {
    check_length(ubar.len(), kernel.k(), t)?;
    Ok(apply_tensor_power(ubar, kernel.inverse(), t, kernel.q()).0)
}

/// Forward transform U = Z M^{tensor t}; inverse of [`encode_fast`].
pub fn polar_transform_fast(
    z: &[u64],
    kernel: &Kernel,
    t: u32,
) -> Result<Vec<u64>, TransformError> {
    check_length(z.len(), kernel.k(), t)?;
    Ok(apply_tensor_power(z, kernel.matrix(), t, kernel.q()).0)
}
