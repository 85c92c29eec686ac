//! A concrete polar code: kernel, recursion depth, frozen set and values.
//!
//! Indices live in the canonical order: the flattened lexicographic order of
//! the multi-index (i_1, ..., i_t) with digit 1 most significant. Encoder
//! message order, decoder output order and the construction profile all use
//! this same order.

use crate::kernel::Kernel;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("invalid code: {0}")]
    Validation(String),
}

/// Provenance recorded when a code is constructed; round-trips through the
/// JSON representation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMeta {
    pub channel: String,
    pub method: String,
    pub seed: u64,
}

/// A polar code over F_q of length n = k^t.
///
/// `frozen` maps canonical indices outside the information set S to their
/// fixed symbols; S is the complement of its key set.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    kernel: Kernel,
    t: u32,
    frozen: BTreeMap<usize, u64>,
    pub meta: CodeMeta,
}

impl CodeSpec {
    pub fn new(kernel: Kernel, t: u32, frozen: BTreeMap<usize, u64>) -> Result<Self, CodeError> {
        let n = checked_len(kernel.k(), t).ok_or_else(|| {
            CodeError::Validation(format!("k^t overflows usize (k = {}, t = {t})", kernel.k()))
        })?;
        let q = kernel.q().get();
        for (&i, &v) in &frozen {
            if i >= n {
                return Err(CodeError::Validation(format!(
                    "frozen index {i} out of range for n = {n}"
                )));
            }
            if v >= q {
                return Err(CodeError::Validation(format!(
                    "frozen value {v} out of range for q = {q}"
                )));
            }
        }
        Ok(CodeSpec {
            kernel,
            t,
            frozen,
            meta: CodeMeta::default(),
        })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.kernel.k().pow(self.t)
    }

    pub fn frozen(&self) -> &BTreeMap<usize, u64> {
        &self.frozen
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen.contains_key(&i)
    }

    /// Information-set size |S|.
    pub fn dimension(&self) -> usize {
        self.n() - self.frozen.len()
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.n() as f64
    }

    /// Indices of S in ascending order.
    pub fn message_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|i| !self.is_frozen(*i)).collect()
    }

    /// Full-length vector with `Some(alpha)` at frozen indices.
    pub fn frozen_slots(&self) -> Vec<Option<u64>> {
        let mut slots = vec![None; self.n()];
        for (&i, &v) in &self.frozen {
            slots[i] = Some(v);
        }
        slots
    }

    /// Extends a message (one symbol per index of S, ascending) to the full
    /// input vector by filling frozen positions with their fixed values.
    pub fn extend_message(&self, msg: &[u64]) -> Result<Vec<u64>, CodeError> {
        if msg.len() != self.dimension() {
            return Err(CodeError::Validation(format!(
                "message has {} symbols, code dimension is {}",
                msg.len(),
                self.dimension()
            )));
        }
        let q = self.kernel.q().get();
        if let Some(&bad) = msg.iter().find(|&&s| s >= q) {
            return Err(CodeError::Validation(format!(
                "message symbol {bad} out of range for q = {q}"
            )));
        }
        let mut full = vec![0u64; self.n()];
        let mut it = msg.iter();
        for (i, slot) in full.iter_mut().enumerate() {
            *slot = match self.frozen.get(&i) {
                Some(&alpha) => alpha,
                None => *it.next().expect("message length checked"),
            };
        }
        Ok(full)
    }

    /// Restricts a full-length vector to the information set, ascending.
    pub fn restrict_message(&self, full: &[u64]) -> Vec<u64> {
        (0..self.n())
            .filter(|i| !self.is_frozen(*i))
            .map(|i| full[i])
            .collect()
    }
}

pub(crate) fn checked_len(k: usize, t: u32) -> Option<usize> {
    let mut n = 1usize;
    for _ in 0..t {
        n = n.checked_mul(k)?;
    }
    Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldMatrix, PrimeModulus};

    fn g2_code(t: u32, frozen: &[(usize, u64)]) -> Result<CodeSpec, CodeError> {
        let q = PrimeModulus::new(2).unwrap();
        let m = FieldMatrix::from_rows(&[vec![1, 0], vec![1, 1]], q).unwrap();
        let kernel = Kernel::new(m, q).unwrap();
        CodeSpec::new(kernel, t, frozen.iter().copied().collect())
    }

    #[test]
    fn message_extension_roundtrip() {
        let code = g2_code(2, &[(0, 1), (2, 0)]).unwrap();
        assert_eq!(code.n(), 4);
        assert_eq!(code.dimension(), 2);
        assert_eq!(code.message_indices(), vec![1, 3]);
        let full = code.extend_message(&[1, 0]).unwrap();
        assert_eq!(full, vec![1, 1, 0, 0]);
        assert_eq!(code.restrict_message(&full), vec![1, 0]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(g2_code(2, &[(4, 0)]).is_err());
        assert!(g2_code(2, &[(0, 2)]).is_err());
        let code = g2_code(1, &[]).unwrap();
        assert!(code.extend_message(&[0]).is_err());
        assert!(code.extend_message(&[0, 2]).is_err());
    }
}
