//! Successive-cancellation decoding.
//!
//! `decode_reference` materializes the full joint distribution of U = Z M^t
//! and conditions it index by index; it exists as an oracle and only works
//! while q^n fits in memory. `decode_fast` is the recursive decoder that
//! produces identical output in O(n log n) q^k-sized table operations.
//! `decode_genie` runs the same recursion but forces every decision to the
//! true input after recording whether the argmax would have missed it,
//! isolating per-index single-step error events.
//!
//! Ties in every argmax break toward the lowest field element, in both
//! decoders, so fast/reference equivalence is exact.
//!
//! Probabilities are carried as a double-precision leading coefficient plus
//! an infinitesimal order: a zero channel probability enters as one unit of
//! infinitesimal instead of as 0.0. Decoder arithmetic is subtraction-free,
//! so this computes the exact limit of decoding an epsilon-smoothed channel.
//! Conditioning events then always have positive mass even after a wrong
//! decision makes a frozen symbol contradict the observations; such an
//! infinitesimal conditioning event is reported via the `inconsistent`
//! flag, and decoding continues deterministically rather than aborting.

use crate::channel::SymbolPosterior;
use crate::code::CodeSpec;
use crate::field::vec_mat_mul;
use crate::transform::{encode_fast, tensor_matrix};
use thiserror::Error;

/// Hard cap on the joint-table size q^n of the reference decoder.
pub const REFERENCE_TABLE_MAX: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecoderError {
    #[error("joint table of size {n} exceeds bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Decoder output: decisions in canonical message order plus the implied
/// codeword. `inconsistent` records that some conditioning event had only
/// infinitesimal probability (a frozen value contradicted the observations
/// given the decoded history); decoding continues rather than aborting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub u_hat: Vec<u64>,
    pub z_hat: Vec<u64>,
    pub inconsistent: bool,
}

/// Leading term c * eps^order of a probability under infinitesimal
/// smoothing of zero channel entries. All decoder arithmetic on these is
/// subtraction-free, so leading terms stay exact.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Val {
    coeff: f64,
    order: u32,
}

const VAL_ZERO: Val = Val {
    coeff: 0.0,
    order: u32::MAX,
};

impl Val {
    const ONE: Val = Val {
        coeff: 1.0,
        order: 0,
    };

    fn from_prob(p: f64) -> Val {
        if p > 0.0 {
            Val { coeff: p, order: 0 }
        } else {
            Val {
                coeff: 1.0,
                order: 1,
            }
        }
    }

    fn is_zero(self) -> bool {
        self.order == u32::MAX
    }

    fn mul(self, other: Val) -> Val {
        if self.is_zero() || other.is_zero() {
            return VAL_ZERO;
        }
        Val {
            coeff: self.coeff * other.coeff,
            order: self.order + other.order,
        }
    }

    fn add(self, other: Val) -> Val {
        if self.order < other.order {
            self
        } else if other.order < self.order {
            other
        } else if self.is_zero() {
            VAL_ZERO
        } else {
            Val {
                coeff: self.coeff + other.coeff,
                order: self.order,
            }
        }
    }

    fn div(self, other: Val) -> Val {
        if self.is_zero() {
            return VAL_ZERO;
        }
        debug_assert!(!other.is_zero() && self.order >= other.order);
        Val {
            coeff: self.coeff / other.coeff,
            order: self.order - other.order,
        }
    }

    /// Strictly greater, with a relative tolerance on the coefficient.
    ///
    /// Mathematically tied marginals can be accumulated in different orders
    /// by the reference and fast decoders; without the tolerance one of
    /// them may see a few-ulp gap where the other sees an exact tie, and
    /// the lowest-symbol tie rule would then diverge between them. Genuine
    /// probability gaps at decodable sizes are many orders larger.
    fn gt(self, other: Val) -> bool {
        self.order < other.order
            || (self.order == other.order
                && self.coeff > other.coeff * (1.0 + ARGMAX_REL_TOLERANCE))
    }
}

const ARGMAX_REL_TOLERANCE: f64 = 1e-9;

fn argmax_lowest(probs: &[Val]) -> u64 {
    let mut best = 0usize;
    for (i, &p) in probs.iter().enumerate().skip(1) {
        if p.gt(probs[best]) {
            best = i;
        }
    }
    best as u64
}

fn val_sum<'a>(vals: impl Iterator<Item = &'a Val>) -> Val {
    vals.fold(VAL_ZERO, |acc, &v| acc.add(v))
}

fn check_posteriors(post: &[SymbolPosterior], code: &CodeSpec) -> Result<(), DecoderError> {
    let n = code.n();
    if post.len() != n {
        return Err(DecoderError::Shape(format!(
            "expected {n} posteriors, got {}",
            post.len()
        )));
    }
    let q = code.kernel().q().get() as usize;
    if let Some(bad) = post.iter().position(|p| p.probs().len() != q) {
        return Err(DecoderError::Shape(format!(
            "posterior {bad} is not over F_{q}"
        )));
    }
    Ok(())
}

/// Exponential-table successive-cancellation decoder.
pub fn decode_reference(
    post: &[SymbolPosterior],
    code: &CodeSpec,
) -> Result<DecodeOutcome, DecoderError> {
    check_posteriors(post, code)?;
    let q = code.kernel().q();
    let qv = q.get() as usize;
    let n = code.n();
    let size = (0..n)
        .try_fold(1usize, |acc, _| {
            acc.checked_mul(qv).filter(|&s| s <= REFERENCE_TABLE_MAX)
        })
        .ok_or(DecoderError::TooLarge {
            n: usize::MAX,
            bound: REFERENCE_TABLE_MAX,
        })?;

    let tensor =
        tensor_matrix(code.kernel().matrix(), code.t(), q).map_err(|_| DecoderError::TooLarge {
            n,
            bound: REFERENCE_TABLE_MAX,
        })?;
    let post_vals: Vec<Vec<Val>> = post
        .iter()
        .map(|p| p.probs().iter().map(|&v| Val::from_prob(v)).collect())
        .collect();

    // u_table[e * n + i] = i-th symbol of z(e) * M^t, maintained incrementally
    // while the digits of e walk an odometer.
    let mut u_table = vec![0u8; size * n];
    let mut weights = vec![VAL_ZERO; size];
    {
        let mut z = vec![0u64; n];
        let mut u = vec![0u64; n];
        for e in 0..size {
            for (i, &sym) in u.iter().enumerate() {
                u_table[e * n + i] = sym as u8;
            }
            weights[e] = z
                .iter()
                .enumerate()
                .fold(Val::ONE, |acc, (i, &d)| acc.mul(post_vals[i][d as usize]));
            if e + 1 == size {
                break;
            }
            let mut j = n - 1;
            loop {
                let old = z[j];
                if old as usize + 1 < qv {
                    z[j] += 1;
                    for (c, slot) in u.iter_mut().enumerate() {
                        *slot = q.add(*slot, tensor.get(j, c));
                    }
                    break;
                }
                z[j] = 0;
                for (c, slot) in u.iter_mut().enumerate() {
                    *slot = q.sub(*slot, q.mul(old, tensor.get(j, c)));
                }
                j -= 1;
            }
        }
    }

    let mut u_hat = vec![0u64; n];
    let mut inconsistent = false;
    for i in 0..n {
        let decision = match code.frozen().get(&i) {
            Some(&alpha) => alpha,
            None => {
                let mut marg = vec![VAL_ZERO; qv];
                for e in 0..size {
                    marg[u_table[e * n + i] as usize] =
                        marg[u_table[e * n + i] as usize].add(weights[e]);
                }
                argmax_lowest(&marg)
            }
        };
        u_hat[i] = decision;
        for e in 0..size {
            if u_table[e * n + i] as u64 != decision {
                weights[e] = VAL_ZERO;
            }
        }
        let total = val_sum(weights.iter());
        if total.order > 0 {
            inconsistent = true;
        }
        weights.iter_mut().for_each(|v| *v = v.div(total));
    }

    let inverse_tensor = tensor_matrix(code.kernel().inverse(), code.t(), q).map_err(|_| {
        DecoderError::TooLarge {
            n,
            bound: REFERENCE_TABLE_MAX,
        }
    })?;
    let z_hat = vec_mat_mul(&u_hat, &inverse_tensor, q).expect("length checked");
    Ok(DecodeOutcome {
        u_hat,
        z_hat,
        inconsistent,
    })
}

struct FastCtx<'a> {
    qv: usize,
    k: usize,
    table: usize, // q^k
    /// digits[w * k + l] = l-th digit of the length-k word w
    digits: Vec<u8>,
    /// zmul[z] = flattened z * M
    zmul: Vec<usize>,
    /// back[w] = digits of w * M^-1
    back: Vec<Vec<u64>>,
    u_hat: Vec<u64>,
    inconsistent: bool,
    genie: Option<Genie<'a>>,
}

struct Genie<'a> {
    truth: &'a [u64],
    flags: Vec<bool>,
}

impl<'a> FastCtx<'a> {
    fn new(code: &CodeSpec, genie: Option<Genie<'a>>) -> Self {
        let q = code.kernel().q();
        let qv = q.get() as usize;
        let k = code.kernel().k();
        let table = qv.pow(k as u32);
        let mut digits = vec![0u8; table * k];
        let mut zmul = vec![0usize; table];
        let mut back = Vec::with_capacity(table);
        for w in 0..table {
            let mut rem = w;
            for l in (0..k).rev() {
                digits[w * k + l] = (rem % qv) as u8;
                rem /= qv;
            }
            let word: Vec<u64> = (0..k).map(|l| digits[w * k + l] as u64).collect();
            let prod = vec_mat_mul(&word, code.kernel().matrix(), q).expect("square kernel");
            zmul[w] = prod.iter().fold(0usize, |acc, &d| acc * qv + d as usize);
            back.push(vec_mat_mul(&word, code.kernel().inverse(), q).expect("square kernel"));
        }
        FastCtx {
            qv,
            k,
            table,
            digits,
            zmul,
            back,
            u_hat: vec![0; code.n()],
            inconsistent: false,
            genie,
        }
    }

    fn decide(&mut self, marginal: &[Val], frozen: Option<u64>, index: usize) -> u64 {
        match &mut self.genie {
            None => frozen.unwrap_or_else(|| argmax_lowest(marginal)),
            Some(g) => {
                if frozen.is_none() {
                    g.flags[index] = argmax_lowest(marginal) != g.truth[index];
                }
                g.truth[index]
            }
        }
    }

    fn recurse(
        &mut self,
        post: &[Vec<Val>],
        frozen: &[Option<u64>],
        base: usize,
        s: u32,
    ) -> Vec<u64> {
        if s == 0 {
            let decision = self.decide(&post[0], frozen[0], base);
            self.u_hat[base] = decision;
            return vec![decision];
        }
        let k = self.k;
        let sub = post.len() / k;

        // joint tables W_i = (Z_{0,i}, ..., Z_{k-1,i}) * M over F_q^k
        let mut tables = vec![vec![VAL_ZERO; self.table]; sub];
        for (fi, w) in tables.iter_mut().enumerate() {
            for z in 0..self.table {
                let mut prob = Val::ONE;
                for l in 0..k {
                    prob = prob.mul(post[l * sub + fi][self.digits[z * k + l] as usize]);
                }
                w[self.zmul[z]] = w[self.zmul[z]].add(prob);
            }
        }

        for j in 0..k {
            let subposts: Vec<Vec<Val>> = tables
                .iter()
                .map(|w| {
                    let mut marg = vec![VAL_ZERO; self.qv];
                    for (wf, &p) in w.iter().enumerate() {
                        let d = self.digits[wf * k + j] as usize;
                        marg[d] = marg[d].add(p);
                    }
                    let total = val_sum(marg.iter());
                    marg.iter_mut().for_each(|v| *v = v.div(total));
                    marg
                })
                .collect();

            let v_hat = self.recurse(
                &subposts,
                &frozen[j * sub..(j + 1) * sub],
                base + j * sub,
                s - 1,
            );

            for (fi, w) in tables.iter_mut().enumerate() {
                for (wf, p) in w.iter_mut().enumerate() {
                    if self.digits[wf * k + j] as u64 != v_hat[fi] {
                        *p = VAL_ZERO;
                    }
                }
                let total = val_sum(w.iter());
                if total.order > 0 {
                    self.inconsistent = true;
                }
                w.iter_mut().for_each(|p| *p = p.div(total));
            }
        }

        // all coordinates pinned: the surviving entry of each table is the
        // decided word, map it back through M^-1
        let mut z_hat = vec![0u64; post.len()];
        for (fi, w) in tables.iter().enumerate() {
            let wf = w
                .iter()
                .position(|p| !p.is_zero())
                .expect("conditioned table keeps exactly one live entry");
            for (l, &zl) in self.back[wf].iter().enumerate() {
                z_hat[l * sub + fi] = zl;
            }
        }
        z_hat
    }
}

/// Recursive successive-cancellation decoder, equivalent to
/// [`decode_reference`] on the same input.
pub fn decode_fast(
    post: &[SymbolPosterior],
    code: &CodeSpec,
) -> Result<DecodeOutcome, DecoderError> {
    check_posteriors(post, code)?;
    let mut ctx = FastCtx::new(code, None);
    let vals: Vec<Vec<Val>> = post
        .iter()
        .map(|p| p.probs().iter().map(|&v| Val::from_prob(v)).collect())
        .collect();
    let z_hat = ctx.recurse(&vals, &code.frozen_slots(), 0, code.t());
    Ok(DecodeOutcome {
        u_hat: ctx.u_hat,
        z_hat,
        inconsistent: ctx.inconsistent,
    })
}

/// Genie-aided probe: per-index error flags under a forced-correct history.
pub fn decode_genie(
    post: &[SymbolPosterior],
    true_u: &[u64],
    code: &CodeSpec,
) -> Result<Vec<bool>, DecoderError> {
    check_posteriors(post, code)?;
    if true_u.len() != code.n() {
        return Err(DecoderError::Shape(format!(
            "true input has {} symbols, expected {}",
            true_u.len(),
            code.n()
        )));
    }
    let genie = Genie {
        truth: true_u,
        flags: vec![false; code.n()],
    };
    let mut ctx = FastCtx::new(code, Some(genie));
    let vals: Vec<Vec<Val>> = post
        .iter()
        .map(|p| p.probs().iter().map(|&v| Val::from_prob(v)).collect())
        .collect();
    ctx.recurse(&vals, &code.frozen_slots(), 0, code.t());
    Ok(ctx.genie.expect("genie mode").flags)
}

/// Convenience used by simulation paths: noisy posteriors for a transmitted
/// codeword of `code` through `ch`.
pub fn codeword_posteriors(
    code: &CodeSpec,
    ubar: &[u64],
    ch: &crate::channel::ChannelModel,
    seed: u64,
) -> Result<Vec<SymbolPosterior>, DecoderError> {
    let z = encode_fast(ubar, code.kernel(), code.t())
        .map_err(|e| DecoderError::Shape(e.to_string()))?;
    let y = ch.transmit(&z, seed);
    ch.posteriors(&y)
        .map_err(|e| DecoderError::Shape(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelModel;
    use crate::field::{FieldMatrix, PrimeModulus};
    use crate::kernel::Kernel;
    use crate::transform::polar_transform_fast;
    use std::collections::BTreeMap;

    fn q(v: u64) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    fn g2_code(t: u32, frozen: &[(usize, u64)]) -> CodeSpec {
        let m = FieldMatrix::from_rows(&[vec![1, 0], vec![1, 1]], q(2)).unwrap();
        let kernel = Kernel::new(m, q(2)).unwrap();
        CodeSpec::new(kernel, t, frozen.iter().copied().collect()).unwrap()
    }

    #[test]
    fn reference_noiseless_recovery() {
        let code = g2_code(2, &[(0, 0)]);
        let ubar = code.extend_message(&[1, 0, 1]).unwrap();
        let z = encode_fast(&ubar, code.kernel(), 2).unwrap();
        let post: Vec<SymbolPosterior> = z
            .iter()
            .map(|&s| SymbolPosterior::point_mass(2, s))
            .collect();
        let out = decode_reference(&post, &code).unwrap();
        assert_eq!(out.u_hat, ubar);
        assert_eq!(out.z_hat, z);
        assert!(!out.inconsistent);
    }

    #[test]
    fn reference_conditioning_example() {
        // symbol 0 erased, symbol 1 received as 1, index 0 frozen to 0:
        // conditioning forces u = (0, 1)
        let code = g2_code(1, &[(0, 0)]);
        let post = vec![
            SymbolPosterior::uniform(2),
            SymbolPosterior::point_mass(2, 1),
        ];
        let out = decode_reference(&post, &code).unwrap();
        assert_eq!(out.u_hat, vec![0, 1]);
        let fast = decode_fast(&post, &code).unwrap();
        assert_eq!(fast, out);
    }

    #[test]
    fn reference_size_bound() {
        let m =
            FieldMatrix::from_rows(&[vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]], q(3)).unwrap();
        let kernel = Kernel::new(m, q(3)).unwrap();
        let code = CodeSpec::new(kernel, 3, BTreeMap::new()).unwrap(); // n = 27, 3^27 too large
        let post = vec![SymbolPosterior::uniform(3); 27];
        assert!(matches!(
            decode_reference(&post, &code),
            Err(DecoderError::TooLarge { .. })
        ));
    }

    #[test]
    fn fast_all_frozen_reproduces_frozen_encoding() {
        let frozen: Vec<(usize, u64)> = (0..8).map(|i| (i, (i % 2) as u64)).collect();
        let code = g2_code(3, &frozen);
        let post = vec![SymbolPosterior::uniform(2); 8];
        let out = decode_fast(&post, &code).unwrap();
        let alpha: Vec<u64> = (0..8).map(|i| (i % 2) as u64).collect();
        assert_eq!(out.u_hat, alpha);
        assert_eq!(out.z_hat, encode_fast(&alpha, code.kernel(), 3).unwrap());
    }

    #[test]
    fn outcome_is_internally_consistent() {
        let code = g2_code(3, &[(0, 0), (1, 1), (2, 0)]);
        let ch = ChannelModel::erasure(q(2), 0.4).unwrap();
        for seed in 0..50 {
            let msg: Vec<u64> = (0..code.dimension())
                .map(|i| (seed + i as u64) % 2)
                .collect();
            let ubar = code.extend_message(&msg).unwrap();
            let post = codeword_posteriors(&code, &ubar, &ch, 500 + seed).unwrap();
            let out = decode_fast(&post, &code).unwrap();
            assert_eq!(
                polar_transform_fast(&out.z_hat, code.kernel(), 3).unwrap(),
                out.u_hat
            );
            for (&i, &v) in code.frozen() {
                assert_eq!(out.u_hat[i], v, "frozen symbol must survive decoding");
            }
        }
    }

    #[test]
    fn genie_examples() {
        // noiseless: no flags anywhere
        let code = g2_code(2, &[(0, 0)]);
        let ubar = code.extend_message(&[1, 1, 0]).unwrap();
        let z = encode_fast(&ubar, code.kernel(), 2).unwrap();
        let post: Vec<SymbolPosterior> = z
            .iter()
            .map(|&s| SymbolPosterior::point_mass(2, s))
            .collect();
        assert_eq!(decode_genie(&post, &ubar, &code).unwrap(), vec![false; 4]);

        // both symbols erased, truth (0, 1): index 0 ties to 0 (correct),
        // index 1 then ties to 0 (wrong)
        let code = g2_code(1, &[]);
        let post = vec![SymbolPosterior::uniform(2); 2];
        let flags = decode_genie(&post, &[0, 1], &code).unwrap();
        assert_eq!(flags, vec![false, true]);

        // fully frozen code: flags are never raised
        let code = g2_code(1, &[(0, 0), (1, 1)]);
        let flags = decode_genie(&post, &[0, 1], &code).unwrap();
        assert_eq!(flags, vec![false, false]);
    }

    #[test]
    fn inconsistent_conditioning_is_flagged_not_fatal() {
        // frozen value 1 at index 0 but the codeword posteriors pin u_0 = 0
        let code = g2_code(1, &[(0, 1)]);
        let post = vec![
            SymbolPosterior::point_mass(2, 0),
            SymbolPosterior::point_mass(2, 0),
        ];
        let out = decode_fast(&post, &code).unwrap();
        assert!(out.inconsistent);
        assert_eq!(out.u_hat[0], 1);
        let reference = decode_reference(&post, &code).unwrap();
        assert!(reference.inconsistent);
        assert_eq!(out, reference);
    }

    #[test]
    fn fast_matches_reference_on_random_channels() {
        let ch_ec = ChannelModel::erasure(q(2), 0.4).unwrap();
        let code = g2_code(3, &[(0, 0), (1, 1), (4, 0)]);
        for seed in 0..100 {
            let msg: Vec<u64> = (0..code.dimension()).map(|i| (seed >> i) & 1).collect();
            let ubar = code.extend_message(&msg).unwrap();
            let post = codeword_posteriors(&code, &ubar, &ch_ec, 9000 + seed).unwrap();
            let fast = decode_fast(&post, &code).unwrap();
            let reference = decode_reference(&post, &code).unwrap();
            assert_eq!(fast, reference, "seed {seed}");
        }
    }
}
