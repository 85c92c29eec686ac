//! Code construction: exact erasure-channel evolution, the brute-force
//! entropy oracle that pins its index order, Monte-Carlo genie construction,
//! and CodeSpec persistence.
//!
//! On the q-ary erasure channel the per-index conditional law of a
//! transformed symbol given observations and past decisions is either a
//! point mass or uniform over F_q, so its normalized entropy is exactly the
//! probability that the symbol is undetermined. That makes the whole
//! profile computable by enumerating erasure patterns and rank checks, with
//! no statistical tolerance.

use crate::channel::{ChannelKind, ChannelModel};
use crate::code::{checked_len, CodeMeta, CodeSpec};
use crate::decoder::{codeword_posteriors, decode_genie, DecoderError};
use crate::field::{FieldMatrix, PrimeModulus};
use crate::kernel::Kernel;
use crate::transform::tensor_matrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Hard cap on k^t for profile evaluation.
pub const PROFILE_MAX: usize = 1 << 22;
/// Hard cap on n for the 2^n-pattern brute-force oracle.
pub const BRUTEFORCE_MAX_N: usize = 14;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("size {n} exceeds bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("cannot parse code file: {0}")]
    Parse(String),
    #[error("invalid code file: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
}

/// Fixed integer mixing used to derive per-trial seeds from a master seed,
/// so parallel and serial runs consume identical randomness.
///
/// derived = splitmix64(splitmix64(master) ^ splitmix64(index + 1))
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(index.wrapping_add(1)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Exact per-branch values of the erasure-parameter martingale.
///
/// `values[i]` is the erasure probability of canonical index i: for the
/// branch digits (i_1, ..., i_t) of i (digit 1 most significant), the value
/// is the single-step evolution composed with digit i_1 applied first. This
/// index order is pinned by exact agreement with
/// [`bruteforce_entropy_profile`], i.e. `values[i]` equals the normalized
/// conditional entropy of transformed symbol i.
#[derive(Debug, Clone)]
pub struct ErasureProfile {
    t: u32,
    values: Vec<f64>,
}

impl ErasureProfile {
    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at an explicit branch, digits 0-based.
    pub fn branch_value(&self, digits: &[usize], k: usize) -> f64 {
        self.values[crate::transform::flatten_index(digits, k)]
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }
}

/// Deterministic pairwise summation; order-stable reductions for profile
/// statistics.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// One polarization step on the erasure channel: the j-th output symbol is
/// undetermined exactly when column j of the kernel, restricted to the
/// erased rows, leaves the span of the previous restricted columns.
pub fn erasure_step(kernel: &Kernel, z: f64) -> Vec<f64> {
    let k = kernel.k();
    let q = kernel.q();
    let m = kernel.matrix();
    let mut out = vec![0f64; k];
    for pattern in 0u32..(1 << k) {
        let rows: Vec<usize> = (0..k).filter(|&r| pattern >> r & 1 == 1).collect();
        let weight = z.powi(rows.len() as i32) * (1.0 - z).powi((k - rows.len()) as i32);
        if weight == 0.0 {
            continue;
        }
        for j in rank_increase_columns(m, &rows, q) {
            out[j] += weight;
        }
    }
    out
}

/// Columns where the rank of the row-restricted matrix grows, i.e. where
/// the restricted column escapes the span of its predecessors. Incremental
/// column echelon over the restricted rows.
fn rank_increase_columns(m: &FieldMatrix, rows: &[usize], q: PrimeModulus) -> Vec<usize> {
    let mut basis: Vec<Vec<u64>> = Vec::new(); // reduced echelon columns
    let mut pivots: Vec<usize> = Vec::new();
    let mut increases = Vec::new();
    for j in 0..m.cols() {
        let mut col: Vec<u64> = rows.iter().map(|&r| m.get(r, j)).collect();
        for (b, &p) in basis.iter().zip(&pivots) {
            let factor = col[p];
            if factor == 0 {
                continue;
            }
            for (c, &bv) in col.iter_mut().zip(b) {
                *c = q.sub(*c, q.mul(factor, bv));
            }
        }
        if let Some(p) = col.iter().position(|&v| v != 0) {
            let inv = crate::field::field_inv(col[p], q).expect("nonzero pivot");
            for c in col.iter_mut() {
                *c = q.mul(*c, inv);
            }
            basis.push(col);
            pivots.push(p);
            increases.push(j);
        }
    }
    increases
}

/// t-fold composition of [`erasure_step`] along every branch, in canonical
/// index order.
pub fn erasure_profile(
    kernel: &Kernel,
    eps: f64,
    t: u32,
) -> Result<ErasureProfile, ConstructionError> {
    let k = kernel.k();
    let n = checked_len(k, t)
        .filter(|&n| n <= PROFILE_MAX)
        .ok_or(ConstructionError::TooLarge {
            n: usize::MAX,
            bound: PROFILE_MAX,
        })?;
    let mut values = vec![eps];
    for _ in 0..t {
        let mut next = Vec::with_capacity(values.len() * k);
        for &z in &values {
            next.extend(erasure_step(kernel, z));
        }
        values = next;
    }
    debug_assert_eq!(values.len(), n);
    Ok(ErasureProfile { t, values })
}

/// Direct evaluation of every normalized conditional entropy
/// H(U_i | U_{<i}, Y) on the erasure channel by enumerating all 2^n erasure
/// patterns of the full transform. Serves as the oracle fixing the profile's
/// index order.
pub fn bruteforce_entropy_profile(
    kernel: &Kernel,
    eps: f64,
    t: u32,
) -> Result<Vec<f64>, ConstructionError> {
    let n = checked_len(kernel.k(), t)
        .filter(|&n| n <= BRUTEFORCE_MAX_N)
        .ok_or(ConstructionError::TooLarge {
            n: checked_len(kernel.k(), t).unwrap_or(usize::MAX),
            bound: BRUTEFORCE_MAX_N,
        })?;
    let q = kernel.q();
    let tensor = tensor_matrix(kernel.matrix(), t, q).expect("n <= 14 fits the tensor bound");
    let mut out = vec![0f64; n];
    for pattern in 0u64..(1 << n) {
        let rows: Vec<usize> = (0..n).filter(|&r| pattern >> r & 1 == 1).collect();
        let weight = eps.powi(rows.len() as i32) * (1.0 - eps).powi((n - rows.len()) as i32);
        if weight == 0.0 {
            continue;
        }
        for i in rank_increase_columns(&tensor, &rows, q) {
            out[i] += weight;
        }
    }
    Ok(out)
}

/// Index selection statistic with optional Monte-Carlo standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexScore {
    pub index: usize,
    pub score: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionTarget {
    /// Keep the ceil(rate * n) best indices.
    Rate(f64),
    /// Keep every index scoring at or below the threshold.
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMethod {
    /// Exact erasure profile; only valid on the erasure channel.
    Exact,
    /// Genie-aided decoding error frequency over seeded trials.
    MonteCarlo { trials: u64 },
}

impl ScoreMethod {
    fn name(self) -> &'static str {
        match self {
            ScoreMethod::Exact => "exact",
            ScoreMethod::MonteCarlo { .. } => "mc",
        }
    }
}

/// Builds a code for `ch`: scores every index, keeps the best ones as the
/// information set, and freezes the rest to zero.
pub fn construct_code(
    ch: &ChannelModel,
    kernel: &Kernel,
    t: u32,
    target: SelectionTarget,
    method: ScoreMethod,
    seed: u64,
) -> Result<(CodeSpec, Vec<IndexScore>), ConstructionError> {
    let n = checked_len(kernel.k(), t)
        .filter(|&n| n <= PROFILE_MAX)
        .ok_or(ConstructionError::TooLarge {
            n: usize::MAX,
            bound: PROFILE_MAX,
        })?;

    let scores: Vec<IndexScore> = match method {
        ScoreMethod::Exact => {
            let ChannelKind::Erasure { epsilon } = ch.kind() else {
                return Err(ConstructionError::Unsupported(
                    "exact construction requires an erasure channel".into(),
                ));
            };
            let profile = erasure_profile(kernel, *epsilon, t)?;
            profile
                .values()
                .iter()
                .enumerate()
                .map(|(index, &score)| IndexScore {
                    index,
                    score,
                    stderr: None,
                })
                .collect()
        }
        ScoreMethod::MonteCarlo { trials } => {
            if trials == 0 {
                return Err(ConstructionError::Unsupported(
                    "mc construction requires trials >= 1".into(),
                ));
            }
            let counts = genie_error_counts(ch, kernel, t, trials, seed)?;
            counts
                .into_iter()
                .enumerate()
                .map(|(index, count)| {
                    let score = count as f64 / trials as f64;
                    let stderr = (score * (1.0 - score) / trials as f64).sqrt();
                    IndexScore {
                        index,
                        score,
                        stderr: Some(stderr),
                    }
                })
                .collect()
        }
    };

    let info: Vec<usize> = match target {
        SelectionTarget::Rate(rate) => {
            let dim = (rate * n as f64).ceil() as usize;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                scores[a]
                    .score
                    .partial_cmp(&scores[b].score)
                    .expect("scores are finite")
                    .then(a.cmp(&b))
            });
            order.truncate(dim.min(n));
            order
        }
        SelectionTarget::Threshold(delta) => (0..n).filter(|&i| scores[i].score <= delta).collect(),
    };
    let info_set: std::collections::HashSet<usize> = info.iter().copied().collect();
    let frozen: BTreeMap<usize, u64> = (0..n)
        .filter(|i| !info_set.contains(i))
        .map(|i| (i, 0u64))
        .collect();

    let mut code = CodeSpec::new(kernel.clone(), t, frozen)
        .map_err(|e| ConstructionError::Validation(e.to_string()))?;
    code.meta = CodeMeta {
        channel: ch.spec_string(),
        method: method.name().into(),
        seed,
    };
    Ok((code, scores))
}

/// Per-index genie error counts over seeded trials of random full-input
/// transmissions. Trials are independent; the reduction sums integer
/// counters, so the result does not depend on scheduling.
fn genie_error_counts(
    ch: &ChannelModel,
    kernel: &Kernel,
    t: u32,
    trials: u64,
    seed: u64,
) -> Result<Vec<u64>, ConstructionError> {
    use rand_core::{RngCore, SeedableRng};
    let probe = CodeSpec::new(kernel.clone(), t, BTreeMap::new())
        .map_err(|e| ConstructionError::Validation(e.to_string()))?;
    let n = probe.n();
    let q = kernel.q().get();
    let counts = (0..trials)
        .into_par_iter()
        .try_fold(
            || vec![0u64; n],
            |mut acc, trial| -> Result<Vec<u64>, ConstructionError> {
                let trial_seed = derive_seed(seed, trial);
                let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(derive_seed(trial_seed, 0));
                let ubar: Vec<u64> = (0..n).map(|_| rng.next_u64() % q).collect();
                let post = codeword_posteriors(&probe, &ubar, ch, derive_seed(trial_seed, 1))?;
                let flags = decode_genie(&post, &ubar, &probe)?;
                for (slot, flag) in acc.iter_mut().zip(flags) {
                    *slot += flag as u64;
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    Ok(counts)
}

#[derive(Serialize, Deserialize)]
struct CodeFile {
    q: u64,
    k: usize,
    t: u32,
    kernel: Vec<Vec<u64>>,
    frozen: Vec<FrozenEntry>,
    #[serde(default)]
    meta: CodeMeta,
}

#[derive(Serialize, Deserialize)]
struct FrozenEntry {
    index: usize,
    value: u64,
}

/// Serializes a code to its JSON schema.
pub fn save_code(code: &CodeSpec, path: impl AsRef<Path>) -> Result<(), ConstructionError> {
    std::fs::write(path, code_to_json(code))?;
    Ok(())
}

/// JSON text of a code, stable field order, trailing newline.
pub fn code_to_json(code: &CodeSpec) -> String {
    let file = CodeFile {
        q: code.kernel().q().get(),
        k: code.kernel().k(),
        t: code.t(),
        kernel: code.kernel().matrix().to_rows(),
        frozen: code
            .frozen()
            .iter()
            .map(|(&index, &value)| FrozenEntry { index, value })
            .collect(),
        meta: code.meta.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("code serializes");
    text.push('\n');
    text
}

/// Loads and validates a code: q must be prime, the kernel invertible and
/// of the declared size, frozen indices within range.
pub fn load_code(path: impl AsRef<Path>) -> Result<CodeSpec, ConstructionError> {
    let text = std::fs::read_to_string(path)?;
    code_from_json(&text)
}

pub fn code_from_json(text: &str) -> Result<CodeSpec, ConstructionError> {
    let file: CodeFile =
        serde_json::from_str(text).map_err(|e| ConstructionError::Parse(e.to_string()))?;
    let q = PrimeModulus::new(file.q).map_err(|e| ConstructionError::Validation(e.to_string()))?;
    if file.kernel.len() != file.k || file.kernel.iter().any(|row| row.len() != file.k) {
        return Err(ConstructionError::Validation(format!(
            "kernel is not {0}x{0}",
            file.k
        )));
    }
    let matrix = FieldMatrix::from_rows(&file.kernel, q)
        .map_err(|e| ConstructionError::Validation(e.to_string()))?;
    let kernel =
        Kernel::new(matrix, q).map_err(|e| ConstructionError::Validation(e.to_string()))?;
    let frozen: BTreeMap<usize, u64> = file.frozen.iter().map(|f| (f.index, f.value)).collect();
    if frozen.len() != file.frozen.len() {
        return Err(ConstructionError::Validation(
            "duplicate frozen index".into(),
        ));
    }
    let mut code = CodeSpec::new(kernel, file.t, frozen)
        .map_err(|e| ConstructionError::Validation(e.to_string()))?;
    code.meta = file.meta;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::{RngCore, SeedableRng};

    fn q(v: u64) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    fn g2() -> Kernel {
        let m = FieldMatrix::from_rows(&[vec![1, 0], vec![1, 1]], q(2)).unwrap();
        Kernel::new(m, q(2)).unwrap()
    }

    fn random_mixing_kernel(rng: &mut rand_chacha::ChaCha12Rng, k: usize, p: u64) -> Kernel {
        let m = q(p);
        loop {
            let data: Vec<u64> = (0..k * k).map(|_| rng.next_u64() % p).collect();
            let mat = FieldMatrix::new(k, k, &data, m).unwrap();
            if let Ok(kernel) = Kernel::new(mat, m) {
                if kernel.is_mixing() {
                    return kernel;
                }
            }
        }
    }

    #[test]
    fn erasure_step_examples() {
        let kernel = g2();
        let out = erasure_step(&kernel, 0.5);
        assert!((out[0] - 0.75).abs() < 1e-15);
        assert!((out[1] - 0.25).abs() < 1e-15);
        assert_eq!(erasure_step(&kernel, 0.0), vec![0.0, 0.0]);
        assert_eq!(erasure_step(&kernel, 1.0), vec![1.0, 1.0]);
    }

    #[test]
    fn erasure_step_closed_form_grid() {
        let kernel = g2();
        for i in 1..100 {
            let z = i as f64 / 100.0;
            let out = erasure_step(&kernel, z);
            assert!((out[0] - (2.0 * z - z * z)).abs() < 1e-12);
            assert!((out[1] - z * z).abs() < 1e-12);
        }
    }

    #[test]
    fn erasure_step_conserves_mass() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(41);
        for p in [2u64, 3, 5] {
            for k in [2usize, 3] {
                let kernel = random_mixing_kernel(&mut rng, k, p);
                for i in 0..100 {
                    let z = (i as f64 + 0.5) / 100.0;
                    let total: f64 = erasure_step(&kernel, z).iter().sum();
                    assert!((total - k as f64 * z).abs() < 1e-12, "q={p} k={k} z={z}");
                }
            }
        }
    }

    #[test]
    fn profile_examples() {
        let kernel = g2();
        let profile = erasure_profile(&kernel, 0.5, 2).unwrap();
        let mut sorted = profile.values().to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [0.0625, 0.4375, 0.5625, 0.9375];
        for (got, want) in sorted.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(profile.mean(), 0.5);

        let zero = erasure_profile(&kernel, 0.0, 3).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn profile_matches_bruteforce_oracle() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        let mut cases: Vec<(Kernel, u32)> = vec![(g2(), 2), (g2(), 3)];
        cases.push((random_mixing_kernel(&mut rng, 3, 3), 2));
        for (kernel, t) in cases {
            for eps in [0.25, 0.5, 0.75] {
                let profile = erasure_profile(&kernel, eps, t).unwrap();
                let oracle = bruteforce_entropy_profile(&kernel, eps, t).unwrap();
                for (i, (a, b)) in profile.values().iter().zip(&oracle).enumerate() {
                    assert!(
                        (a - b).abs() < 1e-12,
                        "k={} t={t} eps={eps} index {i}: profile {a} oracle {b}",
                        kernel.k()
                    );
                }
            }
        }
    }

    #[test]
    fn bruteforce_zero_one_endpoints() {
        let kernel = g2();
        assert!(bruteforce_entropy_profile(&kernel, 0.0, 2)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        assert!(bruteforce_entropy_profile(&kernel, 1.0, 2)
            .unwrap()
            .iter()
            .all(|&v| v == 1.0));
        assert!(matches!(
            bruteforce_entropy_profile(&kernel, 0.5, 4),
            Err(ConstructionError::TooLarge { .. })
        ));
    }

    #[test]
    fn profile_monotone_in_epsilon() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(43);
        let kernel = random_mixing_kernel(&mut rng, 2, 3);
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let mut prev: Option<ErasureProfile> = None;
        for &eps in &grid {
            let profile = erasure_profile(&kernel, eps, 4).unwrap();
            if let Some(p) = prev {
                for (lo, hi) in p.values().iter().zip(profile.values()) {
                    assert!(lo <= &(hi + 1e-12));
                }
            }
            prev = Some(profile);
        }
    }

    #[test]
    fn construct_examples() {
        let kernel = g2();
        let ch = ChannelModel::erasure(q(2), 0.5).unwrap();

        let (code, scores) = construct_code(
            &ch,
            &kernel,
            2,
            SelectionTarget::Rate(0.25),
            ScoreMethod::Exact,
            0,
        )
        .unwrap();
        assert_eq!(code.dimension(), 1);
        let info = code.message_indices();
        assert!((scores[info[0]].score - 0.0625).abs() < 1e-15);

        let (code, _) = construct_code(
            &ch,
            &kernel,
            2,
            SelectionTarget::Threshold(1.0),
            ScoreMethod::Exact,
            0,
        )
        .unwrap();
        assert_eq!(code.dimension(), 4);

        let (code, _) = construct_code(
            &ch,
            &kernel,
            2,
            SelectionTarget::Rate(0.0),
            ScoreMethod::Exact,
            0,
        )
        .unwrap();
        assert_eq!(code.dimension(), 0);

        let qsc = ChannelModel::symmetric(q(2), 0.1).unwrap();
        assert!(matches!(
            construct_code(
                &qsc,
                &kernel,
                2,
                SelectionTarget::Rate(0.5),
                ScoreMethod::Exact,
                0
            ),
            Err(ConstructionError::Unsupported(_))
        ));
    }

    #[test]
    fn mc_scores_track_exact_profile() {
        // genie error frequency on the erasure channel concentrates on
        // z_i * (1 - 1/q): an undetermined index has a uniform marginal,
        // the argmax ties to 0, and the true symbol is uniform
        let kernel = g2();
        let eps = 0.4;
        let ch = ChannelModel::erasure(q(2), eps).unwrap();
        let t = 6u32;
        let trials = 10_000u64;
        let (_, scores) = construct_code(
            &ch,
            &kernel,
            t,
            SelectionTarget::Rate(0.5),
            ScoreMethod::MonteCarlo { trials },
            7,
        )
        .unwrap();
        let exact = erasure_profile(&kernel, eps, t).unwrap();
        let q_f = 2.0;
        for (s, &z) in scores.iter().zip(exact.values()) {
            let mean = z * (1.0 - 1.0 / q_f);
            let sigma = (mean * (1.0 - mean) / trials as f64).sqrt();
            assert!(
                (s.score - mean).abs() <= 5.0 * sigma + 1e-9,
                "index {}: mc {} expected {mean} sigma {sigma}",
                s.index,
                s.score
            );
        }
    }

    #[test]
    fn save_load_roundtrip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("code.json");
        let ch = ChannelModel::erasure(q(2), 0.5).unwrap();
        let (code, _) = construct_code(
            &ch,
            &g2(),
            3,
            SelectionTarget::Rate(0.5),
            ScoreMethod::Exact,
            1,
        )
        .unwrap();
        save_code(&code, &path).unwrap();
        let loaded = load_code(&path).unwrap();
        assert_eq!(loaded.frozen(), code.frozen());
        assert_eq!(loaded.t(), code.t());
        assert_eq!(loaded.meta, code.meta);
        assert_eq!(loaded.kernel().matrix(), code.kernel().matrix());

        let composite = r#"{"q":4,"k":2,"t":1,"kernel":[[1,0],[1,1]],"frozen":[]}"#;
        assert!(matches!(
            code_from_json(composite),
            Err(ConstructionError::Validation(_))
        ));

        let bad_index =
            r#"{"q":2,"k":2,"t":1,"kernel":[[1,0],[1,1]],"frozen":[{"index":2,"value":0}]}"#;
        assert!(matches!(
            code_from_json(bad_index),
            Err(ConstructionError::Validation(_))
        ));

        assert!(matches!(
            code_from_json("not json"),
            Err(ConstructionError::Parse(_))
        ));
    }

    #[test]
    fn derived_seeds_spread() {
        let a = derive_seed(1, 0);
        let b = derive_seed(1, 1);
        let c = derive_seed(2, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        // stable contract: these exact values are part of the output format
        assert_eq!(derive_seed(0, 0), derive_seed(0, 0));
    }
}
