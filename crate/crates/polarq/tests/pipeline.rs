//! End-to-end coding pipeline checks across modules: construct a code,
//! push messages through a channel, decode, and compare against the exact
//! erasure predictions.

use polarq::construction::{
    construct_code, derive_seed, erasure_profile, ScoreMethod, SelectionTarget,
};
use polarq::decoder::codeword_posteriors;
use polarq::{
    decode_fast, decode_genie, ChannelModel, CodeSpec, FieldMatrix, Kernel, PrimeModulus,
};
use rand_core::{RngCore, SeedableRng};
use std::collections::BTreeMap;

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

fn random_code(rng: &mut rand_chacha::ChaCha12Rng, kernel: &Kernel, t: u32) -> CodeSpec {
    let n = kernel.k().pow(t);
    let p = kernel.q().get();
    let mut frozen = BTreeMap::new();
    for i in 0..n {
        if rng.next_u64().is_multiple_of(2) {
            frozen.insert(i, rng.next_u64() % p);
        }
    }
    CodeSpec::new(kernel.clone(), t, frozen).unwrap()
}

#[test]
fn noiseless_roundtrip_across_fields_and_kernels() {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(101);
    for p in [2u64, 3, 5] {
        for k in [2usize, 3] {
            let kernel = random_mixing_kernel(&mut rng, k, p);
            let t = 3u32;
            let code = random_code(&mut rng, &kernel, t);
            let clean_ec = ChannelModel::erasure(q(p), 0.0).unwrap();
            let clean_sc = ChannelModel::symmetric(q(p), 0.0).unwrap();
            for trial in 0..10u64 {
                let msg: Vec<u64> = (0..code.dimension()).map(|_| rng.next_u64() % p).collect();
                let ubar = code.extend_message(&msg).unwrap();
                for ch in [&clean_ec, &clean_sc] {
                    let post =
                        codeword_posteriors(&code, &ubar, ch, derive_seed(7, trial)).unwrap();
                    let out = decode_fast(&post, &code).unwrap();
                    assert_eq!(out.u_hat, ubar, "q={p} k={k}");
                    assert!(!out.inconsistent);
                }
            }
        }
    }
}

#[test]
fn genie_failure_bound_moderate_scale() {
    // block error rate of the real decoder stays below the summed
    // erasure-profile bound over the information set
    let kernel = g2();
    let eps = 0.4;
    let ch = ChannelModel::erasure(q(2), eps).unwrap();
    let t = 6u32;
    let (code, _) = construct_code(
        &ch,
        &kernel,
        t,
        SelectionTarget::Threshold(1e-2),
        ScoreMethod::Exact,
        0,
    )
    .unwrap();
    let profile = erasure_profile(&kernel, eps, t).unwrap();
    let bound: f64 = code
        .message_indices()
        .iter()
        .map(|&i| profile.values()[i])
        .sum();

    let trials = 2000u64;
    let mut errors = 0u64;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(303);
    for trial in 0..trials {
        let msg: Vec<u64> = (0..code.dimension()).map(|_| rng.next_u64() % 2).collect();
        let ubar = code.extend_message(&msg).unwrap();
        let post = codeword_posteriors(&code, &ubar, &ch, derive_seed(11, trial)).unwrap();
        let out = decode_fast(&post, &code).unwrap();
        errors += (out.u_hat != ubar) as u64;
    }
    let bler = errors as f64 / trials as f64;
    let sigma = (bound.min(1.0) * (1.0 - bound.min(1.0)) / trials as f64).sqrt();
    assert!(
        bler <= bound + 4.0 * sigma,
        "bler {bler} exceeds union bound {bound} + 4 sigma {sigma}"
    );
}

#[test]
fn genie_error_rates_respect_entropy_bound_per_index() {
    // per-index genie error frequency <= exact conditional entropy in bits
    for (kernel, p, t) in [(g2(), 2u64, 6u32), {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(404);
        (random_mixing_kernel(&mut rng, 2, 3), 3, 4)
    }] {
        let eps = 0.4;
        let ch = ChannelModel::erasure(q(p), eps).unwrap();
        let code = CodeSpec::new(kernel.clone(), t, BTreeMap::new()).unwrap();
        let n = code.n();
        let profile = erasure_profile(&kernel, eps, t).unwrap();
        let log_q = (p as f64).log2();

        let trials = 4000u64;
        let mut counts = vec![0u64; n];
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(505);
        for trial in 0..trials {
            let ubar: Vec<u64> = (0..n).map(|_| rng.next_u64() % p).collect();
            let post = codeword_posteriors(&code, &ubar, &ch, derive_seed(13, trial)).unwrap();
            let flags = decode_genie(&post, &ubar, &code).unwrap();
            for (c, f) in counts.iter_mut().zip(flags) {
                *c += f as u64;
            }
        }
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / trials as f64;
            let bound = (profile.values()[i] * log_q).min(1.0);
            let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
            assert!(
                freq <= bound + 4.0 * sigma + 1e-12,
                "q={p} index {i}: frequency {freq} vs entropy bound {bound}"
            );
        }
    }
}

#[test]
fn constructed_code_beats_arbitrary_code() {
    // sanity: picking the best indices by the exact profile gives a lower
    // block error rate than freezing an arbitrary prefix at the same rate
    let kernel = g2();
    let eps = 0.3;
    let ch = ChannelModel::erasure(q(2), eps).unwrap();
    let t = 5u32;
    let n = kernel.k().pow(t);
    let (good, _) = construct_code(
        &ch,
        &kernel,
        t,
        SelectionTarget::Rate(0.4),
        ScoreMethod::Exact,
        0,
    )
    .unwrap();
    let dim = good.dimension();
    let naive_frozen: BTreeMap<usize, u64> = (0..n - dim).map(|i| (i, 0u64)).collect();
    let naive = CodeSpec::new(kernel.clone(), t, naive_frozen).unwrap();

    let trials = 1500u64;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(606);
    let mut errors = [0u64; 2];
    for trial in 0..trials {
        for (slot, code) in [&good, &naive].into_iter().enumerate() {
            let msg: Vec<u64> = (0..code.dimension()).map(|_| rng.next_u64() % 2).collect();
            let ubar = code.extend_message(&msg).unwrap();
            let post = codeword_posteriors(code, &ubar, &ch, derive_seed(17, trial)).unwrap();
            let out = decode_fast(&post, code).unwrap();
            errors[slot] += (out.u_hat != ubar) as u64;
        }
    }
    assert!(
        errors[0] < errors[1],
        "constructed code ({}) should beat naive prefix code ({})",
        errors[0],
        errors[1]
    );
}
