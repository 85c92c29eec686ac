//! Empirical verification of polarization behavior and brute-force oracles
//! for the entropy inequalities the analysis rests on.
//!
//! Everything here runs on distributions small enough to enumerate exactly:
//! joint tables over (X in F_q, A in a finite alphabet), single kernel steps
//! on the erasure channel, and whole erasure profiles.

use crate::construction::{pairwise_sum, ErasureProfile};
use crate::field::{FieldMatrix, PrimeModulus};
use crate::kernel::Kernel;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolarLabError {
    #[error("kernel is not mixing")]
    NotMixing,
    #[error("invalid distribution: {0}")]
    Shape(String),
}

const NORM_TOLERANCE: f64 = 1e-12;

/// An explicit joint distribution of a pair (X in F_q, A in [a_size]).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    q: PrimeModulus,
    a_size: usize,
    /// probs[x * a_size + a]
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(q: PrimeModulus, a_size: usize, probs: Vec<f64>) -> Result<Self, PolarLabError> {
        if a_size == 0 || probs.len() != q.get() as usize * a_size {
            return Err(PolarLabError::Shape(format!(
                "expected {} x {a_size} table, got {} entries",
                q.get(),
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p < 0.0) {
            return Err(PolarLabError::Shape("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(PolarLabError::Shape(format!("table sums to {total}")));
        }
        Ok(JointDistribution { q, a_size, probs })
    }

    /// X uniform over F_q, A a single dummy symbol.
    pub fn uniform_x(q: PrimeModulus) -> Self {
        let qv = q.get() as usize;
        JointDistribution {
            q,
            a_size: 1,
            probs: vec![1.0 / qv as f64; qv],
        }
    }

    pub fn q(&self) -> PrimeModulus {
        self.q
    }

    pub fn a_size(&self) -> usize {
        self.a_size
    }

    pub fn prob(&self, x: u64, a: usize) -> f64 {
        self.probs[x as usize * self.a_size + a]
    }

    /// Marginal distribution of X.
    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.q.get())
            .map(|x| (0..self.a_size).map(|a| self.prob(x, a)).sum())
            .collect()
    }

    /// Exact normalized conditional entropy H(X | A) / log2 q.
    pub fn cond_entropy(&self) -> f64 {
        let qv = self.q.get();
        let mut h = 0.0;
        for a in 0..self.a_size {
            let pa: f64 = (0..qv).map(|x| self.prob(x, a)).sum();
            if pa <= 0.0 {
                continue;
            }
            for x in 0..qv {
                let p = self.prob(x, a);
                if p > 0.0 {
                    h -= p * (p / pa).log2();
                }
            }
        }
        h / (qv as f64).log2()
    }
}

/// Exact normalized conditional q-ary entropy of a joint table.
pub fn cond_entropy(j: &JointDistribution) -> f64 {
    j.cond_entropy()
}

/// Squared L2 distance to uniform together with the Fourier magnitudes
/// |D_hat(k)| = |E omega^(jk)|, omega = exp(-2 pi i / q).
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGap {
    pub d2_squared: f64,
    pub fourier_magnitudes: Vec<f64>,
}

pub fn l2_uniform_gap(dist: &[f64]) -> UniformGap {
    let q = dist.len();
    let uniform = 1.0 / q as f64;
    let d2_squared = dist.iter().map(|&p| (p - uniform) * (p - uniform)).sum();
    let fourier_magnitudes = (0..q)
        .map(|k| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (j, &p) in dist.iter().enumerate() {
                let angle = -2.0 * std::f64::consts::PI * (j * k) as f64 / q as f64;
                re += p * angle.cos();
                im += p * angle.sin();
            }
            (re * re + im * im).sqrt()
        })
        .collect();
    UniformGap {
        d2_squared,
        fourier_magnitudes,
    }
}

/// Outcome of one inequality check: measured slack = rhs - lhs (or the
/// absolute equality defect, negated, for identities).
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub pass: bool,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub checks: Vec<InequalityCheck>,
}

impl InequalityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

const CHECK_TOLERANCE: f64 = 1e-9;

/// Exhaustive-summation verification of the sum-entropy facts on a pair of
/// independent joint tables:
///
/// (a) H(X1 + X2 | A1, A2) >= H(X1 | A1)
/// (b) H(X1 | X1 + X2, A1, A2) = 2 H(X1 | A1) - H(X1 + X2 | A1, A2)
///     evaluated on two independent copies of `j1` (the identity needs
///     identically distributed pairs)
/// (c) d2(X, U)^2 / (2 log2 q) <= 1 - H(X), applied to both marginals
/// (d) d2(X1 + X2, U)^2 <= q * d2(X1, U)^2 * d2(X2, U)^2
pub fn verify_entropy_inequalities(
    j1: &JointDistribution,
    j2: &JointDistribution,
) -> Result<InequalityReport, PolarLabError> {
    if j1.q() != j2.q() {
        return Err(PolarLabError::Shape("mismatched fields".into()));
    }
    let q = j1.q();
    let log_q = (q.get() as f64).log2();

    let h1 = j1.cond_entropy();
    let h_sum = pair_sum_entropy(j1, j2, 1, q);
    let a_slack = h_sum - h1;

    let h1_sum_iid = pair_sum_entropy(j1, j1, 1, q);
    let lhs_b = pair_cond_sum_entropy(j1, j1, 1, q);
    let rhs_b = 2.0 * h1 - h1_sum_iid;
    let b_defect = (lhs_b - rhs_b).abs();

    let gap1 = l2_uniform_gap(&j1.marginal_x());
    let gap2 = l2_uniform_gap(&j2.marginal_x());
    let hx1 = marginal_entropy(&j1.marginal_x()) / log_q;
    let hx2 = marginal_entropy(&j2.marginal_x()) / log_q;
    let c_slack = f64::min(
        (1.0 - hx1) - gap1.d2_squared / (2.0 * log_q),
        (1.0 - hx2) - gap2.d2_squared / (2.0 * log_q),
    );

    let sum_marginal = convolve(&j1.marginal_x(), &j2.marginal_x(), q);
    let gap_sum = l2_uniform_gap(&sum_marginal);
    let d_slack = q.get() as f64 * gap1.d2_squared * gap2.d2_squared - gap_sum.d2_squared;

    Ok(InequalityReport {
        checks: vec![
            InequalityCheck {
                name: "sum-increases-entropy",
                pass: a_slack >= -CHECK_TOLERANCE,
                slack: a_slack,
            },
            InequalityCheck {
                name: "chain-identity",
                pass: b_defect <= CHECK_TOLERANCE,
                slack: -b_defect,
            },
            InequalityCheck {
                name: "pinsker-lower",
                pass: c_slack >= -CHECK_TOLERANCE,
                slack: c_slack,
            },
            InequalityCheck {
                name: "fourier-product",
                pass: d_slack >= -CHECK_TOLERANCE,
                slack: d_slack,
            },
        ],
    })
}

fn marginal_entropy(dist: &[f64]) -> f64 {
    -dist
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

fn convolve(d1: &[f64], d2: &[f64], q: PrimeModulus) -> Vec<f64> {
    let qv = q.get() as usize;
    let mut out = vec![0f64; qv];
    for (x, &p1) in d1.iter().enumerate() {
        for (y, &p2) in d2.iter().enumerate() {
            out[(x + y) % qv] += p1 * p2;
        }
    }
    out
}

/// H(X1 + alpha X2 | A1, A2) / log2 q for independent pairs.
pub fn pair_sum_entropy(
    j1: &JointDistribution,
    j2: &JointDistribution,
    alpha: u64,
    q: PrimeModulus,
) -> f64 {
    let qv = q.get();
    // key = (a1, a2), value = distribution of x1 + alpha x2
    let mut table = vec![0f64; j1.a_size() * j2.a_size() * qv as usize];
    for x1 in 0..qv {
        for a1 in 0..j1.a_size() {
            let p1 = j1.prob(x1, a1);
            if p1 == 0.0 {
                continue;
            }
            for x2 in 0..qv {
                let s = q.add(x1, q.mul(alpha, x2));
                for a2 in 0..j2.a_size() {
                    let idx = ((a1 * j2.a_size() + a2) * qv as usize) + s as usize;
                    table[idx] += p1 * j2.prob(x2, a2);
                }
            }
        }
    }
    grouped_cond_entropy(&table, qv as usize) / (qv as f64).log2()
}

/// H(X2 | X1 + alpha X2, A1, A2) / log2 q for independent pairs.
pub fn pair_cond_sum_entropy(
    j1: &JointDistribution,
    j2: &JointDistribution,
    alpha: u64,
    q: PrimeModulus,
) -> f64 {
    let qv = q.get();
    // key = (sum, a1, a2), value = distribution of x2
    let keys = qv as usize * j1.a_size() * j2.a_size();
    let mut table = vec![0f64; keys * qv as usize];
    for x1 in 0..qv {
        for a1 in 0..j1.a_size() {
            let p1 = j1.prob(x1, a1);
            if p1 == 0.0 {
                continue;
            }
            for x2 in 0..qv {
                let s = q.add(x1, q.mul(alpha, x2)) as usize;
                for a2 in 0..j2.a_size() {
                    let key = (s * j1.a_size() + a1) * j2.a_size() + a2;
                    table[key * qv as usize + x2 as usize] += p1 * j2.prob(x2, a2);
                }
            }
        }
    }
    grouped_cond_entropy(&table, qv as usize) / (qv as f64).log2()
}

/// H((U M)_col | (U M)_{<col}, A_0, ..., A_{k-1}) / log2 q where the U_i are
/// the X components of independent pairs and the matrix acts on the right.
pub fn kernel_output_entropy(
    pairs: &[JointDistribution],
    m: &FieldMatrix,
    col: usize,
    q: PrimeModulus,
) -> f64 {
    let qv = q.get() as usize;
    let k = pairs.len();
    assert_eq!(m.rows(), k);
    let a_sizes: Vec<usize> = pairs.iter().map(|p| p.a_size()).collect();
    let a_total: usize = a_sizes.iter().product();
    let prefix = qv.pow(col as u32);
    let mut table = vec![0f64; prefix * a_total * qv];

    let mut u = vec![0u64; k];
    let mut a = vec![0usize; k];
    loop {
        // joint probability of this (u, a) assignment
        let mut p = 1f64;
        for i in 0..k {
            p *= pairs[i].prob(u[i], a[i]);
        }
        if p > 0.0 {
            let mut vprefix = 0usize;
            for c in 0..col {
                let vc = (0..k).fold(0u64, |acc, r| q.add(acc, q.mul(u[r], m.get(r, c))));
                vprefix = vprefix * qv + vc as usize;
            }
            let vcol = (0..k).fold(0u64, |acc, r| q.add(acc, q.mul(u[r], m.get(r, col))));
            let akey = a
                .iter()
                .zip(&a_sizes)
                .fold(0usize, |acc, (&ai, &sz)| acc * sz + ai);
            table[(vprefix * a_total + akey) * qv + vcol as usize] += p;
        }
        // odometer over (u, a)
        let mut i = 0;
        loop {
            if i == k {
                return grouped_cond_entropy(&table, qv) / (qv as f64).log2();
            }
            u[i] += 1;
            if u[i] < qv as u64 {
                break;
            }
            u[i] = 0;
            a[i] += 1;
            if a[i] < a_sizes[i] {
                break;
            }
            a[i] = 0;
            i += 1;
        }
    }
}

/// Conditional entropy in bits of a table laid out as [key][value], keys
/// weighted by their total mass.
fn grouped_cond_entropy(table: &[f64], values: usize) -> f64 {
    let mut h = 0.0;
    for group in table.chunks(values) {
        let mass: f64 = group.iter().sum();
        if mass <= 0.0 {
            continue;
        }
        for &p in group {
            if p > 0.0 {
                h -= p * (p / mass).log2();
            }
        }
    }
    h
}

/// Default tau values reported by [`local_polarization_report`].
pub const DEFAULT_TAUS: [f64; 2] = [0.1, 0.01];

/// Single-step suction measurement at one factor c.
#[derive(Debug, Clone, PartialEq)]
pub struct SuctionEntry {
    pub c: f64,
    /// Largest tau such that some child drops below z/c throughout (0, tau].
    pub low_tau: f64,
    /// Minimum fraction of children achieving the drop on that range.
    pub low_alpha: f64,
    /// Mirror-image threshold at the high end (in terms of 1 - z).
    pub high_tau: f64,
    pub high_alpha: f64,
}

/// Measured single-step polarization behavior of a kernel on the erasure
/// channel.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPolarizationReport {
    /// (tau, minimum over grid points z in [tau, 1 - tau] of the mean
    /// squared increment (1/k) sum_j (z'_j - z)^2).
    pub theta_of_tau: Vec<(f64, f64)>,
    pub suction: Vec<SuctionEntry>,
    /// The guaranteed per-step selection probability 1/k.
    pub alpha: f64,
}

/// Measures variance-in-the-middle and suction-at-the-ends for a mixing
/// kernel on the erasure channel.
pub fn local_polarization_report(
    kernel: &Kernel,
    z_grid: &[f64],
    c_list: &[f64],
) -> Result<LocalPolarizationReport, PolarLabError> {
    if !kernel.is_mixing() {
        return Err(PolarLabError::NotMixing);
    }
    let k = kernel.k() as f64;

    let theta_of_tau = DEFAULT_TAUS
        .iter()
        .map(|&tau| {
            let theta = z_grid
                .iter()
                .filter(|&&z| z >= tau && z <= 1.0 - tau)
                .map(|&z| {
                    let step = crate::construction::erasure_step(kernel, z);
                    step.iter().map(|&zj| (zj - z) * (zj - z)).sum::<f64>() / k
                })
                .fold(f64::INFINITY, f64::min);
            (tau, theta)
        })
        .collect();

    let suction = c_list
        .iter()
        .map(|&c| {
            let low = suction_threshold(kernel, c, false);
            let high = suction_threshold(kernel, c, true);
            SuctionEntry {
                c,
                low_tau: low.0,
                low_alpha: low.1,
                high_tau: high.0,
                high_alpha: high.1,
            }
        })
        .collect();

    Ok(LocalPolarizationReport {
        theta_of_tau,
        suction,
        alpha: 1.0 / k,
    })
}

/// Number of children achieving the factor-c drop at parameter z.
fn suction_count(kernel: &Kernel, c: f64, z: f64, high_end: bool) -> usize {
    crate::construction::erasure_step(kernel, z)
        .iter()
        .filter(|&&zj| {
            if high_end {
                1.0 - zj <= (1.0 - z) / c
            } else {
                zj <= z / c
            }
        })
        .count()
}

/// Largest tau with at least one child achieving the drop on all of
/// (0, tau] (low end; mirrored for the high end), located by scanning for
/// the first failure and bisecting the boundary. Also returns the minimum
/// achieved fraction over the certified scan points.
fn suction_threshold(kernel: &Kernel, c: f64, high_end: bool) -> (f64, f64) {
    let k = kernel.k();
    let param = |z: f64| if high_end { 1.0 - z } else { z };
    let count = |z: f64| suction_count(kernel, c, param(z), high_end);

    // scan outward from the boundary for the first failure, tracking the
    // achieved fraction at every point that held
    let steps = 1024;
    let mut fail = None;
    let mut alpha: f64 = 1.0;
    for i in 1..=steps {
        let d = i as f64 / steps as f64;
        let achieved = count(d);
        if achieved == 0 {
            fail = Some(d);
            break;
        }
        alpha = alpha.min(achieved as f64 / k as f64);
    }
    let tau = match fail {
        None => 1.0,
        Some(first_fail) => {
            let mut lo = first_fail - 1.0 / steps as f64;
            let mut hi = first_fail;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if count(mid) >= 1 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    };
    if tau > 0.0 {
        alpha = alpha.min(count(tau) as f64 / k as f64);
    }
    (tau, alpha)
}

/// Polarization summary for one level t.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationStats {
    pub t: u32,
    pub mean: f64,
    /// Share of branches with value strictly inside (tau, 1 - tau).
    pub fraction_tau: f64,
    /// Share strictly inside (gamma^t, 1 - gamma^t).
    pub fraction_gamma_t: f64,
    /// Mean of min(sqrt(z), sqrt(1 - z)).
    pub potential: f64,
}

/// Per-level statistics of a sequence of profiles.
pub fn polarization_stats(
    profiles: &[ErasureProfile],
    gamma: f64,
    tau: f64,
) -> Vec<PolarizationStats> {
    profiles
        .iter()
        .map(|profile| {
            let t = profile.t();
            let n = profile.len() as f64;
            let gamma_t = gamma.powi(t as i32);
            let inside = |lo: f64, v: f64| v > lo && v < 1.0 - lo;
            let fraction_tau =
                profile.values().iter().filter(|&&v| inside(tau, v)).count() as f64 / n;
            let fraction_gamma_t = profile
                .values()
                .iter()
                .filter(|&&v| inside(gamma_t, v))
                .count() as f64
                / n;
            let potentials: Vec<f64> = profile
                .values()
                .iter()
                .map(|&v| v.max(0.0).sqrt().min((1.0 - v).max(0.0).sqrt()))
                .collect();
            PolarizationStats {
                t,
                mean: profile.mean(),
                fraction_tau,
                fraction_gamma_t,
                potential: pairwise_sum(&potentials) / n,
            }
        })
        .collect()
}
