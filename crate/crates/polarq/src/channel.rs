//! Symmetric memoryless channels over F_q: sampling, posteriors, capacity.
//!
//! Outputs are plain integers. The erasure channel reports the distinguished
//! symbol `q` for an erased position; custom channels report indices into
//! their output alphabet.
//!
//! RNG contract (v1): `transmit` drives a ChaCha12 stream seeded with
//! `seed_from_u64(seed)` and consumes exactly two `u64` draws per symbol in
//! index order (noise event, then replacement symbol), so recorded fixtures
//! stay stable.

use crate::field::PrimeModulus;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

/// Version tag for the transmit RNG contract, recorded in run manifests.
pub const RNG_CONTRACT: &str = "chacha12/two-draws-per-symbol/v1";

const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("symbol {symbol} outside the output alphabet of size {alphabet}")]
    Alphabet { symbol: u64, alphabet: usize },
    #[error("transition matrix is not row-stochastic")]
    NotStochastic,
    #[error("transition matrix is not symmetric")]
    NotSymmetric,
    #[error("unrecognized channel spec '{0}' (expected bec:<eps>, qsc:<p> or custom:<path>)")]
    Parse(String),
    #[error("cannot read transition matrix: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    /// q-ary erasure channel with erasure probability epsilon.
    Erasure { epsilon: f64 },
    /// q-ary symmetric channel: flips to a uniformly random other symbol
    /// with total probability p.
    Symmetric { p: f64 },
    /// Explicit row-stochastic transition matrix, q inputs by |Y| outputs.
    Custom { transition: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    q: PrimeModulus,
    kind: ChannelKind,
}

/// A probability distribution over F_q for one received symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPosterior {
    probs: Vec<f64>,
}

impl SymbolPosterior {
    pub fn new(probs: Vec<f64>) -> Result<Self, ChannelError> {
        let sum: f64 = probs.iter().sum();
        if probs
            .iter()
            .any(|&p| !(0.0..=1.0 + PROB_TOLERANCE).contains(&p))
            || (sum - 1.0).abs() > PROB_TOLERANCE
        {
            return Err(ChannelError::InvalidProbability(sum));
        }
        Ok(SymbolPosterior { probs })
    }

    pub fn point_mass(q: u64, x: u64) -> Self {
        let mut probs = vec![0.0; q as usize];
        probs[x as usize] = 1.0;
        SymbolPosterior { probs }
    }

    pub fn uniform(q: u64) -> Self {
        SymbolPosterior {
            probs: vec![1.0 / q as f64; q as usize],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

impl ChannelModel {
    pub fn erasure(q: PrimeModulus, epsilon: f64) -> Result<Self, ChannelError> {
        check_prob(epsilon)?;
        Ok(ChannelModel {
            q,
            kind: ChannelKind::Erasure { epsilon },
        })
    }

    pub fn symmetric(q: PrimeModulus, p: f64) -> Result<Self, ChannelError> {
        check_prob(p)?;
        Ok(ChannelModel {
            q,
            kind: ChannelKind::Symmetric { p },
        })
    }

    /// Builds a custom channel; rejects non-stochastic and non-symmetric
    /// transition matrices.
    pub fn custom(q: PrimeModulus, transition: Vec<Vec<f64>>) -> Result<Self, ChannelError> {
        if transition.len() != q.get() as usize || transition.is_empty() {
            return Err(ChannelError::NotStochastic);
        }
        let width = transition[0].len();
        for row in &transition {
            if row.len() != width || width == 0 {
                return Err(ChannelError::NotStochastic);
            }
            if row
                .iter()
                .any(|&p| !(0.0..=1.0 + PROB_TOLERANCE).contains(&p))
            {
                return Err(ChannelError::NotStochastic);
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_TOLERANCE {
                return Err(ChannelError::NotStochastic);
            }
        }
        if !verify_symmetry(&transition) {
            return Err(ChannelError::NotSymmetric);
        }
        Ok(ChannelModel {
            q,
            kind: ChannelKind::Custom { transition },
        })
    }

    /// Parses the CLI channel syntax: `bec:<eps>`, `qsc:<p>`,
    /// `custom:<path>` (text file, one row of decimals per input symbol).
    pub fn parse(q: PrimeModulus, spec: &str) -> Result<Self, ChannelError> {
        if let Some(eps) = spec.strip_prefix("bec:") {
            let eps: f64 = eps.parse().map_err(|_| ChannelError::Parse(spec.into()))?;
            return ChannelModel::erasure(q, eps);
        }
        if let Some(p) = spec.strip_prefix("qsc:") {
            let p: f64 = p.parse().map_err(|_| ChannelError::Parse(spec.into()))?;
            return ChannelModel::symmetric(q, p);
        }
        if let Some(path) = spec.strip_prefix("custom:") {
            let text =
                std::fs::read_to_string(path).map_err(|e| ChannelError::Io(e.to_string()))?;
            let mut rows = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let row: Result<Vec<f64>, _> =
                    line.split_whitespace().map(|v| v.parse::<f64>()).collect();
                rows.push(
                    row.map_err(|_| ChannelError::Parse(format!("bad matrix row '{line}'")))?,
                );
            }
            return ChannelModel::custom(q, rows);
        }
        Err(ChannelError::Parse(spec.into()))
    }

    pub fn q(&self) -> PrimeModulus {
        self.q
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    /// Canonical spec string, suitable for manifests and code metadata.
    pub fn spec_string(&self) -> String {
        match &self.kind {
            ChannelKind::Erasure { epsilon } => format!("bec:{epsilon}"),
            ChannelKind::Symmetric { p } => format!("qsc:{p}"),
            ChannelKind::Custom { transition } => {
                format!("custom:{}x{}", transition.len(), transition[0].len())
            }
        }
    }

    /// Number of distinct output symbols.
    pub fn output_alphabet_size(&self) -> usize {
        match &self.kind {
            ChannelKind::Erasure { .. } => self.q.get() as usize + 1,
            ChannelKind::Symmetric { .. } => self.q.get() as usize,
            ChannelKind::Custom { transition } => transition[0].len(),
        }
    }

    /// I.i.d. per-symbol channel action, deterministic given the seed.
    pub fn transmit(&self, z: &[u64], seed: u64) -> Vec<u64> {
        let q = self.q.get();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        z.iter()
            .map(|&sym| {
                debug_assert!(sym < q);
                let event = unit_f64(&mut rng);
                let pick = rng.next_u64();
                match &self.kind {
                    ChannelKind::Erasure { epsilon } => {
                        if event < *epsilon {
                            q // erasure mark
                        } else {
                            sym
                        }
                    }
                    ChannelKind::Symmetric { p } => {
                        if event < *p {
                            (sym + 1 + pick % (q - 1)) % q
                        } else {
                            sym
                        }
                    }
                    ChannelKind::Custom { transition } => {
                        let row = &transition[sym as usize];
                        let mut acc = 0.0;
                        let mut out = row.len() - 1;
                        for (y, &pr) in row.iter().enumerate() {
                            acc += pr;
                            if event < acc {
                                out = y;
                                break;
                            }
                        }
                        out as u64
                    }
                }
            })
            .collect()
    }

    /// Per-symbol Bayes posterior on the channel input under the uniform
    /// input prior.
    pub fn posteriors(&self, y: &[u64]) -> Result<Vec<SymbolPosterior>, ChannelError> {
        y.iter().map(|&sym| self.posterior(sym)).collect()
    }

    fn posterior(&self, y: u64) -> Result<SymbolPosterior, ChannelError> {
        let q = self.q.get();
        let alphabet = self.output_alphabet_size();
        if y >= alphabet as u64 {
            return Err(ChannelError::Alphabet {
                symbol: y,
                alphabet,
            });
        }
        Ok(match &self.kind {
            ChannelKind::Erasure { .. } => {
                if y == q {
                    SymbolPosterior::uniform(q)
                } else {
                    SymbolPosterior::point_mass(q, y)
                }
            }
            ChannelKind::Symmetric { p } => {
                let off = p / (q - 1) as f64;
                let probs = (0..q).map(|x| if x == y { 1.0 - p } else { off }).collect();
                SymbolPosterior { probs }
            }
            ChannelKind::Custom { transition } => {
                let col: Vec<f64> = transition.iter().map(|row| row[y as usize]).collect();
                let total: f64 = col.iter().sum();
                SymbolPosterior {
                    probs: col.iter().map(|&v| v / total).collect(),
                }
            }
        })
    }

    /// Normalized capacity I(Z; Y) / log2 q with uniform input.
    pub fn capacity(&self) -> f64 {
        let q = self.q.get() as f64;
        match &self.kind {
            ChannelKind::Erasure { epsilon } => 1.0 - epsilon,
            ChannelKind::Symmetric { p } => {
                1.0 - (binary_entropy(*p) + p * (q - 1.0).log2()) / q.log2()
            }
            ChannelKind::Custom { transition } => {
                let width = transition[0].len();
                let mut h_y = 0.0;
                for y in 0..width {
                    let mix: f64 = transition.iter().map(|row| row[y]).sum::<f64>() / q;
                    h_y -= plogp(mix);
                }
                let h_y_given_z: f64 = transition
                    .iter()
                    .map(|row| -row.iter().map(|&p| plogp(p)).sum::<f64>())
                    .sum::<f64>()
                    / q;
                (h_y - h_y_given_z) / q.log2()
            }
        }
    }
}

fn check_prob(p: f64) -> Result<(), ChannelError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ChannelError::InvalidProbability(p))
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

pub(crate) fn binary_entropy(p: f64) -> f64 {
    -plogp(p) - plogp(1.0 - p)
}

/// Uniform f64 in [0, 1) from the top 53 bits of one u64 draw.
pub(crate) fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Decides whether a row-stochastic matrix describes a symmetric channel:
/// every pair of input rows must be related by an output relabeling
/// (multiset equality, made explicit by matching sorted entries). Column
/// masses then agree within each class of equivalent outputs.
pub fn verify_symmetry(transition: &[Vec<f64>]) -> bool {
    if transition.is_empty() {
        return false;
    }
    let width = transition[0].len();
    if transition.iter().any(|row| row.len() != width) {
        return false;
    }
    let tol = 1e-9;
    let sorted = |row: &[f64]| {
        let mut v = row.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    let base = sorted(&transition[0]);
    for row in &transition[1..] {
        let other = sorted(row);
        if base.iter().zip(&other).any(|(a, b)| (a - b).abs() > tol) {
            return false;
        }
        // explicit bijection: greedily match each entry of `row` to an
        // unused output of row 0 carrying the same probability
        let mut used = vec![false; width];
        for &v in row {
            match (0..width).find(|&j| !used[j] && (transition[0][j] - v).abs() <= tol) {
                Some(j) => used[j] = true,
                None => return false,
            }
        }
    }
    true
}
