//! Polar coding over prime fields with arbitrary mixing kernels.
//!
//! The crate provides exact F_q linear algebra, kernel validation, fast
//! tensor-power encoding, successive-cancellation decoding (reference,
//! fast, and genie-aided), exact erasure-channel code construction with a
//! brute-force oracle, and a small lab for measuring polarization behavior
//! and checking the entropy inequalities behind it.

pub mod channel;
pub mod code;
pub mod construction;
pub mod decoder;
pub mod field;
pub mod kernel;
pub mod polarlab;
pub mod transform;

pub use channel::{ChannelKind, ChannelModel, SymbolPosterior};
pub use code::{CodeMeta, CodeSpec};
pub use construction::{
    construct_code, erasure_profile, erasure_step, ErasureProfile, IndexScore, ScoreMethod,
    SelectionTarget,
};
pub use decoder::{decode_fast, decode_genie, decode_reference, DecodeOutcome};
pub use field::{FieldMatrix, PrimeModulus};
pub use kernel::{check_mixing, Kernel, MixingReport};
pub use transform::{encode_fast, encode_reference, polar_transform_fast, tensor_matrix};
