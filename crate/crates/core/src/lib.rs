//! Orthogonal sparse superposition (OSS) codes for the real AWGN channel.
//!
//! A codeword is the superposition of `L` sparse layers with mutually disjoint
//! supports, rotated by an orthonormal dictionary. This crate provides:
//!
//! * [`spec`]: code parameterization, validation, rate and energy.
//! * [`combinadic`]: the bit-to-support bijection (lexicographic ranking).
//! * [`encode`]: the successive encoder.
//! * [`decode`]: element-wise MAP decoding with successive support
//!   cancellation, plus the ordered-statistics and two-stage decoders.
//! * [`channel`]: AWGN realization, SNR conversions and replayable RNG streams.
//! * [`analysis`]: special functions, quadrature, BLER expressions, coding
//!   gains and the finite-blocklength normal approximation.
//! * [`sim`]: the Monte Carlo sweep engine and report tables.

pub mod analysis;
pub mod channel;
pub mod combinadic;
pub mod decode;
pub mod dictionary;
pub mod encode;
pub mod sim;
pub mod spec;

pub use channel::{
    ebn0_from_sigma, sigma_from_ebn0, snr_from_sigma, transmit, NoiseModel, RngStream,
};
pub use decode::{
    dominance_margin, emap_ssc_decode, ordered_statistics_decode, two_stage_magnitude_decode,
    ChannelObservation, DecodeError, DecodeFlag, DecodeResult, DecoderKind,
};
pub use dictionary::DictionaryKind;
pub use encode::{encode, Codeword, EncodeError, LayerPlacement, MessageBits};
pub use spec::{validate_spec, CodeSpec, LayerSpec, SpecError, ValidatedSpec};
