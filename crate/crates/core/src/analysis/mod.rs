//! Analytic performance: special functions, quadrature, BLER expressions,
//! coding gains and the finite-blocklength normal approximation.

pub mod bler;
pub mod fbl;
pub mod gains;
pub mod quadrature;
pub mod special;

use thiserror::Error;

pub use bler::{achievability_bound, bler_single_layer_exact, bler_two_layer_bound};
pub use fbl::{awgn_capacity, awgn_dispersion, normal_approx_rate};
pub use gains::{
    distance_profile, effective_coding_gain, gain_report, min_distance_exhaustive,
    nominal_coding_gain, CitedGain, CodingGain, DistanceProfile, GainKind, GainReport, CITED_GAINS,
};
pub use quadrature::{integrate, Integral, QuadratureConfig};
pub use special::{ln_q, marcum_q_half, q_func, q_func_inv};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    QuadratureNonConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("codebook has 2^{bits} words, above the 2^{limit} enumeration limit")]
    CodebookTooLarge { bits: usize, limit: usize },
    #[error("block length {n} is not valid for {kind}")]
    UnsupportedN { kind: &'static str, n: usize },
}
