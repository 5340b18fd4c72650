//! Normal approximation to the maximal rate of the real AWGN channel at
//! finite block length.

use super::special::q_func_inv;
use super::AnalysisError;

/// `C = ½ log₂(1 + snr)` bits per real channel use.
pub fn awgn_capacity(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

/// Real AWGN channel dispersion in bits², `snr(snr+2) / (2(snr+1)²) · log₂²e`.
pub fn awgn_dispersion(snr: f64) -> f64 {
    let log2e = std::f64::consts::LOG2_E;
    snr * (snr + 2.0) / (2.0 * (snr + 1.0) * (snr + 1.0)) * log2e * log2e
}

/// `C - √(V/N) Q⁻¹(ε) + log₂(N) / (2N)`.
pub fn normal_approx_rate(snr: f64, n: usize, epsilon: f64) -> Result<f64, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::DomainError(
            "block length must be positive".into(),
        ));
    }
    if !(snr > 0.0 && snr.is_finite()) {
        return Err(AnalysisError::DomainError(format!(
            "snr must be positive, got {snr}"
        )));
    }
    let nf = n as f64;
    let back_off = (awgn_dispersion(snr) / nf).sqrt() * q_func_inv(epsilon)?;
    Ok(awgn_capacity(snr) - back_off + nf.log2() / (2.0 * nf))
}
