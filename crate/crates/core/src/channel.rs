//! Real AWGN channel, SNR conversions and replayable random streams.
//!
//! Noise is per real dimension: `SNR = E_s / σ²` and `E_b/N_0 = SNR / (2R)`.
//!
//! # Random streams
//!
//! An [`RngStream`] `(seed, stream_id)` is a ChaCha8 keystream: the key is
//! derived from `seed` by `rand_core`'s portable `seed_from_u64`, and
//! `stream_id` selects the 64-bit ChaCha stream (nonce). Trial `t` of a stream
//! starts at word offset `t · 2^32`, so any trial can be replayed without
//! generating the ones before it.
//!
//! Gaussian variates use the Box-Muller transform on pairs of 64-bit words:
//! `u = (w₁ >> 11) + 1) / 2^53 ∈ (0, 1]`, `v = (w₂ >> 11) / 2^53 ∈ [0, 1)`,
//! `z₀ = √(-2 ln u) cos 2πv`, `z₁ = √(-2 ln u) sin 2πv`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decode::ChannelObservation;
use crate::encode::Codeword;
use crate::spec::ValidatedSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("code rate is zero; E_b/N_0 is undefined")]
    ZeroRate,
    #[error("noise standard deviation must be positive and finite, got {0}")]
    InvalidSigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    sigma: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Result<Self, ChannelError> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(NoiseModel { sigma })
        } else {
            Err(ChannelError::InvalidSigma(sigma))
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Identifies a reproducible random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Generator positioned at the start of trial `trial`.
    pub fn trial(&self, trial: u64) -> GaussianSource {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng.set_word_pos((trial as u128) << 32);
        GaussianSource { rng, spare: None }
    }

    /// Generator at the start of the stream.
    pub fn source(&self) -> GaussianSource {
        self.trial(0)
    }
}

/// Uniform words plus Box-Muller Gaussians from one ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

impl GaussianSource {
    /// Standard normal variate.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u = ((self.rng.next_u64() >> 11) + 1) as f64 * INV_2_53;
        let v = (self.rng.next_u64() >> 11) as f64 * INV_2_53;
        let r = (-2.0 * u.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * v).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

impl RngCore for GaussianSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// `y = c + v`, `v ~ N(0, σ² I)`.
pub fn transmit(
    c: &Codeword,
    model: &NoiseModel,
    source: &mut GaussianSource,
) -> ChannelObservation {
    let sigma = model.sigma;
    let y = c
        .samples
        .iter()
        .map(|&s| s + sigma * source.next_gaussian())
        .collect();
    ChannelObservation { y, sigma }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Noise standard deviation giving `E_b/N_0 = ebn0_db`:
/// `σ = sqrt(E_s / (2 R 10^{ebn0_db/10}))`.
pub fn sigma_from_ebn0(spec: &ValidatedSpec, ebn0_db: f64) -> Result<f64, ChannelError> {
    let rate = spec.code_rate();
    if rate <= 0.0 {
        return Err(ChannelError::ZeroRate);
    }
    Ok((spec.average_symbol_energy() / (2.0 * rate * db_to_linear(ebn0_db))).sqrt())
}

/// Noise standard deviation giving `SNR = E_s / σ² = snr_db`.
pub fn sigma_from_snr(spec: &ValidatedSpec, snr_db: f64) -> f64 {
    (spec.average_symbol_energy() / db_to_linear(snr_db)).sqrt()
}

/// `10 log10(E_s / σ²)`.
pub fn snr_from_sigma(spec: &ValidatedSpec, sigma: f64) -> f64 {
    10.0 * (spec.average_symbol_energy() / (sigma * sigma)).log10()
}

/// `10 log10(E_s / (2 R σ²))`.
pub fn ebn0_from_sigma(spec: &ValidatedSpec, sigma: f64) -> Result<f64, ChannelError> {
    let rate = spec.code_rate();
    if rate <= 0.0 {
        return Err(ChannelError::ZeroRate);
    }
    Ok(snr_from_sigma(spec, sigma) - 10.0 * (2.0 * rate).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{CodeSpec, LayerSpec};
    use proptest::prelude::*;

    #[test]
    fn single_layer_sigma_matches_closed_form() {
        for n in [16usize, 64, 256] {
            let spec = CodeSpec::single_layer(n, 1).validate().unwrap();
            for db in [-1.0, 2.0, 6.0] {
                let sigma = sigma_from_ebn0(&spec, db).unwrap();
                let expected_inv = 2.0 * (n as f64).log2() * db_to_linear(db);
                assert!((1.0 / (sigma * sigma) - expected_inv).abs() < 1e-9 * expected_inv);
            }
        }
    }

    #[test]
    fn unit_sigma_case() {
        // N=2, K=1, A={±2}: B = 2, R = 1, E_s = 2 = 2R, so σ = 1 at 0 dB
        let spec = CodeSpec::new(2, vec![LayerSpec::new(1, vec![-2.0, 2.0])])
            .validate()
            .unwrap();
        assert_eq!(spec.code_rate(), 1.0);
        assert!((spec.average_symbol_energy() - 2.0).abs() < 1e-15);
        assert!((sigma_from_ebn0(&spec, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn worked_example_at_zero_db() {
        let spec = CodeSpec::new(
            48,
            vec![
                LayerSpec::new(2, vec![-1.0, 1.0]),
                LayerSpec::new(2, vec![-2.0, 2.0]),
            ],
        )
        .validate()
        .unwrap();
        // σ² = E_s / (2 R) = (5/24) / 1
        let s = sigma_from_ebn0(&spec, 0.0).unwrap();
        assert!((s * s - 5.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn round_trips() {
        let spec = CodeSpec::two_layer_antipodal(32, 1).validate().unwrap();
        for db in [-3.0, 0.0, 6.0] {
            let s = sigma_from_ebn0(&spec, db).unwrap();
            let back = ebn0_from_sigma(&spec, s).unwrap();
            assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
            let snr = snr_from_sigma(&spec, s);
            assert!((sigma_from_snr(&spec, snr) - s).abs() < 1e-12 * s);
        }
    }

    #[test]
    fn determinism_and_addressability() {
        let stream = RngStream::new(42, 7);
        let c = Codeword {
            samples: vec![1.0, 0.0, -1.0, 0.0],
        };
        let model = NoiseModel::new(0.5).unwrap();
        let a = transmit(&c, &model, &mut stream.trial(3));
        let b = transmit(&c, &model, &mut stream.trial(3));
        assert_eq!(a, b);
        let other = transmit(&c, &model, &mut stream.trial(4));
        assert_ne!(a, other);
        let tiny = transmit(&c, &NoiseModel::new(1e-300).unwrap(), &mut stream.trial(0));
        assert!(tiny
            .y
            .iter()
            .zip(&c.samples)
            .all(|(y, s)| (y - s).abs() < 1e-290));
    }

    #[test]
    fn invalid_sigma() {
        assert!(NoiseModel::new(0.0).is_err());
        assert!(NoiseModel::new(f64::NAN).is_err());
    }

    #[test]
    fn variance_within_one_percent() {
        let mut src = RngStream::new(1, 0).source();
        let n = 1_000_000;
        let sigma = 1.7;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let v = sigma * src.next_gaussian();
            s1 += v;
            s2 += v * v;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.01, "var = {var}");
        assert!(mean.abs() < 5.0 * sigma / (n as f64).sqrt());
    }

    #[test]
    fn whiteness_and_stream_independence() {
        let n = 1_000_000;
        let a: Vec<f64> = {
            let mut s = RngStream::new(9, 0).source();
            (0..n).map(|_| s.next_gaussian()).collect()
        };
        let b: Vec<f64> = {
            let mut s = RngStream::new(9, 1).source();
            (0..n).map(|_| s.next_gaussian()).collect()
        };
        let bound = 4.0 / (n as f64).sqrt();
        let energy: f64 = a.iter().map(|v| v * v).sum();
        for lag in 1..=4 {
            let r: f64 = a.iter().zip(&a[lag..]).map(|(x, y)| x * y).sum::<f64>() / energy;
            assert!(r.abs() < bound, "lag {lag}: {r}");
        }
        let cross: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / energy;
        assert!(cross.abs() < bound, "cross {cross}");
    }

    proptest! {
        #[test]
        fn conversion_identity(n in 4usize..300, k in 1usize..3, db in -5.0f64..12.0) {
            prop_assume!(2 * k < n);
            let spec = CodeSpec::two_layer_antipodal(n, k).validate().unwrap();
            let s = sigma_from_ebn0(&spec, db).unwrap();
            let back = ebn0_from_sigma(&spec, s).unwrap();
            prop_assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
        }
    }
}
