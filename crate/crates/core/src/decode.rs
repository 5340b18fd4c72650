//! Decoders: E-MAP-SSC, ordered statistics, and the two-stage magnitude decoder.
//!
//! E-MAP-SSC works layer by layer on `x̂ = Uᵀ y`. For layer ℓ it scores every
//! index of the layer's pool with the element-wise posterior that the index
//! belongs to `I_ℓ`, keeps the `K_ℓ` best, assigns each the nearest amplitude
//! of `A_ℓ` and removes them from the free positions.
//!
//! Scores are handled as log-odds,
//!
//! ```text
//! ln P(n ∈ I | y) - ln P(n ∉ I | y)
//!     = ln(p / (1 - p)) - ln|A| + logsumexp_j ((2 y a_j - a_j²) / 2σ²)
//! ```
//!
//! with prior `p = K_ℓ / |pool|`. The posterior is a strictly increasing
//! function of the log-odds, so ranking by log-odds selects the same set while
//! never saturating at 1.0 in double precision.
//!
//! Top-K ties are broken toward the lowest index.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dictionary::invert_dictionary;
use crate::encode::{unplace, FreePositions, LayerPlacement, MessageBits, UnmapIssue};
use crate::spec::{LayerSpec, ValidatedSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("observation has length {actual}, code length is {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("noise standard deviation must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("observation contains a non-finite sample")]
    NonFiniteSample,
    #[error("decoder `{decoder}` does not support this code: {reason}")]
    UnsupportedSpecShape {
        decoder: &'static str,
        reason: &'static str,
    },
}

/// Received vector `y = c + v` and the noise standard deviation per real dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelObservation {
    pub y: Vec<f64>,
    pub sigma: f64,
}

impl ChannelObservation {
    pub fn new(y: Vec<f64>, sigma: f64) -> Self {
        ChannelObservation { y, sigma }
    }

    fn check(&self, n: usize) -> Result<(), DecodeError> {
        if self.y.len() != n {
            return Err(DecodeError::DimensionMismatch {
                expected: n,
                actual: self.y.len(),
            });
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(DecodeError::InvalidSigma(self.sigma));
        }
        if self.y.iter().any(|v| !v.is_finite()) {
            return Err(DecodeError::NonFiniteSample);
        }
        Ok(())
    }
}

/// Diagnostics attached to a decode. Any flag marks the block as erroneous in
/// simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecodeFlag {
    /// The estimated support has a rank no bit string maps to; the rank was
    /// clamped to the largest representable one.
    DecodeOverflow { layer: usize },
    /// The two-stage decoder found a sign split that disagrees with the layer
    /// sparsities; supports were repaired by ranking the selected samples.
    SupportSizeMismatch { layer: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub bits: MessageBits,
    pub placements: Vec<LayerPlacement>,
    pub flags: Vec<DecodeFlag>,
}

impl DecodeResult {
    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }
}

/// Work counters for one decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecodeStats {
    pub posterior_evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    EmapSsc,
    OrderedStats,
    TwoStage,
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::EmapSsc => "emap_ssc",
            DecoderKind::OrderedStats => "ordered_stats",
            DecoderKind::TwoStage => "two_stage",
        }
    }

    /// Checks that the decoder can handle `spec`.
    pub fn supports(&self, spec: &ValidatedSpec) -> Result<(), DecodeError> {
        match self {
            DecoderKind::EmapSsc => Ok(()),
            DecoderKind::OrderedStats => ordered_statistics_signs(spec).map(|_| ()),
            DecoderKind::TwoStage => two_stage_amplitude(spec).map(|_| ()),
        }
    }

    pub fn decode(
        &self,
        spec: &ValidatedSpec,
        obs: &ChannelObservation,
    ) -> Result<DecodeResult, DecodeError> {
        match self {
            DecoderKind::EmapSsc => emap_ssc_decode(spec, obs),
            DecoderKind::OrderedStats => ordered_statistics_decode(spec, obs),
            DecoderKind::TwoStage => two_stage_magnitude_decode(spec, obs),
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "emap_ssc" | "emap-ssc" => Ok(DecoderKind::EmapSsc),
            "ordered_stats" | "ordered-stats" | "osd" => Ok(DecoderKind::OrderedStats),
            "two_stage" | "two-stage" => Ok(DecoderKind::TwoStage),
            other => Err(format!(
                "unknown decoder `{other}` (expected emap_ssc, ordered_stats or two_stage)"
            )),
        }
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Log-odds that index `n` belongs to the layer, given its sample `y_n`.
pub fn support_log_odds(y_n: f64, alphabet: &[f64], prior: f64, sigma: f64) -> f64 {
    (prior / (1.0 - prior)).ln() + log_evidence(y_n, alphabet, 2.0 * sigma * sigma)
}

fn log_evidence(y_n: f64, alphabet: &[f64], two_var: f64) -> f64 {
    if alphabet.len() == 1 {
        let a = alphabet[0];
        (2.0 * y_n * a - a * a) / two_var
    } else {
        log_sum_exp(alphabet.iter().map(|&a| (2.0 * y_n * a - a * a) / two_var))
            - (alphabet.len() as f64).ln()
    }
}

/// Element-wise posterior `P(n ∈ I_ℓ | y_n)` with prior `K_ℓ / remaining`.
pub fn posterior_support_score(y_n: f64, layer: &LayerSpec, remaining: usize, sigma: f64) -> f64 {
    let prior = layer.k as f64 / remaining as f64;
    let lo = support_log_odds(y_n, &layer.alphabet, prior, sigma);
    // logistic, evaluated on the side that cannot overflow
    if lo >= 0.0 {
        1.0 / (1.0 + (-lo).exp())
    } else {
        let e = lo.exp();
        e / (1.0 + e)
    }
}

/// Larger score first, then lower index.
fn by_score_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    b.0.partial_cmp(&a.0)
        .unwrap_or(Ordering::Equal)
        .then(a.1.cmp(&b.1))
}

/// Moves the `k` best entries of `scored` to the front and returns their
/// indices, sorted ascending.
fn top_k(scored: &mut [(f64, usize)], k: usize) -> Vec<usize> {
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, by_score_then_index);
    }
    let mut chosen: Vec<usize> = scored[..k].iter().map(|e| e.1).collect();
    chosen.sort_unstable();
    chosen
}

fn nearest_amplitude(y: f64, alphabet: &[f64]) -> f64 {
    let mut best = alphabet[0];
    for &a in &alphabet[1..] {
        if (y - a).abs() < (y - best).abs() {
            best = a;
        }
    }
    best
}

fn finish(
    spec: &ValidatedSpec,
    placements: Vec<LayerPlacement>,
    mut flags: Vec<DecodeFlag>,
) -> DecodeResult {
    let mut issues = Vec::new();
    let bits = unplace(spec, &placements, &mut issues);
    flags.extend(
        issues
            .into_iter()
            .map(|UnmapIssue::Overflow { layer }| DecodeFlag::DecodeOverflow { layer }),
    );
    DecodeResult {
        bits,
        placements,
        flags,
    }
}

/// Successive top-K selection over layer pools with a per-layer scoring rule.
fn successive_select<F>(spec: &ValidatedSpec, x: &[f64], mut score: F) -> DecodeResult
where
    F: FnMut(usize, &LayerSpec, usize, f64) -> f64,
{
    let mut free = FreePositions::new(spec.n());
    let mut pool = Vec::with_capacity(spec.n());
    let mut scored = Vec::with_capacity(spec.n());
    let mut placements = Vec::with_capacity(spec.num_layers());
    for (idx, layer) in spec.layers().iter().enumerate() {
        let pool_size = spec.budget(idx).pool_size;
        free.pool(pool_size, &mut pool);
        scored.clear();
        scored.extend(
            pool.iter()
                .map(|&i| (score(idx, layer, pool_size, x[i]), i)),
        );
        let support = top_k(&mut scored, layer.k);
        let values = support
            .iter()
            .map(|&i| nearest_amplitude(x[i], &layer.alphabet))
            .collect();
        free.take(&support);
        placements.push(LayerPlacement { support, values });
    }
    finish(spec, placements, Vec::new())
}

/// Small-noise separation of E-MAP-SSC, `None` for single-layer codes.
///
/// As `σ → 0` the layer-ℓ log-odds of a sample `y` scale as
/// `max_{a ∈ A_ℓ} (2ya - a²) / 2σ²`. A true entry scores at least
/// `min a²`; an entry `b` of a later layer scores `max_a (2ab - a²)`. The
/// margin is the smallest difference over all layers. When it is positive,
/// noiseless observations decode exactly for small enough `σ`; when it is
/// negative, some codewords are misread even without noise, because the
/// per-layer posterior models every index outside the layer as zero.
pub fn dominance_margin(spec: &ValidatedSpec) -> Option<f64> {
    let layers = spec.layers();
    let mut margin: Option<f64> = None;
    for (idx, layer) in layers
        .iter()
        .enumerate()
        .take(layers.len().saturating_sub(1))
    {
        let own = layer
            .alphabet
            .iter()
            .map(|a| a * a)
            .fold(f64::INFINITY, f64::min);
        let rival = layers[idx + 1..]
            .iter()
            .flat_map(|l| l.alphabet.iter())
            .map(|&b| {
                layer
                    .alphabet
                    .iter()
                    .map(|&a| 2.0 * a * b - a * a)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let m = own - rival;
        margin = Some(margin.map_or(m, |x: f64| x.min(m)));
    }
    margin
}

/// E-MAP-SSC decoding.
///
/// Layers are decoded in order against a zero-mean alternative, so a later
/// layer with larger amplitudes can capture an earlier layer's support; see
/// [`dominance_margin`].
pub fn emap_ssc_decode(
    spec: &ValidatedSpec,
    obs: &ChannelObservation,
) -> Result<DecodeResult, DecodeError> {
    emap_ssc_decode_with_stats(spec, obs).map(|(r, _)| r)
}

/// [`emap_ssc_decode`] plus the number of element-wise posterior evaluations.
pub fn emap_ssc_decode_with_stats(
    spec: &ValidatedSpec,
    obs: &ChannelObservation,
) -> Result<(DecodeResult, DecodeStats), DecodeError> {
    obs.check(spec.n())?;
    let x = invert_dictionary(spec.dictionary(), &obs.y).expect("validated dictionary dimension");
    let two_var = 2.0 * obs.sigma * obs.sigma;
    let prior_odds: Vec<f64> = spec
        .layers()
        .iter()
        .enumerate()
        .map(|(idx, layer)| {
            let prior = layer.k as f64 / spec.budget(idx).pool_size as f64;
            (prior / (1.0 - prior)).ln()
        })
        .collect();
    let mut stats = DecodeStats::default();
    let result = successive_select(spec, &x, |idx, layer, _, y| {
        stats.posterior_evaluations += 1;
        prior_odds[idx] + log_evidence(y, &layer.alphabet, two_var)
    });
    Ok((result, stats))
}

/// Returns the sign of each layer's single amplitude when the code has the
/// ordered-statistics shape: one layer `{+a}`, or two layers `{+a}`, `{-a}`.
fn ordered_statistics_signs(spec: &ValidatedSpec) -> Result<Vec<f64>, DecodeError> {
    let unsupported = |reason| DecodeError::UnsupportedSpecShape {
        decoder: "ordered_stats",
        reason,
    };
    let layers = spec.layers();
    if layers.iter().any(|l| l.alphabet.len() != 1) {
        return Err(unsupported("every layer needs a single amplitude"));
    }
    match layers {
        [one] if one.alphabet[0] > 0.0 => Ok(vec![1.0]),
        [first, second] if first.alphabet[0] > 0.0 && second.alphabet[0] == -first.alphabet[0] => {
            Ok(vec![1.0, -1.0])
        }
        _ => Err(unsupported(
            "expected one layer {+a} or two layers {+a}, {-a}",
        )),
    }
}

/// Ordered-statistics decoding: layer 1 takes the `K₁` largest samples of its
/// pool, layer 2 the `K₂` smallest of its pool.
pub fn ordered_statistics_decode(
    spec: &ValidatedSpec,
    obs: &ChannelObservation,
) -> Result<DecodeResult, DecodeError> {
    let signs = ordered_statistics_signs(spec)?;
    obs.check(spec.n())?;
    let x = invert_dictionary(spec.dictionary(), &obs.y).expect("validated dictionary dimension");
    Ok(successive_select(spec, &x, |idx, _, _, y| signs[idx] * y))
}

fn two_stage_amplitude(spec: &ValidatedSpec) -> Result<f64, DecodeError> {
    let unsupported = |reason| DecodeError::UnsupportedSpecShape {
        decoder: "two_stage",
        reason,
    };
    match spec.layers() {
        [first, second]
            if first.alphabet.len() == 1
                && second.alphabet.len() == 1
                && first.alphabet[0] > 0.0
                && second.alphabet[0] == -first.alphabet[0]
                && first.k == second.k =>
        {
            if spec.has_default_pools() {
                Ok(first.alphabet[0])
            } else {
                Err(unsupported("custom index pools are not supported"))
            }
        }
        _ => Err(unsupported(
            "expected two layers {+a}, {-a} with equal sparsity",
        )),
    }
}

/// Two-stage decoding: the `2K` largest `|y_n|` form the joint support, then
/// each is assigned to the positive or negative layer by its sign.
///
/// If the sign split is not exactly `K`/`K`, the layer with too many entries
/// is trimmed by ranking the selected samples and the decode is flagged.
pub fn two_stage_magnitude_decode(
    spec: &ValidatedSpec,
    obs: &ChannelObservation,
) -> Result<DecodeResult, DecodeError> {
    let amplitude = two_stage_amplitude(spec)?;
    obs.check(spec.n())?;
    let x = invert_dictionary(spec.dictionary(), &obs.y).expect("validated dictionary dimension");
    let k = spec.layers()[0].k;
    let mut scored: Vec<(f64, usize)> = x.iter().enumerate().map(|(i, v)| (v.abs(), i)).collect();
    let joint = top_k(&mut scored, 2 * k);
    let positives = joint.iter().filter(|&&i| x[i] >= 0.0).count();
    let mut flags = Vec::new();
    let (pos, neg): (Vec<usize>, Vec<usize>) = if positives == k {
        joint.iter().partition(|&&i| x[i] >= 0.0)
    } else {
        flags.push(DecodeFlag::SupportSizeMismatch {
            layer: if positives > k { 0 } else { 1 },
        });
        let mut ranked: Vec<(f64, usize)> = joint.iter().map(|&i| (x[i], i)).collect();
        let top = top_k(&mut ranked, k);
        joint.iter().partition(|i| top.contains(i))
    };
    let placements = vec![
        LayerPlacement {
            values: vec![amplitude; pos.len()],
            support: pos,
        },
        LayerPlacement {
            values: vec![-amplitude; neg.len()],
            support: neg,
        },
    ];
    Ok(finish(spec, placements, flags))
}
