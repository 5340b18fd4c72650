//! Successive encoder: bits → per-layer placements → codeword.
//!
//! Layer ℓ consumes `B_ℓ` bits. The leading `floor(log2 C(M_ℓ, K_ℓ))` bits
//! are a support rank, unranked over relative positions in the list of the
//! first `M_ℓ` still-free indices (ascending). The remaining bits come in
//! groups of `log2 |A_ℓ|`, one per support index in ascending order, each
//! indexing into `A_ℓ` most significant bit first.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinadic::{rank_of, unrank_into, Rank};
use crate::dictionary::apply_dictionary;
use crate::spec::ValidatedSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("expected {expected} message bits, got {actual}")]
    BitLengthMismatch { expected: usize, actual: usize },
    #[error("invalid hex digit `{0}`")]
    InvalidHex(char),
    #[error("hex string carries {available} bits, {needed} needed")]
    HexLength { available: usize, needed: usize },
    #[error("nonzero padding bits after bit {0}")]
    NonzeroPadding(usize),
}

/// Information bits, first bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MessageBits(Vec<bool>);

impl MessageBits {
    pub fn new(bits: Vec<bool>) -> Self {
        MessageBits(bits)
    }

    pub fn zeros(len: usize) -> Self {
        MessageBits(vec![false; len])
    }

    /// Uniform random bits drawn 64 at a time, least significant bit first.
    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bits = Vec::with_capacity(len);
        while bits.len() < len {
            let w = rng.next_u64();
            let take = (len - bits.len()).min(64);
            bits.extend((0..take).map(|i| (w >> i) & 1 == 1));
        }
        MessageBits(bits)
    }

    /// Parses `ceil(len / 4)` hex digits, most significant bit first. Padding
    /// bits past `len` must be zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self, EncodeError> {
        let digits: Vec<char> = hex
            .trim()
            .trim_start_matches("0x")
            .chars()
            .filter(|c| *c != '_')
            .collect();
        let needed = len.div_ceil(4);
        if digits.len() != needed {
            return Err(EncodeError::HexLength {
                available: digits.len() * 4,
                needed: len,
            });
        }
        let mut bits = Vec::with_capacity(needed * 4);
        for c in digits {
            let v = c.to_digit(16).ok_or(EncodeError::InvalidHex(c))?;
            bits.extend((0..4).rev().map(|i| (v >> i) & 1 == 1));
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(EncodeError::NonzeroPadding(len));
        }
        bits.truncate(len);
        Ok(MessageBits(bits))
    }

    pub fn to_hex(&self) -> String {
        self.0
            .chunks(4)
            .map(|chunk| {
                let v = chunk
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (i, &b)| acc | ((b as u32) << (3 - i)));
                char::from_digit(v, 16).expect("nibble")
            })
            .collect()
    }

    /// `"0110..."` rendering.
    pub fn to_bit_string(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

impl Serialize for MessageBits {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bit_string())
    }
}

impl<'de> Deserialize<'de> for MessageBits {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("invalid bit `{other}`"))),
            })
            .collect::<Result<Vec<bool>, _>>()
            .map(MessageBits)
    }
}

/// The sparse sub-message of one layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerPlacement {
    /// Sorted absolute indices in `[0, N)`.
    pub support: Vec<usize>,
    /// Amplitudes aligned with `support`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codeword {
    pub samples: Vec<f64>,
}

impl Codeword {
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

/// Tracks which positions earlier layers have taken.
pub(crate) struct FreePositions {
    taken: Vec<bool>,
}

impl FreePositions {
    pub(crate) fn new(n: usize) -> Self {
        FreePositions {
            taken: vec![false; n],
        }
    }

    /// The first `pool` free indices, ascending.
    pub(crate) fn pool(&self, pool: usize, out: &mut Vec<usize>) {
        out.clear();
        out.extend(
            self.taken
                .iter()
                .enumerate()
                .filter(|(_, t)| !**t)
                .map(|(i, _)| i)
                .take(pool),
        );
    }

    pub(crate) fn take(&mut self, indices: &[usize]) {
        for &i in indices {
            self.taken[i] = true;
        }
    }
}

/// Maps bits to per-layer placements (the sparse message before `U`).
pub fn place(spec: &ValidatedSpec, bits: &MessageBits) -> Result<Vec<LayerPlacement>, EncodeError> {
    if bits.len() != spec.total_bits() {
        return Err(EncodeError::BitLengthMismatch {
            expected: spec.total_bits(),
            actual: bits.len(),
        });
    }
    let bits = bits.as_slice();
    let mut free = FreePositions::new(spec.n());
    let mut pool = Vec::with_capacity(spec.n());
    let mut relative = Vec::new();
    let mut placements = Vec::with_capacity(spec.num_layers());
    let mut cursor = 0;
    for (idx, layer) in spec.layers().iter().enumerate() {
        let budget = spec.budget(idx);
        free.pool(budget.pool_size, &mut pool);
        let rank = Rank::from_bits(&bits[cursor..cursor + budget.support_bits]);
        cursor += budget.support_bits;
        unrank_into(&rank, budget.pool_size, layer.k, &mut relative);
        let support: Vec<usize> = relative.iter().map(|&r| pool[r]).collect();
        let values = (0..layer.k)
            .map(|_| {
                let group = &bits[cursor..cursor + budget.amplitude_bits];
                cursor += budget.amplitude_bits;
                let j = group.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                layer.alphabet[j]
            })
            .collect();
        free.take(&support);
        placements.push(LayerPlacement { support, values });
    }
    debug_assert_eq!(cursor, bits.len());
    Ok(placements)
}

/// `x = Σ_ℓ x_ℓ` as a dense vector.
pub fn superpose(n: usize, placements: &[LayerPlacement]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for p in placements {
        for (&i, &v) in p.support.iter().zip(&p.values) {
            x[i] = v;
        }
    }
    x
}

/// Encodes `bits` into `c = U Σ_ℓ x_ℓ`, returning the placements as well.
pub fn encode(
    spec: &ValidatedSpec,
    bits: &MessageBits,
) -> Result<(Codeword, Vec<LayerPlacement>), EncodeError> {
    let placements = place(spec, bits)?;
    let x = superpose(spec.n(), &placements);
    let samples = apply_dictionary(spec.dictionary(), &x).expect("validated dictionary dimension");
    Ok((Codeword { samples }, placements))
}

/// Problems found while mapping placements back to bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum UnmapIssue {
    /// The support rank is not reachable with the layer's bit budget.
    Overflow { layer: usize },
}

/// Inverse of [`place`]. Placements must be disjoint, sorted, drawn from each
/// layer's pool and carry alphabet values; decoders guarantee this. Ranks
/// beyond `2^support_bits - 1` are clamped and reported.
pub(crate) fn unplace(
    spec: &ValidatedSpec,
    placements: &[LayerPlacement],
    issues: &mut Vec<UnmapIssue>,
) -> MessageBits {
    let mut bits = Vec::with_capacity(spec.total_bits());
    let mut free = FreePositions::new(spec.n());
    let mut pool = Vec::with_capacity(spec.n());
    let mut relative = Vec::new();
    for (idx, (layer, p)) in spec.layers().iter().zip(placements).enumerate() {
        let budget = spec.budget(idx);
        free.pool(budget.pool_size, &mut pool);
        relative.clear();
        relative.extend(
            p.support
                .iter()
                .map(|i| pool.binary_search(i).expect("support inside pool")),
        );
        let mut rank = rank_of(&relative, budget.pool_size, layer.k);
        if rank.exceeds_width(budget.support_bits) {
            issues.push(UnmapIssue::Overflow { layer: idx });
            rank = Rank::max_for_width(budget.support_bits);
        }
        rank.write_bits(budget.support_bits, &mut bits);
        for v in &p.values {
            let j = layer
                .alphabet
                .iter()
                .position(|a| a == v)
                .expect("alphabet value");
            bits.extend((0..budget.amplitude_bits).rev().map(|i| (j >> i) & 1 == 1));
        }
        free.take(&p.support);
    }
    MessageBits(bits)
}

/// Recovers the message from placements of a noiseless codeword.
pub fn bits_from_placements(spec: &ValidatedSpec, placements: &[LayerPlacement]) -> MessageBits {
    unplace(spec, placements, &mut Vec::new())
}
