//! Code parameterization and validation.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinadic::floor_log2_binomial;
use crate::dictionary::DictionaryKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("block length must be positive")]
    ZeroBlockLength,
    #[error("a code needs at least one layer")]
    NoLayers,
    #[error("layer {layer}: sparsity must be positive")]
    ZeroSparsity { layer: usize },
    #[error("layer {layer}: alphabet is empty")]
    EmptyAlphabet { layer: usize },
    #[error("layer {layer}: amplitude {value} is not finite")]
    NonFiniteAmplitude { layer: usize, value: f64 },
    #[error("layer {layer}: amplitude {value} appears twice")]
    DuplicateAmplitude { layer: usize, value: f64 },
    #[error("layer {layer}: zero is not a valid amplitude")]
    ZeroInAlphabet { layer: usize },
    #[error("layers {first} and {second} share amplitude {value}")]
    OverlappingAlphabets {
        first: usize,
        second: usize,
        value: f64,
    },
    #[error("layer {layer}: alphabet size {size} is not a power of two")]
    NonPowerOfTwoAlphabet { layer: usize, size: usize },
    #[error("layer {layer}: sparsity {k} exceeds index pool of {pool}")]
    SparsityExceedsPool { layer: usize, k: usize, pool: usize },
    #[error(
        "layer {layer}: pool size {pool} exceeds the {remaining} positions left by earlier layers"
    )]
    PoolExceedsRemaining {
        layer: usize,
        pool: usize,
        remaining: usize,
    },
    #[error("dictionary is not orthonormal (max |UᵀU - I| = {defect:e})")]
    NonOrthonormalDictionary { defect: f64 },
    #[error("dictionary order {order} does not match block length {n}")]
    DictionaryDimension { order: usize, n: usize },
    #[error("Hadamard order {0} is not a power of two")]
    HadamardOrderInvalid(usize),
}

/// One sparse layer: `k` nonzero positions drawn from a pool of `pool_size`
/// still-free indices, each carrying an amplitude from `alphabet`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub k: usize,
    /// Defaults to every position left free by earlier layers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
    pub alphabet: Vec<f64>,
}

impl LayerSpec {
    pub fn new(k: usize, alphabet: Vec<f64>) -> Self {
        LayerSpec {
            k,
            pool_size: None,
            alphabet,
        }
    }

    pub fn with_pool(mut self, pool_size: usize) -> Self {
        self.pool_size = Some(pool_size);
        self
    }

    /// Mean squared amplitude, `Σ a² / |A|`.
    pub fn mean_square_amplitude(&self) -> f64 {
        self.alphabet.iter().map(|a| a * a).sum::<f64>() / self.alphabet.len() as f64
    }
}

/// Full parameterization of an OSS code.
///
/// ```json
/// {"n":48,"dictionary":"identity","layers":[{"k":2,"alphabet":[-1,1]},{"k":2,"alphabet":[-2,2]}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    #[serde(default)]
    pub dictionary: DictionaryKind,
    pub layers: Vec<LayerSpec>,
}

impl CodeSpec {
    pub fn new(n: usize, layers: Vec<LayerSpec>) -> Self {
        CodeSpec {
            n,
            dictionary: DictionaryKind::Identity,
            layers,
        }
    }

    pub fn with_dictionary(mut self, dictionary: DictionaryKind) -> Self {
        self.dictionary = dictionary;
        self
    }

    /// Single layer, `k` positions, amplitude `{1}`.
    pub fn single_layer(n: usize, k: usize) -> Self {
        CodeSpec::new(n, vec![LayerSpec::new(k, vec![1.0])])
    }

    /// Two layers with amplitudes `{+1}` and `{-1}`, `k` positions each.
    pub fn two_layer_antipodal(n: usize, k: usize) -> Self {
        CodeSpec::new(
            n,
            vec![LayerSpec::new(k, vec![1.0]), LayerSpec::new(k, vec![-1.0])],
        )
    }

    pub fn validate(self) -> Result<ValidatedSpec, SpecError> {
        validate_spec(self)
    }
}

/// Per-layer bit budget, precomputed at validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerBudget {
    pub pool_size: usize,
    /// `floor(log2 C(pool_size, k))`
    pub support_bits: usize,
    /// `log2 |A|`
    pub amplitude_bits: usize,
}

impl LayerBudget {
    pub fn bits(&self, k: usize) -> usize {
        self.support_bits + k * self.amplitude_bits
    }
}

/// A [`CodeSpec`] whose invariants have been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedSpec {
    spec: CodeSpec,
    budgets: Vec<LayerBudget>,
    total_bits: usize,
}

/// Checks every structural invariant and precomputes bit budgets.
pub fn validate_spec(spec: CodeSpec) -> Result<ValidatedSpec, SpecError> {
    let n = spec.n;
    if n == 0 {
        return Err(SpecError::ZeroBlockLength);
    }
    if spec.layers.is_empty() {
        return Err(SpecError::NoLayers);
    }
    match &spec.dictionary {
        DictionaryKind::Identity => {}
        DictionaryKind::Hadamard(order) => {
            if !order.is_power_of_two() {
                return Err(SpecError::HadamardOrderInvalid(*order));
            }
            if *order != n {
                return Err(SpecError::DictionaryDimension { order: *order, n });
            }
        }
        DictionaryKind::Explicit(rows) => {
            if rows.len() != n {
                return Err(SpecError::DictionaryDimension {
                    order: rows.len(),
                    n,
                });
            }
            let defect = spec.dictionary.orthonormality_defect();
            if defect > 1e-10 {
                return Err(SpecError::NonOrthonormalDictionary { defect });
            }
        }
    }

    for (layer, l) in spec.layers.iter().enumerate() {
        if l.k == 0 {
            return Err(SpecError::ZeroSparsity { layer });
        }
        if l.alphabet.is_empty() {
            return Err(SpecError::EmptyAlphabet { layer });
        }
        for (i, &a) in l.alphabet.iter().enumerate() {
            if !a.is_finite() {
                return Err(SpecError::NonFiniteAmplitude { layer, value: a });
            }
            if a == 0.0 {
                return Err(SpecError::ZeroInAlphabet { layer });
            }
            if l.alphabet[..i].contains(&a) {
                return Err(SpecError::DuplicateAmplitude { layer, value: a });
            }
        }
    }
    for (first, a) in spec.layers.iter().enumerate() {
        for (second, b) in spec.layers.iter().enumerate().skip(first + 1) {
            if let Some(&value) = a.alphabet.iter().find(|v| b.alphabet.contains(v)) {
                return Err(SpecError::OverlappingAlphabets {
                    first,
                    second,
                    value,
                });
            }
        }
    }

    let mut budgets = Vec::with_capacity(spec.layers.len());
    let mut remaining = n;
    for (layer, l) in spec.layers.iter().enumerate() {
        let size = l.alphabet.len();
        if !size.is_power_of_two() {
            return Err(SpecError::NonPowerOfTwoAlphabet { layer, size });
        }
        let pool = l.pool_size.unwrap_or(remaining);
        if pool > remaining {
            return Err(SpecError::PoolExceedsRemaining {
                layer,
                pool,
                remaining,
            });
        }
        if l.k > pool {
            return Err(SpecError::SparsityExceedsPool {
                layer,
                k: l.k,
                pool,
            });
        }
        let support_bits =
            floor_log2_binomial(pool as u64, l.k as u64).expect("k <= pool") as usize;
        budgets.push(LayerBudget {
            pool_size: pool,
            support_bits,
            amplitude_bits: size.trailing_zeros() as usize,
        });
        remaining -= l.k;
    }
    let total_bits = budgets
        .iter()
        .zip(&spec.layers)
        .map(|(b, l)| b.bits(l.k))
        .sum();
    Ok(ValidatedSpec {
        spec,
        budgets,
        total_bits,
    })
}

impl ValidatedSpec {
    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn into_spec(self) -> CodeSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.spec.layers
    }

    pub fn num_layers(&self) -> usize {
        self.spec.layers.len()
    }

    pub fn dictionary(&self) -> &DictionaryKind {
        &self.spec.dictionary
    }

    pub fn budget(&self, layer: usize) -> &LayerBudget {
        &self.budgets[layer]
    }

    /// `B_ℓ = floor(log2 C(M_ℓ, K_ℓ)) + K_ℓ log2 |A_ℓ|`.
    pub fn layer_bit_budget(&self, layer: usize) -> usize {
        self.budgets[layer].bits(self.spec.layers[layer].k)
    }

    pub fn total_bits(&self) -> usize {
        self.total_bits
    }

    /// Information bits per channel use.
    pub fn code_rate(&self) -> f64 {
        self.total_bits as f64 / self.spec.n as f64
    }

    /// Rate as the exact fraction `total_bits / n` (unreduced).
    pub fn code_rate_fraction(&self) -> (usize, usize) {
        (self.total_bits, self.spec.n)
    }

    /// Average energy per channel use, `Σ_ℓ K_ℓ (Σ_i a²_{ℓ,i} / |A_ℓ|) / N`.
    pub fn average_symbol_energy(&self) -> f64 {
        let total: f64 = self
            .spec
            .layers
            .iter()
            .map(|l| l.k as f64 * l.mean_square_amplitude())
            .sum();
        total / self.spec.n as f64
    }

    /// [`Self::average_symbol_energy`] in exact rational arithmetic. Every
    /// finite `f64` amplitude is a dyadic rational, so this is always exact.
    pub fn average_symbol_energy_exact(&self) -> BigRational {
        let mut total = BigRational::zero();
        for l in &self.spec.layers {
            let mut sq = BigRational::zero();
            for &a in &l.alphabet {
                let r = BigRational::from_float(a).expect("finite amplitude");
                sq += &r * &r;
            }
            total += sq * BigRational::new(BigInt::from(l.k), BigInt::from(l.alphabet.len()));
        }
        total / BigRational::from_integer(BigInt::from(self.spec.n))
    }

    /// Number of codewords, `2^total_bits`.
    pub fn codebook_size(&self) -> BigUint {
        BigUint::from(1u32) << self.total_bits
    }

    /// True when every pool is the full set of remaining positions.
    pub fn has_default_pools(&self) -> bool {
        let mut remaining = self.spec.n;
        for (l, b) in self.spec.layers.iter().zip(&self.budgets) {
            if b.pool_size != remaining {
                return false;
            }
            remaining -= l.k;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::tests::random_orthonormal;

    fn example_spec() -> CodeSpec {
        CodeSpec::new(
            48,
            vec![
                LayerSpec::new(2, vec![-1.0, 1.0]),
                LayerSpec::new(2, vec![-2.0, 2.0]),
            ],
        )
    }

    #[test]
    fn worked_example_budgets() {
        let v = validate_spec(example_spec()).unwrap();
        assert_eq!(v.layer_bit_budget(0), 12);
        assert_eq!(v.layer_bit_budget(1), 12);
        assert_eq!(v.budget(1).pool_size, 46);
        assert_eq!(v.code_rate_fraction(), (24, 48));
        assert_eq!(v.code_rate(), 0.5);
        assert_eq!(
            v.average_symbol_energy_exact(),
            BigRational::new(BigInt::from(5), BigInt::from(24))
        );
        assert!((v.average_symbol_energy() - 5.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_budgets() {
        let v = validate_spec(CodeSpec::single_layer(4, 1)).unwrap();
        assert_eq!(v.layer_bit_budget(0), 2);
        let v = validate_spec(CodeSpec::single_layer(2, 1)).unwrap();
        assert_eq!(v.layer_bit_budget(0), 1);
        assert_eq!(v.code_rate(), 0.5);
        let v = validate_spec(CodeSpec::two_layer_antipodal(65, 1)).unwrap();
        assert_eq!(v.code_rate_fraction(), (12, 65));
        let v = validate_spec(CodeSpec::single_layer(37, 1)).unwrap();
        assert!((v.average_symbol_energy() - 1.0 / 37.0).abs() < 1e-16);
    }

    #[test]
    fn antipodal_layer_energy() {
        let v = validate_spec(CodeSpec::new(20, vec![LayerSpec::new(3, vec![-1.0, 1.0])])).unwrap();
        assert!((v.average_symbol_energy() - 3.0 / 20.0).abs() < 1e-16);
    }

    #[test]
    fn custom_pool() {
        let spec = CodeSpec::new(
            16,
            vec![
                LayerSpec::new(1, vec![1.0]).with_pool(8),
                LayerSpec::new(1, vec![-1.0]),
            ],
        );
        let v = validate_spec(spec).unwrap();
        assert_eq!(v.layer_bit_budget(0), 3);
        assert_eq!(v.budget(1).pool_size, 15);
        assert!(!v.has_default_pools());
    }

    #[test]
    fn rejections() {
        let overlap = CodeSpec::new(
            8,
            vec![LayerSpec::new(1, vec![1.0]), LayerSpec::new(1, vec![1.0])],
        );
        assert!(matches!(
            validate_spec(overlap),
            Err(SpecError::OverlappingAlphabets { .. })
        ));
        let zero = CodeSpec::new(8, vec![LayerSpec::new(1, vec![0.0, 1.0])]);
        assert!(matches!(
            validate_spec(zero),
            Err(SpecError::ZeroInAlphabet { .. })
        ));
        let too_sparse = CodeSpec::new(
            4,
            vec![LayerSpec::new(3, vec![1.0]), LayerSpec::new(2, vec![-1.0])],
        );
        assert!(matches!(
            validate_spec(too_sparse),
            Err(SpecError::SparsityExceedsPool { layer: 1, .. })
        ));
        let three = CodeSpec::new(8, vec![LayerSpec::new(1, vec![1.0, 2.0, 3.0])]);
        assert!(matches!(
            validate_spec(three),
            Err(SpecError::NonPowerOfTwoAlphabet { size: 3, .. })
        ));
        let mut bad = random_orthonormal(4, 2);
        bad[1][2] += 0.01;
        let nonortho = CodeSpec::single_layer(4, 1).with_dictionary(DictionaryKind::Explicit(bad));
        assert!(matches!(
            validate_spec(nonortho),
            Err(SpecError::NonOrthonormalDictionary { .. })
        ));
        let big_pool = CodeSpec::new(
            8,
            vec![
                LayerSpec::new(2, vec![1.0]),
                LayerSpec::new(1, vec![-1.0]).with_pool(7),
            ],
        );
        assert!(matches!(
            validate_spec(big_pool),
            Err(SpecError::PoolExceedsRemaining { .. })
        ));
        let dup = CodeSpec::new(8, vec![LayerSpec::new(1, vec![1.0, 1.0])]);
        assert!(matches!(
            validate_spec(dup),
            Err(SpecError::DuplicateAmplitude { .. })
        ));
        let had = CodeSpec::single_layer(8, 1).with_dictionary(DictionaryKind::Hadamard(4));
        assert!(matches!(
            validate_spec(had),
            Err(SpecError::DictionaryDimension { .. })
        ));
        assert!(matches!(
            validate_spec(CodeSpec::new(8, vec![])),
            Err(SpecError::NoLayers)
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"n":48,"dictionary":"identity","layers":[{"k":2,"alphabet":[-1,1]},{"k":2,"alphabet":[-2,2]}]}"#;
        let spec: CodeSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec, example_spec());
        let back: CodeSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let with_pool: CodeSpec =
            serde_json::from_str(r#"{"n":8,"layers":[{"k":1,"pool_size":4,"alphabet":[1]}]}"#)
                .unwrap();
        assert_eq!(with_pool.layers[0].pool_size, Some(4));
        assert_eq!(with_pool.dictionary, DictionaryKind::Identity);
    }
}
