//! Orthonormal dictionaries `U` with `c = U x` and `x = Uᵀ c`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DictionaryError {
    #[error("dimension mismatch: dictionary order {expected}, vector length {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("Hadamard order {0} is not a power of two")]
    HadamardOrderInvalid(usize),
}

/// The dictionary applied after superposition.
///
/// JSON forms: `"identity"`, `{"hadamard": 64}`, `{"explicit": [[..], ..]}`
/// (rows of an `N x N` orthonormal matrix).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "DictionaryRepr", into = "DictionaryRepr")]
pub enum DictionaryKind {
    #[default]
    Identity,
    /// Sylvester Hadamard matrix of the given order, scaled by `1/sqrt(order)`.
    Hadamard(usize),
    /// Row-major orthonormal matrix.
    Explicit(Vec<Vec<f64>>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DictionaryRepr {
    Name(String),
    Hadamard { hadamard: usize },
    Explicit { explicit: Vec<Vec<f64>> },
}

impl TryFrom<DictionaryRepr> for DictionaryKind {
    type Error = String;

    fn try_from(value: DictionaryRepr) -> Result<Self, Self::Error> {
        match value {
            DictionaryRepr::Name(name) if name == "identity" => Ok(DictionaryKind::Identity),
            DictionaryRepr::Name(name) => Err(format!("unknown dictionary `{name}`")),
            DictionaryRepr::Hadamard { hadamard } => Ok(DictionaryKind::Hadamard(hadamard)),
            DictionaryRepr::Explicit { explicit } => Ok(DictionaryKind::Explicit(explicit)),
        }
    }
}

impl From<DictionaryKind> for DictionaryRepr {
    fn from(value: DictionaryKind) -> Self {
        match value {
            DictionaryKind::Identity => DictionaryRepr::Name("identity".into()),
            DictionaryKind::Hadamard(hadamard) => DictionaryRepr::Hadamard { hadamard },
            DictionaryKind::Explicit(explicit) => DictionaryRepr::Explicit { explicit },
        }
    }
}

impl DictionaryKind {
    /// Order of the matrix, if fixed by the variant.
    pub fn order(&self) -> Option<usize> {
        match self {
            DictionaryKind::Identity => None,
            DictionaryKind::Hadamard(n) => Some(*n),
            DictionaryKind::Explicit(rows) => Some(rows.len()),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, DictionaryKind::Identity)
    }

    fn check_dimension(&self, len: usize) -> Result<(), DictionaryError> {
        if let DictionaryKind::Hadamard(n) = self {
            if !n.is_power_of_two() {
                return Err(DictionaryError::HadamardOrderInvalid(*n));
            }
        }
        match self.order() {
            Some(expected) if expected != len => Err(DictionaryError::DimensionMismatch {
                expected,
                actual: len,
            }),
            _ => Ok(()),
        }
    }

    /// Maximum entry-wise deviation of `UᵀU` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        match self {
            DictionaryKind::Identity | DictionaryKind::Hadamard(_) => 0.0,
            DictionaryKind::Explicit(rows) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return f64::INFINITY;
                }
                let mut worst = 0.0f64;
                for i in 0..n {
                    for j in i..n {
                        let dot: f64 = rows.iter().map(|r| r[i] * r[j]).sum();
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((dot - target).abs());
                    }
                }
                if worst.is_nan() {
                    f64::INFINITY
                } else {
                    worst
                }
            }
        }
    }
}

/// In-place unnormalized Walsh-Hadamard transform in Sylvester (natural) order.
fn fwht(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let a = v[i];
                let b = v[i + h];
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `c = U x`.
pub fn apply_dictionary(kind: &DictionaryKind, x: &[f64]) -> Result<Vec<f64>, DictionaryError> {
    kind.check_dimension(x.len())?;
    Ok(match kind {
        DictionaryKind::Identity => x.to_vec(),
        DictionaryKind::Hadamard(n) => {
            let mut v = x.to_vec();
            fwht(&mut v);
            let scale = 1.0 / (*n as f64).sqrt();
            v.iter_mut().for_each(|e| *e *= scale);
            v
        }
        DictionaryKind::Explicit(rows) => rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect(),
    })
}

/// `x = Uᵀ y`.
pub fn invert_dictionary(kind: &DictionaryKind, y: &[f64]) -> Result<Vec<f64>, DictionaryError> {
    kind.check_dimension(y.len())?;
    Ok(match kind {
        // the normalized Sylvester matrix is symmetric and involutory
        DictionaryKind::Identity | DictionaryKind::Hadamard(_) => return apply_dictionary(kind, y),
        DictionaryKind::Explicit(rows) => {
            let n = rows.len();
            let mut out = vec![0.0; n];
            for (r, &yi) in rows.iter().zip(y) {
                for (o, &u) in out.iter_mut().zip(r) {
                    *o += u * yi;
                }
            }
            out
        }
    })
}
