//! Minimum distance, nearest-neighbour counts and coding gains.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::encode::{place, MessageBits};
use crate::spec::{CodeSpec, ValidatedSpec};

/// Largest codebook, in bits, that [`distance_profile`] will enumerate.
pub const MAX_ENUMERATION_BITS: usize = 20;

const REL_TOL: f64 = 1e-9;

/// Distance spectrum head of a codebook, found by exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub d_min_sq: f64,
    /// Unordered codeword pairs at distance `d_min`.
    pub nearest_pairs: u64,
    pub codebook_size: u64,
    pub bits: usize,
}

impl DistanceProfile {
    pub fn d_min(&self) -> f64 {
        self.d_min_sq.sqrt()
    }

    /// Average number of nearest neighbours of a codeword.
    pub fn neighbors_per_codeword(&self) -> f64 {
        2.0 * self.nearest_pairs as f64 / self.codebook_size as f64
    }

    pub fn neighbors_per_bit(&self) -> f64 {
        self.neighbors_per_codeword() / self.bits as f64
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}

struct SparseBook {
    offsets: Vec<usize>,
    index: Vec<u32>,
    value: Vec<f64>,
    norm: Vec<f64>,
}

impl SparseBook {
    fn entries(&self, c: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[c]..self.offsets[c + 1];
        (&self.index[r.clone()], &self.value[r])
    }

    fn dist_sq(&self, i: usize, j: usize) -> f64 {
        let (ia, va) = self.entries(i);
        let (ib, vb) = self.entries(j);
        let (mut p, mut q, mut d) = (0, 0, 0.0);
        while p < ia.len() && q < ib.len() {
            match ia[p].cmp(&ib[q]) {
                std::cmp::Ordering::Less => {
                    d += va[p] * va[p];
                    p += 1;
                }
                std::cmp::Ordering::Greater => {
                    d += vb[q] * vb[q];
                    q += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = va[p] - vb[q];
                    d += e * e;
                    p += 1;
                    q += 1;
                }
            }
        }
        d + va[p..].iter().map(|v| v * v).sum::<f64>() + vb[q..].iter().map(|v| v * v).sum::<f64>()
    }
}

fn enumerate(spec: &ValidatedSpec) -> Result<SparseBook, AnalysisError> {
    let bits = spec.total_bits();
    if bits > MAX_ENUMERATION_BITS {
        return Err(AnalysisError::CodebookTooLarge {
            bits,
            limit: MAX_ENUMERATION_BITS,
        });
    }
    let size = 1usize << bits;
    let weight: usize = spec.layers().iter().map(|l| l.k).sum();
    let mut book = SparseBook {
        offsets: Vec::with_capacity(size + 1),
        index: Vec::with_capacity(size * weight),
        value: Vec::with_capacity(size * weight),
        norm: Vec::with_capacity(size),
    };
    book.offsets.push(0);
    let mut entries = Vec::with_capacity(weight);
    for m in 0..size {
        let msg = MessageBits::new((0..bits).rev().map(|b| (m >> b) & 1 == 1).collect());
        let placements = place(spec, &msg).expect("length matches budget");
        entries.clear();
        for p in &placements {
            entries.extend(
                p.support
                    .iter()
                    .zip(&p.values)
                    .map(|(&i, &v)| (i as u32, v)),
            );
        }
        entries.sort_unstable_by_key(|e| e.0);
        book.index.extend(entries.iter().map(|e| e.0));
        book.value.extend(entries.iter().map(|e| e.1));
        book.norm.push(entries.iter().map(|e| e.1 * e.1).sum());
        book.offsets.push(book.index.len());
    }
    Ok(book)
}

/// Minimum squared distance and nearest-pair count over all codeword pairs.
///
/// The dictionary is orthonormal, so distances are taken between sparse
/// messages. Pairs sharing a support index are compared directly via an
/// inverted index; pairs with disjoint supports have `‖xᵢ - xⱼ‖² = ‖xᵢ‖² + ‖xⱼ‖²`
/// and are counted per norm class.
pub fn distance_profile(spec: &ValidatedSpec) -> Result<DistanceProfile, AnalysisError> {
    let book = enumerate(spec)?;
    let size = book.norm.len();
    if size < 2 {
        return Err(AnalysisError::DomainError(
            "codebook has a single codeword".into(),
        ));
    }

    // norm classes
    let mut levels: Vec<f64> = Vec::new();
    let mut class = Vec::with_capacity(size);
    for &n in &book.norm {
        let c = match levels.iter().position(|&l| same(l, n)) {
            Some(c) => c,
            None => {
                levels.push(n);
                levels.len() - 1
            }
        };
        class.push(c);
    }
    let r = levels.len();
    let mut population = vec![0u64; r];
    for &c in &class {
        population[c] += 1;
    }

    let mut postings: Vec<Vec<u32>> = vec![Vec::new(); spec.n()];
    for c in 0..size {
        for &i in book.entries(c).0 {
            postings[i as usize].push(c as u32);
        }
    }
    let mut overlapping = vec![0u64; r * r];
    let mut best = f64::INFINITY;
    let mut best_pairs = 0u64;
    let mut stamp = vec![u32::MAX; size];
    for i in 0..size {
        for &pos in book.entries(i).0 {
            for &j in &postings[pos as usize] {
                let j = j as usize;
                if j <= i || stamp[j] == i as u32 {
                    continue;
                }
                stamp[j] = i as u32;
                let (a, b) = (class[i].min(class[j]), class[i].max(class[j]));
                overlapping[a * r + b] += 1;
                let d = book.dist_sq(i, j);
                if best.is_finite() && same(d, best) {
                    best_pairs += 1;
                } else if d < best {
                    best = d;
                    best_pairs = 1;
                }
            }
        }
    }

    let mut disjoint = Vec::new();
    for a in 0..r {
        for b in a..r {
            let all = if a == b {
                population[a] * (population[a] - 1) / 2
            } else {
                population[a] * population[b]
            };
            let count = all - overlapping[a * r + b];
            if count > 0 {
                disjoint.push((levels[a] + levels[b], count));
            }
        }
    }
    let disjoint_min = disjoint.iter().map(|d| d.0).fold(f64::INFINITY, f64::min);
    let d_min_sq = best.min(disjoint_min);
    let mut nearest_pairs: u64 = disjoint
        .iter()
        .filter(|d| d.0.is_finite() && same(d.0, d_min_sq))
        .map(|d| d.1)
        .sum();
    if best.is_finite() && same(best, d_min_sq) {
        nearest_pairs += best_pairs;
    }
    Ok(DistanceProfile {
        d_min_sq,
        nearest_pairs,
        codebook_size: size as u64,
        bits: spec.total_bits(),
    })
}

/// `d_min = min ‖cᵢ - cⱼ‖₂` over distinct codewords.
pub fn min_distance_exhaustive(spec: &ValidatedSpec) -> Result<f64, AnalysisError> {
    distance_profile(spec).map(|p| p.d_min())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodingGain {
    pub linear: f64,
    pub db: f64,
}

fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `γ_c = (d_min² / 4) / (E_s / R)`.
pub fn nominal_coding_gain(spec: &ValidatedSpec, d_min: f64) -> Result<CodingGain, AnalysisError> {
    if !(d_min > 0.0 && d_min.is_finite()) {
        return Err(AnalysisError::DomainError(format!(
            "d_min must be positive, got {d_min}"
        )));
    }
    let linear = (d_min * d_min / 4.0) / (spec.average_symbol_energy() / spec.code_rate());
    Ok(CodingGain {
        linear,
        db: to_db(linear),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainKind {
    OssSingle,
    OssTwoLayer,
    Biorthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub nominal_gain_db: f64,
    pub effective_gain_db: f64,
    pub d_min_sq: f64,
    pub nearest_neighbors_per_bit: f64,
}

/// Nominal gain less 0.2 dB per doubling of the nearest-neighbour count per
/// bit. Counts below one bit⁻¹ earn no credit.
fn effective_db(nominal_db: f64, neighbors_per_bit: f64) -> f64 {
    nominal_db - 0.2 * neighbors_per_bit.log2().max(0.0)
}

fn report(nominal_db: f64, d_min_sq: f64, neighbors_per_bit: f64) -> GainReport {
    GainReport {
        nominal_gain_db: nominal_db,
        effective_gain_db: effective_db(nominal_db, neighbors_per_bit),
        d_min_sq,
        nearest_neighbors_per_bit: neighbors_per_bit,
    }
}

/// Gains of an arbitrary spec from its enumerated distance profile.
pub fn gain_report(spec: &ValidatedSpec) -> Result<GainReport, AnalysisError> {
    let profile = distance_profile(spec)?;
    let nominal = nominal_coding_gain(spec, profile.d_min())?;
    Ok(report(
        nominal.db,
        profile.d_min_sq,
        profile.neighbors_per_bit(),
    ))
}

/// Closed-form gains for biorthogonal and single-layer codes of length `N`,
/// enumerated gains for the two-layer `±1`, `K = 1` code.
pub fn effective_coding_gain(kind: GainKind, n: usize) -> Result<GainReport, AnalysisError> {
    match kind {
        GainKind::Biorthogonal | GainKind::OssSingle => {
            if n < 2 || !n.is_power_of_two() {
                return Err(AnalysisError::UnsupportedN {
                    kind: kind_name(kind),
                    n,
                });
            }
            let log_n = n.trailing_zeros() as f64;
            let nf = n as f64;
            Ok(if kind == GainKind::Biorthogonal {
                report(
                    to_db((log_n + 1.0) / 2.0),
                    2.0 * nf,
                    (2.0 * nf - 2.0) / log_n,
                )
            } else {
                report(to_db(log_n / 2.0), 2.0, (nf - 1.0) / log_n)
            })
        }
        GainKind::OssTwoLayer => {
            let spec = CodeSpec::two_layer_antipodal(n, 1)
                .validate()
                .map_err(|_| AnalysisError::UnsupportedN {
                    kind: kind_name(kind),
                    n,
                })?;
            if n < 3 {
                return Err(AnalysisError::UnsupportedN {
                    kind: kind_name(kind),
                    n,
                });
            }
            gain_report(&spec)
        }
    }
}

fn kind_name(kind: GainKind) -> &'static str {
    match kind {
        GainKind::OssSingle => "oss_single",
        GainKind::OssTwoLayer => "oss_two_layer",
        GainKind::Biorthogonal => "biorthogonal",
    }
}

/// Published gains of classical codes, echoed as cited values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CitedGain {
    pub code: &'static str,
    pub nominal_gain_db: f64,
    pub effective_gain_db: f64,
}

pub const CITED_GAINS: [CitedGain; 6] = [
    CitedGain {
        code: "RM [64,7,16]",
        nominal_gain_db: 5.4,
        effective_gain_db: 4.4,
    },
    CitedGain {
        code: "Golay [64,22,16]",
        nominal_gain_db: 7.4,
        effective_gain_db: 6.0,
    },
    CitedGain {
        code: "RM [128,8,64]",
        nominal_gain_db: 6.0,
        effective_gain_db: 4.9,
    },
    CitedGain {
        code: "Golay [128,29,32]",
        nominal_gain_db: 8.6,
        effective_gain_db: 6.9,
    },
    CitedGain {
        code: "RM [256,9,128]",
        nominal_gain_db: 6.5,
        effective_gain_db: 5.4,
    },
    CitedGain {
        code: "Golay [256,37,64]",
        nominal_gain_db: 9.7,
        effective_gain_db: 7.6,
    },
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::encode;
    use crate::spec::LayerSpec;
    use crate::DictionaryKind;

    /// All-pairs brute force on dense codewords.
    fn brute_force(spec: &ValidatedSpec) -> (f64, u64) {
        let bits = spec.total_bits();
        let words: Vec<Vec<f64>> = (0..1usize << bits)
            .map(|m| {
                let msg = MessageBits::new((0..bits).rev().map(|b| (m >> b) & 1 == 1).collect());
                encode(spec, &msg).unwrap().0.samples
            })
            .collect();
        let mut dists = Vec::new();
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                dists.push(
                    words[i]
                        .iter()
                        .zip(&words[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>(),
                );
            }
        }
        let min = dists.iter().copied().fold(f64::INFINITY, f64::min);
        (
            min,
            dists
                .iter()
                .filter(|&&d| (d - min).abs() <= 1e-8 * min)
                .count() as u64,
        )
    }

    fn check(spec: CodeSpec) {
        let spec = spec.validate().unwrap();
        let p = distance_profile(&spec).unwrap();
        let (d, count) = brute_force(&spec);
        assert!((p.d_min_sq - d).abs() < 1e-9 * d, "{} vs {d}", p.d_min_sq);
        assert_eq!(p.nearest_pairs, count);
    }

    #[test]
    fn worked_distances() {
        let s = CodeSpec::single_layer(8, 1).validate().unwrap();
        assert!((min_distance_exhaustive(&s).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let s = CodeSpec::two_layer_antipodal(8, 1).validate().unwrap();
        assert!((min_distance_exhaustive(&s).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let s = CodeSpec::new(4, vec![LayerSpec::new(1, vec![1.0, 3.0])])
            .validate()
            .unwrap();
        assert!((min_distance_exhaustive(&s).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn profile_matches_brute_force() {
        check(CodeSpec::single_layer(8, 1));
        check(CodeSpec::single_layer(9, 3));
        check(CodeSpec::two_layer_antipodal(11, 1));
        check(CodeSpec::two_layer_antipodal(9, 2));
        check(CodeSpec::new(
            6,
            vec![
                LayerSpec::new(1, vec![1.0, 3.0]),
                LayerSpec::new(1, vec![-0.5, -2.0]),
            ],
        ));
        check(CodeSpec::new(5, vec![LayerSpec::new(2, vec![0.2, 3.0])]));
        check(
            CodeSpec::new(8, vec![LayerSpec::new(1, vec![1.0, -1.0])])
                .with_dictionary(DictionaryKind::Hadamard(8)),
        );
        check(CodeSpec::new(
            7,
            vec![
                LayerSpec::new(1, vec![2.0]),
                LayerSpec::new(1, vec![1.0, -1.0]),
                LayerSpec::new(1, vec![-3.0]),
            ],
        ));
    }

    #[test]
    fn single_layer_closed_form_matches_enumeration() {
        for n in [4usize, 16, 64] {
            let spec = CodeSpec::single_layer(n, 1).validate().unwrap();
            let enumerated = gain_report(&spec).unwrap();
            let closed = effective_coding_gain(GainKind::OssSingle, n).unwrap();
            assert!((enumerated.nominal_gain_db - closed.nominal_gain_db).abs() < 1e-12);
            assert!(
                (enumerated.nearest_neighbors_per_bit - closed.nearest_neighbors_per_bit).abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn closed_forms() {
        let b = effective_coding_gain(GainKind::Biorthogonal, 64).unwrap();
        assert!((b.nominal_gain_db - 10.0 * 3.5f64.log10()).abs() < 1e-12);
        assert!(
            (b.effective_gain_db - (10.0 * 3.5f64.log10() - 0.2 * (126.0f64 / 6.0).log2())).abs()
                < 1e-12
        );
        let s = effective_coding_gain(GainKind::OssSingle, 64).unwrap();
        assert!((s.nominal_gain_db - 4.771212547196624).abs() < 1e-12);
        assert!(
            (s.effective_gain_db - (10.0 * 3f64.log10() - 0.2 * (63.0f64 / 6.0).log2())).abs()
                < 1e-12
        );
        assert!(matches!(
            effective_coding_gain(GainKind::OssSingle, 65),
            Err(AnalysisError::UnsupportedN { .. })
        ));
        assert!(effective_coding_gain(GainKind::OssTwoLayer, 2).is_err());
    }

    #[test]
    fn effective_never_exceeds_nominal() {
        for n in [2usize, 4, 8] {
            let r = effective_coding_gain(GainKind::OssSingle, n).unwrap();
            assert!(r.effective_gain_db <= r.nominal_gain_db);
        }
    }

    #[test]
    fn too_large() {
        let spec = CodeSpec::single_layer(1 << 21, 1).validate().unwrap();
        assert!(matches!(
            distance_profile(&spec),
            Err(AnalysisError::CodebookTooLarge { bits: 21, .. })
        ));
    }
}
