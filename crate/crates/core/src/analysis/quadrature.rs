//! Adaptive 7/15-point Gauss-Kronrod quadrature on finite intervals.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::AnalysisError;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub relative_tolerance: f64,
    pub absolute_floor: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            relative_tolerance: 1e-10,
            absolute_floor: 1e-300,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(
        relative_tolerance: f64,
        absolute_floor: f64,
        max_subdivisions: usize,
    ) -> Result<Self, AnalysisError> {
        let cfg = QuadratureConfig {
            relative_tolerance,
            absolute_floor,
            max_subdivisions,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub(crate) fn check(&self) -> Result<(), AnalysisError> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance < 1e-4) {
            return Err(AnalysisError::DomainError(format!(
                "relative tolerance must lie in (0, 1e-4), got {}",
                self.relative_tolerance
            )));
        }
        if self.absolute_floor.is_nan() || self.absolute_floor < 0.0 || self.max_subdivisions == 0 {
            return Err(AnalysisError::DomainError(
                "invalid quadrature floor or subdivision limit".into(),
            ));
        }
        Ok(())
    }
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(centre - dx) + f(centre + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    }
}

/// `∫_a^b f`, bisecting the worst interval until the summed error estimate is
/// below `max(rel · |value|, absolute_floor)`.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral, AnalysisError> {
    cfg.check()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(AnalysisError::DomainError(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }
    let first = kronrod(&f, a, b);
    let (mut value, mut error) = (first.value, first.error);
    let mut heap = BinaryHeap::from([first]);
    let mut subdivisions = 0;
    loop {
        if !value.is_finite() {
            return Err(AnalysisError::DomainError(
                "integrand produced a non-finite value".into(),
            ));
        }
        if error <= (cfg.relative_tolerance * value.abs()).max(cfg.absolute_floor) {
            return Ok(Integral {
                value,
                error,
                subdivisions,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(AnalysisError::QuadratureNonConvergence {
                subdivisions,
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further in floating point
            return Err(AnalysisError::QuadratureNonConvergence {
                subdivisions,
                estimate: value,
                error,
            });
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // summed afresh: running updates cancel badly when one segment dominates
        value = heap.iter().map(|s| s.value).sum();
        error = heap.iter().map(|s| s.error).sum();
    }
}

/// Integral of `exp(log_f)` over `[a, b]`, computed as `exp(peak) · ∫ exp(log_f - peak)`
/// after trimming the ends where `log_f` sits more than 60 nats below its peak.
pub(crate) fn integrate_log(
    log_f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64), AnalysisError> {
    const GRID: usize = 4000;
    const DROP: f64 = 60.0;
    let h = (b - a) / GRID as f64;
    let samples: Vec<f64> = (0..=GRID).map(|i| log_f(a + i as f64 * h)).collect();
    let peak = samples
        .iter()
        .copied()
        .filter(|v| !v.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    if !peak.is_finite() {
        return Err(AnalysisError::DomainError(
            "log-integrand is not finite".into(),
        ));
    }
    let keep = |v: &f64| *v >= peak - DROP;
    let lo = samples.iter().position(keep).unwrap_or(0).saturating_sub(1);
    let hi = (samples.iter().rposition(keep).unwrap_or(GRID) + 1).min(GRID);
    let (lo_x, hi_x) = (a + lo as f64 * h, a + hi as f64 * h);
    let scaled = integrate(
        |x| {
            let v = log_f(x) - peak;
            if v.is_nan() {
                0.0
            } else {
                v.exp()
            }
        },
        lo_x,
        hi_x,
        cfg,
    )?;
    Ok((scaled.value, peak))
}
