//! Gaussian tail function and its relatives.

use libm::erfc;
use statrs::function::erf::erfc_inv;

use super::AnalysisError;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `Q(x) = P(Z > x)`, `Z ~ N(0, 1)`.
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_func`] on `(0, 1)`.
pub fn q_func_inv(p: f64) -> Result<f64, AnalysisError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(AnalysisError::DomainError(format!(
            "Q⁻¹ needs p in (0, 1), got {p}"
        )));
    }
    // statrs' inverse is a good start but only ~1e-10 accurate
    let mut x = std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    // Newton polish on ln Q, which stays well-scaled in both tails
    for _ in 0..3 {
        let lq = ln_q(x);
        let step = (lq - p.ln()) / (-(ln_phi(x) - lq).exp());
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(x)
}

/// Standard normal log-density.
pub fn ln_phi(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// `ln Q(x)`, accurate in both tails (no underflow for large `x`).
pub fn ln_q(x: f64) -> f64 {
    if x < 0.0 {
        (-q_func(-x)).ln_1p()
    } else if x < 37.0 {
        q_func(x).ln()
    } else {
        // Q(x) = φ(x)/x · (1 - 1/x² + 3/x⁴ - 15/x⁶ + 105/x⁸ - ...)
        let r = 1.0 / (x * x);
        let series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
        ln_phi(x) - x.ln() + series.ln()
    }
}

/// `ln Φ(x)`.
pub fn ln_cdf(x: f64) -> f64 {
    ln_q(-x)
}

/// `ln(1 - Φ(u)^k)` for `k >= 1`.
pub(crate) fn ln_one_minus_cdf_pow(u: f64, k: f64) -> f64 {
    if u > 8.0 {
        // 1 - (1 - q)^k = k q (1 - (k - 1) q / 2 + ...), q < 7e-16
        let lq = ln_q(u);
        k.ln() + lq + (-(k - 1.0) * 0.5 * lq.exp()).ln_1p()
    } else {
        (-(k * ln_cdf(u)).exp_m1()).ln()
    }
}

/// Generalized Marcum Q-function of order 1/2: `Q(b - a) + Q(b + a)`, the
/// survival function of `|Z + a|` at `b`.
pub fn marcum_q_half(a: f64, b: f64) -> f64 {
    q_func(b - a) + q_func(b + a)
}
