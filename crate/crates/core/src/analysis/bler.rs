//! Block error probabilities of single- and two-layer codes.
//!
//! All evaluators return the error probability itself rather than one minus
//! a success probability, so values down to the quadrature's absolute floor
//! keep full relative precision.

use libm::erf;

use super::quadrature::{integrate_log, QuadratureConfig};
use super::special::{ln_cdf, ln_one_minus_cdf_pow, ln_phi, ln_q, q_func};
use super::AnalysisError;

fn check_sigma(sigma: f64) -> Result<(), AnalysisError> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(AnalysisError::DomainError(format!(
            "sigma must be positive and finite, got {sigma}"
        )))
    }
}

/// Exact BLER of a single-layer code with `K` unit amplitudes among `N`
/// positions under optimal (ordered statistics) decoding.
///
/// In units `t = y/σ` with `a = 1/σ`, decoding fails when the largest of the
/// `N-K` idle samples beats the smallest active one:
/// `P_e = ∫ (N-K) φ(t) Φ(t)^{N-K-1} (1 - Φ(a-t)^K) dt`.
pub fn bler_single_layer_exact(
    n: usize,
    k: usize,
    sigma: f64,
    quad: &QuadratureConfig,
) -> Result<f64, AnalysisError> {
    if k == 0 || k >= n {
        return Err(AnalysisError::DomainError(format!(
            "need 1 <= K < N, got N={n}, K={k}"
        )));
    }
    check_sigma(sigma)?;
    let a = 1.0 / sigma;
    let idle = (n - k) as f64;
    let kf = k as f64;
    let log_g = |t: f64| {
        let mut v = idle.ln() + ln_phi(t) + ln_one_minus_cdf_pow(a - t, kf);
        if n - k > 1 {
            v += (idle - 1.0) * ln_cdf(t);
        }
        v
    };
    let (scaled, peak) = integrate_log(log_g, -40.0, a + 40.0, quad)?;
    Ok((scaled * peak.exp()).min(1.0))
}

/// `ln(1 - S^m)` where `S = Q(u-a) + Q(u+a)` is the survival of `|Z + a|` at `u`.
fn ln_one_minus_marcum_pow(a: f64, u: f64, m: f64) -> f64 {
    // D = 1 - S = Q(a-u) - Q(a+u) = P(|Z + a| < u)
    let (l1, l2) = (ln_q(a - u), ln_q(a + u));
    let ln_d = l1 + (-(l2 - l1).exp()).ln_1p();
    let d = ln_d.exp();
    if d < 1e-8 {
        // 1 - (1-D)^m = m D (1 - (m-1) D / 2 + ...)
        m.ln() + ln_d + (-(m - 1.0) * 0.5 * d).ln_1p()
    } else {
        (-(m * (-d).ln_1p()).exp_m1()).ln()
    }
}

/// Upper bound on the BLER of the two-layer code with `K` entries `+1` and
/// `K` entries `-1` among `N` positions.
///
/// With `a = 1/σ`, the bound is `1 - (1 - E₂)(1 - E₁)` where
/// `E₂ = 1 - (1 - Q(a))^{2K}` covers sign errors and
/// `E₁ = ∫₀^∞ (N-2K) 2φ(u) (1-2Q(u))^{N-2K-1} (1 - S(u)^{2K}) du`
/// covers magnitude-ranking errors, `S(u) = Q(u-a) + Q(u+a)`.
pub fn bler_two_layer_bound(
    n: usize,
    k: usize,
    sigma: f64,
    quad: &QuadratureConfig,
) -> Result<f64, AnalysisError> {
    if k == 0 || 2 * k >= n {
        return Err(AnalysisError::DomainError(format!(
            "need K >= 1 and 2K < N, got N={n}, K={k}"
        )));
    }
    check_sigma(sigma)?;
    let a = 1.0 / sigma;
    let idle = (n - 2 * k) as f64;
    let m = 2.0 * k as f64;
    let ln2 = std::f64::consts::LN_2;
    let log_g = |u: f64| {
        let mut v = idle.ln() + ln2 + ln_phi(u) + ln_one_minus_marcum_pow(a, u, m);
        if n - 2 * k > 1 {
            // 1 - 2Q(u) = erf(u/√2), no cancellation near u = 0
            v += (idle - 1.0) * erf(u * std::f64::consts::FRAC_1_SQRT_2).ln();
        }
        v
    };
    let (scaled, peak) = integrate_log(log_g, 0.0, (a + 40.0).max(40.0), quad)?;
    let e1 = (scaled * peak.exp()).min(1.0);
    let e2 = -(m * (-q_func(a)).ln_1p()).exp_m1();
    Ok((e1 + (1.0 - e1) * e2).min(1.0))
}

/// Closed-form union/Chernoff achievability bound for a single-layer code:
/// `K e^{-δ²/2σ²} + (N-K) e^{-(1-δ)²/2σ²} - K(N-K) e^{-(δ²+(1-δ)²)/2σ²}`
/// with `1/σ² = (2/K) log₂ C(N,K) · E_b/N_0`.
///
/// The value is not clamped and can exceed one.
pub fn achievability_bound(
    n: usize,
    k: usize,
    ebn0_linear: f64,
    delta: f64,
) -> Result<f64, AnalysisError> {
    if k == 0 || k >= n {
        return Err(AnalysisError::DomainError(format!(
            "need 1 <= K < N, got N={n}, K={k}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(AnalysisError::DomainError(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(ebn0_linear > 0.0 && ebn0_linear.is_finite()) {
        return Err(AnalysisError::DomainError(format!(
            "Eb/N0 must be positive, got {ebn0_linear}"
        )));
    }
    let ln_binom: f64 = (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum();
    let half_inv_var = ln_binom / std::f64::consts::LN_2 / k as f64 * ebn0_linear;
    let ln_t1 = (k as f64).ln() - delta * delta * half_inv_var;
    let ln_t2 = ((n - k) as f64).ln() - (1.0 - delta) * (1.0 - delta) * half_inv_var;
    let (t1, t2) = (ln_t1.exp(), ln_t2.exp());
    Ok(t1 + t2 - (ln_t1 + ln_t2).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn two_positions_reduce_to_q() {
        // P(Y₁ < Y₂) with Y₁ ~ N(1, σ²), Y₂ ~ N(0, σ²)
        for sigma in [0.1, 0.3, 1.0, 3.0] {
            let exact = q_func(1.0 / (sigma * std::f64::consts::SQRT_2));
            let ours = bler_single_layer_exact(2, 1, sigma, &cfg()).unwrap();
            assert!(
                (ours / exact - 1.0).abs() < 1e-9,
                "σ={sigma}: {ours} vs {exact}"
            );
        }
    }

    #[test]
    fn single_layer_monotone_in_sigma() {
        let mut last = 0.0;
        for i in 1..=30 {
            let sigma = 0.05 * i as f64;
            let v = bler_single_layer_exact(16, 2, sigma, &cfg()).unwrap();
            assert!(v > last, "σ={sigma}");
            last = v;
        }
        // random guessing limit
        let v = bler_single_layer_exact(16, 2, 1e4, &cfg()).unwrap();
        assert!((v - (1.0 - 1.0 / 120.0)).abs() < 1e-3);
    }

    #[test]
    fn single_layer_reaches_tiny_values() {
        let v = bler_single_layer_exact(64, 1, 0.08, &cfg()).unwrap();
        assert!(v > 0.0 && v < 1e-12, "{v}");
        // union bound from above: (N-1) Q(1/(σ√2))
        let union = 63.0 * q_func(1.0 / (0.08 * std::f64::consts::SQRT_2));
        assert!(v <= union && v > 0.3 * union);
    }

    #[test]
    fn two_layer_bound_limits() {
        let tiny = bler_two_layer_bound(32, 1, 0.05, &cfg()).unwrap();
        assert!(tiny < 1e-30);
        let mut last = 0.0;
        for i in 1..=20 {
            let v = bler_two_layer_bound(32, 1, 0.05 * i as f64, &cfg()).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn achievability_small_delta_is_vacuous() {
        for n in [8usize, 64, 1024] {
            assert!(achievability_bound(n, 1, 2.0, 1e-12).unwrap() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn achievability_argument_checks() {
        assert!(achievability_bound(8, 0, 1.0, 0.1).is_err());
        assert!(achievability_bound(8, 1, 1.0, 1.0).is_err());
        assert!(achievability_bound(8, 1, 0.0, 0.1).is_err());
    }
}
