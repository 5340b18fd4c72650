//! High-precision reference values (40-digit arithmetic) and fixed tables.

#![allow(clippy::excessive_precision)]

use oss_core::analysis::{
    awgn_capacity, awgn_dispersion, effective_coding_gain, ln_q, normal_approx_rate, q_func,
    q_func_inv, GainKind,
};
use oss_core::{CodeSpec, LayerSpec};

const Q_TABLE: [(f64, f64, f64); 7] = [
    (0.5, 0.30853753872598689636, -1.1759117615936186089),
    (2.5, 0.006209665325776135167, -5.0816482772786904984),
    (10.0, 7.619853024160526066e-24, -53.231285150512470578),
    (20.0, 2.7536241186062336951e-89, -203.91715537109726394),
    (30.0, 4.9067139271481870595e-198, -454.32124395634319711),
    (37.0, 5.7255712225245768227e-300, -689.0305855768905936),
    (38.5, 1.4081824631705174618e-324, -745.69527029041108133),
];

#[test]
fn q_and_log_q_against_references() {
    for (x, q, lq) in Q_TABLE {
        if q > 1e-300 {
            assert!(
                (q_func(x) / q - 1.0).abs() < 1e-12,
                "Q({x}) = {}",
                q_func(x)
            );
        }
        assert!(
            (ln_q(x) / lq - 1.0).abs() < 1e-12,
            "ln Q({x}) = {}",
            ln_q(x)
        );
        // reflection
        assert!((q_func(-x) - (1.0 - q)).abs() < 1e-15);
    }
}

#[test]
fn q_inverse_round_trips() {
    for p in [1e-300, 1e-100, 1e-12, 1e-3, 0.1, 0.5, 0.9, 1.0 - 1e-9] {
        let x = q_func_inv(p).unwrap();
        assert!((q_func(x) / p - 1.0).abs() < 1e-10, "{p}");
    }
    assert!(q_func_inv(0.0).is_err());
    assert!(q_func_inv(1.0).is_err());
}

#[test]
fn normal_approximation_reference() {
    // SNR = 1: C = 1/2, V = 3/8 log2(e)^2
    let log2e = std::f64::consts::LOG2_E;
    assert!((awgn_capacity(1.0) - 0.5).abs() < 1e-15);
    assert!((awgn_dispersion(1.0) - 0.375 * log2e * log2e).abs() < 1e-15);
    let n = 128;
    let eps = 1e-3;
    let expected = 0.5 - (0.375f64 / n as f64).sqrt() * log2e * 3.090232306167813
        + (n as f64).log2() / (2.0 * n as f64);
    assert!((normal_approx_rate(1.0, n, eps).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn two_layer_gain_table() {
    for (n, bits, nominal) in [
        (65usize, 12, 4.771212547196624),
        (129, 14, 5.440680443502757),
        (257, 16, 6.020599913279624),
    ] {
        assert_eq!(
            CodeSpec::two_layer_antipodal(n, 1)
                .validate()
                .unwrap()
                .total_bits(),
            bits
        );
        let g = effective_coding_gain(GainKind::OssTwoLayer, n).unwrap();
        assert!(
            (g.nominal_gain_db - nominal).abs() < 1e-9,
            "{n}: {}",
            g.nominal_gain_db
        );
        assert!(g.effective_gain_db < g.nominal_gain_db);
    }
}

#[test]
fn worked_example_constants() {
    let spec = CodeSpec::new(
        48,
        vec![
            LayerSpec::new(2, vec![-1.0, 1.0]),
            LayerSpec::new(2, vec![-2.0, 2.0]),
        ],
    )
    .validate()
    .unwrap();
    // C(48,2) = 1128 -> 10 bits, plus 2 sign bits; C(46,2) = 1035 -> 10 bits, plus 2
    assert_eq!(spec.layer_bit_budget(0), 12);
    assert_eq!(spec.layer_bit_budget(1), 12);
    assert_eq!(spec.code_rate(), 0.5);
    assert!((spec.average_symbol_energy() - 5.0 / 24.0).abs() < 1e-15);
}
