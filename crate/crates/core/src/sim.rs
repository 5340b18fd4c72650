//! Monte Carlo BLER sweeps, analytic comparison and report tables.
//!
//! # Determinism
//!
//! Grid point `p` draws from [`RngStream`] `(seed, p)` and trial `t` always
//! starts at the same keystream offset, so the outcome of every trial is fixed
//! by `(seed, p, t)` alone. Trials run in chunks of [`SweepOptions::chunk_size`];
//! workers evaluate chunks speculatively in waves, but chunks are accumulated
//! in order and the point stops at the first chunk boundary where the error
//! count reaches `target_errors`. Results are therefore identical for any
//! worker count. Speculative chunks past the stopping point are discarded.
//!
//! # CSV
//!
//! Sweeps serialize with the fixed header [`CSV_HEADER`]. Reals are written in
//! Rust's shortest round-trip form.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::fbl::awgn_capacity;
use crate::analysis::{
    bler_single_layer_exact, bler_two_layer_bound, effective_coding_gain, gain_report,
    normal_approx_rate, AnalysisError, GainKind, QuadratureConfig, CITED_GAINS,
};
use crate::channel::{
    sigma_from_ebn0, sigma_from_snr, snr_from_sigma, transmit, ChannelError, NoiseModel, RngStream,
};
use crate::decode::{DecodeError, DecoderKind};
use crate::encode::{encode, MessageBits};
use crate::spec::{CodeSpec, LayerSpec, SpecError, ValidatedSpec};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

pub const CSV_HEADER: &str = "ebn0_db,snr_db,trials,errors,bler,ci_low,ci_high,seed,stream_id";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid sweep plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("no analytic expression covers this code: {0}")]
    AnalyticUnavailable(&'static str),
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

fn default_decoder() -> DecoderKind {
    DecoderKind::EmapSsc
}

fn default_target_errors() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub spec: CodeSpec,
    pub ebn0_grid_db: Vec<f64>,
    pub max_trials: u64,
    #[serde(default = "default_target_errors")]
    pub target_errors: u64,
    pub seed: u64,
    #[serde(default = "default_decoder")]
    pub decoder: DecoderKind,
}

impl SweepPlan {
    /// Checks the plan and returns the validated code.
    pub fn validate(&self) -> Result<ValidatedSpec, SimError> {
        let spec = self.spec.clone().validate()?;
        if self.ebn0_grid_db.is_empty() {
            return Err(SimError::InvalidPlan("E_b/N_0 grid is empty".into()));
        }
        if self.ebn0_grid_db.iter().any(|v| !v.is_finite()) {
            return Err(SimError::InvalidPlan(
                "E_b/N_0 grid has a non-finite value".into(),
            ));
        }
        if self.ebn0_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SimError::InvalidPlan(
                "E_b/N_0 grid must be strictly increasing".into(),
            ));
        }
        if self.max_trials < 1000 {
            return Err(SimError::InvalidPlan(format!(
                "max_trials must be at least 1000, got {}",
                self.max_trials
            )));
        }
        if self.target_errors < 20 {
            return Err(SimError::InvalidPlan(format!(
                "target_errors must be at least 20, got {}",
                self.target_errors
            )));
        }
        self.decoder.supports(&spec)?;
        if spec.code_rate() <= 0.0 {
            return Err(ChannelError::ZeroRate.into());
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub workers: usize,
    pub chunk_size: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            chunk_size: 1024,
        }
    }
}

impl SweepOptions {
    pub fn with_workers(workers: usize) -> Self {
        SweepOptions {
            workers,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub ebn0_db: f64,
    pub snr_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub stream_id: u64,
}

/// Wilson score interval at confidence `z`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 {
        0.0
    } else {
        (centre - half).clamp(0.0, p)
    };
    let hi = if errors == trials {
        1.0
    } else {
        (centre + half).clamp(p, 1.0)
    };
    (lo, hi)
}

/// Counts block errors over trials `range` of `stream`.
fn run_trials(
    spec: &ValidatedSpec,
    decoder: DecoderKind,
    model: &NoiseModel,
    stream: &RngStream,
    range: std::ops::Range<u64>,
) -> Result<u64, SimError> {
    let bits = spec.total_bits();
    let mut errors = 0;
    for t in range {
        let mut src = stream.trial(t);
        let msg = MessageBits::random(bits, &mut src);
        let (codeword, _) = encode(spec, &msg).expect("message length matches budget");
        let obs = transmit(&codeword, model, &mut src);
        let out = decoder.decode(spec, &obs)?;
        if out.is_flagged() || out.bits != msg {
            errors += 1;
        }
    }
    Ok(errors)
}

/// Trials and errors for one point, chunked and early-stopped as described
/// in the module docs.
#[allow(clippy::too_many_arguments)]
fn simulate_point(
    pool: &rayon::ThreadPool,
    opts: &SweepOptions,
    spec: &ValidatedSpec,
    decoder: DecoderKind,
    sigma: f64,
    stream: RngStream,
    max_trials: u64,
    target_errors: u64,
) -> Result<(u64, u64), SimError> {
    let model = NoiseModel::new(sigma)?;
    let chunk = opts.chunk_size.max(1);
    let chunks = max_trials.div_ceil(chunk);
    let wave = opts.workers.max(1) as u64;
    let (mut trials, mut errors) = (0u64, 0u64);
    let mut next = 0u64;
    while next < chunks {
        let last = (next + wave).min(chunks);
        let counts: Vec<Result<u64, SimError>> = pool.install(|| {
            (next..last)
                .into_par_iter()
                .map(|c| {
                    run_trials(
                        spec,
                        decoder,
                        &model,
                        &stream,
                        c * chunk..((c + 1) * chunk).min(max_trials),
                    )
                })
                .collect()
        });
        for (c, count) in (next..last).zip(counts) {
            trials += ((c + 1) * chunk).min(max_trials) - c * chunk;
            errors += count?;
            if errors >= target_errors {
                return Ok((trials, errors));
            }
        }
        next = last;
    }
    Ok((trials, errors))
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool, SimError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SimError::WorkerPool(e.to_string()))
}

/// Runs a sweep with the default worker count.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<BlerPoint>, SimError> {
    run_sweep_with(plan, &SweepOptions::default())
}

pub fn run_sweep_with(plan: &SweepPlan, opts: &SweepOptions) -> Result<Vec<BlerPoint>, SimError> {
    let spec = plan.validate()?;
    let pool = build_pool(opts.workers)?;
    plan.ebn0_grid_db
        .iter()
        .enumerate()
        .map(|(p, &ebn0_db)| {
            let sigma = sigma_from_ebn0(&spec, ebn0_db)?;
            let stream = RngStream::new(plan.seed, p as u64);
            let (trials, errors) = simulate_point(
                &pool,
                opts,
                &spec,
                plan.decoder,
                sigma,
                stream,
                plan.max_trials,
                plan.target_errors,
            )?;
            let (ci_low, ci_high) = wilson_interval(errors, trials, Z_95);
            Ok(BlerPoint {
                ebn0_db,
                snr_db: snr_from_sigma(&spec, sigma),
                trials,
                errors,
                bler: errors as f64 / trials as f64,
                ci_low,
                ci_high,
                seed: plan.seed,
                stream_id: p as u64,
            })
        })
        .collect()
}

/// Renders points as CSV under [`CSV_HEADER`].
pub fn sweep_csv(points: &[BlerPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            p.ebn0_db,
            p.snr_db,
            p.trials,
            p.errors,
            p.bler,
            p.ci_low,
            p.ci_high,
            p.seed,
            p.stream_id
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticKind {
    Exact,
    UpperBound,
}

/// The closed-form evaluator matching a code, with the amplitude folded into σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticModel {
    SingleLayer { n: usize, k: usize, amplitude: f64 },
    TwoLayer { n: usize, k: usize, amplitude: f64 },
}

impl AnalyticModel {
    /// Single layer `{a}` (scored over its pool), or two layers `{a}`, `{-a}`
    /// with equal sparsity and default pools.
    pub fn for_spec(spec: &ValidatedSpec) -> Result<Self, SimError> {
        let layers = spec.layers();
        if layers.iter().any(|l| l.alphabet.len() != 1) {
            return Err(SimError::AnalyticUnavailable(
                "every layer needs a single amplitude",
            ));
        }
        match layers {
            [one] => {
                let pool = spec.budget(0).pool_size;
                if one.k >= pool {
                    return Err(SimError::AnalyticUnavailable(
                        "the layer fills its whole pool",
                    ));
                }
                Ok(AnalyticModel::SingleLayer {
                    n: pool,
                    k: one.k,
                    amplitude: one.alphabet[0].abs(),
                })
            }
            [first, second] if first.alphabet[0] == -second.alphabet[0] && first.k == second.k => {
                if !spec.has_default_pools() {
                    return Err(SimError::AnalyticUnavailable("custom index pools"));
                }
                Ok(AnalyticModel::TwoLayer {
                    n: spec.n(),
                    k: first.k,
                    amplitude: first.alphabet[0].abs(),
                })
            }
            [_, _] => Err(SimError::AnalyticUnavailable(
                "two layers must be {a}, {-a} with equal sparsity",
            )),
            _ => Err(SimError::AnalyticUnavailable(
                "no expression for three or more layers",
            )),
        }
    }

    pub fn kind(&self) -> AnalyticKind {
        match self {
            AnalyticModel::SingleLayer { .. } => AnalyticKind::Exact,
            AnalyticModel::TwoLayer { .. } => AnalyticKind::UpperBound,
        }
    }

    pub fn evaluate(&self, sigma: f64, quad: &QuadratureConfig) -> Result<f64, AnalysisError> {
        match *self {
            AnalyticModel::SingleLayer { n, k, amplitude } => {
                bler_single_layer_exact(n, k, sigma / amplitude, quad)
            }
            AnalyticModel::TwoLayer { n, k, amplitude } => {
                bler_two_layer_bound(n, k, sigma / amplitude, quad)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub ebn0_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub mc_bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic_value: f64,
    pub kind: AnalyticKind,
    /// Exact: the Wilson interval contains the analytic value. Upper bound:
    /// `mc_bler <= bound + 3 SE`.
    pub covered: bool,
}

/// Binomial standard error of an estimated rate.
pub fn standard_error(bler: f64, trials: u64) -> f64 {
    (bler * (1.0 - bler) / trials as f64).sqrt()
}

/// Runs the sweep and sets each point beside its analytic value.
pub fn compare_report(plan: &SweepPlan, opts: &SweepOptions) -> Result<Vec<CompareRow>, SimError> {
    let spec = plan.validate()?;
    let model = AnalyticModel::for_spec(&spec)?;
    let quad = QuadratureConfig::default();
    let points = run_sweep_with(plan, opts)?;
    points
        .iter()
        .map(|p| {
            let sigma = sigma_from_ebn0(&spec, p.ebn0_db)?;
            let analytic_value = model.evaluate(sigma, &quad)?;
            let covered = match model.kind() {
                AnalyticKind::Exact => p.ci_low <= analytic_value && analytic_value <= p.ci_high,
                AnalyticKind::UpperBound => {
                    p.bler <= analytic_value + 3.0 * standard_error(p.bler, p.trials)
                }
            };
            Ok(CompareRow {
                ebn0_db: p.ebn0_db,
                trials: p.trials,
                errors: p.errors,
                mc_bler: p.bler,
                ci_low: p.ci_low,
                ci_high: p.ci_high,
                analytic_value,
                kind: model.kind(),
                covered,
            })
        })
        .collect()
}

/// One requested row of a gain table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainRowRequest {
    /// Closed-form or enumerated family member of length `n`.
    Family { kind: GainKind, n: usize },
    /// Any spec small enough to enumerate.
    Spec { label: String, spec: CodeSpec },
    /// The built-in table of published classical-code gains.
    Cited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainSource {
    Computed,
    Cited,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub code: String,
    pub source: GainSource,
    pub nominal_gain_db: f64,
    pub effective_gain_db: f64,
    pub d_min_sq: Option<f64>,
    pub nearest_neighbors_per_bit: Option<f64>,
}

fn computed_row(code: String, r: crate::analysis::GainReport) -> GainRow {
    GainRow {
        code,
        source: GainSource::Computed,
        nominal_gain_db: r.nominal_gain_db,
        effective_gain_db: r.effective_gain_db,
        d_min_sq: Some(r.d_min_sq),
        nearest_neighbors_per_bit: Some(r.nearest_neighbors_per_bit),
    }
}

pub fn gain_table(rows: &[GainRowRequest]) -> Result<Vec<GainRow>, SimError> {
    let mut out = Vec::new();
    for row in rows {
        match row {
            GainRowRequest::Family { kind, n } => {
                let report = effective_coding_gain(*kind, *n)?;
                let label = match kind {
                    GainKind::OssSingle => format!("OSS single-layer N={n}"),
                    GainKind::OssTwoLayer => {
                        let bits = CodeSpec::two_layer_antipodal(*n, 1)
                            .validate()?
                            .total_bits();
                        format!("OSS two-layer [{n},{bits}]")
                    }
                    GainKind::Biorthogonal => format!("biorthogonal N={n}"),
                };
                out.push(computed_row(label, report));
            }
            GainRowRequest::Spec { label, spec } => {
                let spec = spec.clone().validate()?;
                out.push(computed_row(label.clone(), gain_report(&spec)?));
            }
            GainRowRequest::Cited => out.extend(CITED_GAINS.iter().map(|c| GainRow {
                code: c.code.to_string(),
                source: GainSource::Cited,
                nominal_gain_db: c.nominal_gain_db,
                effective_gain_db: c.effective_gain_db,
                d_min_sq: None,
                nearest_neighbors_per_bit: None,
            })),
        }
    }
    Ok(out)
}

/// The default comparison: two-layer OSS at lengths 65, 129 and 257 (the
/// smallest lengths giving 12, 14 and 16 bits), biorthogonal codes of
/// matching size, and the cited classical codes.
pub fn default_gain_rows() -> Vec<GainRowRequest> {
    let mut rows: Vec<GainRowRequest> = [65, 129, 257]
        .into_iter()
        .map(|n| GainRowRequest::Family {
            kind: GainKind::OssTwoLayer,
            n,
        })
        .collect();
    rows.extend([64, 128, 256].into_iter().map(|n| GainRowRequest::Family {
        kind: GainKind::Biorthogonal,
        n,
    }));
    rows.extend([64, 128, 256].into_iter().map(|n| GainRowRequest::Family {
        kind: GainKind::OssSingle,
        n,
    }));
    rows.push(GainRowRequest::Cited);
    rows
}

/// Settings for the Monte Carlo feasibility search in [`fbl_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityConfig {
    pub trials: u64,
    pub seed: u64,
    pub decoder: DecoderKind,
    pub options: SweepOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FblRow {
    pub n: usize,
    pub capacity: f64,
    pub normal_approx_rate: f64,
    /// Best rate among the candidates meeting the target, if any.
    pub oss_rate: Option<f64>,
    pub oss_bler: Option<f64>,
    pub oss_code: Option<CodeSpec>,
}

/// Small single- and two-layer codes of length `n` used as feasibility candidates.
pub fn candidate_family(n: usize) -> Vec<CodeSpec> {
    let mut out = Vec::new();
    for k in 1..=4 {
        out.push(CodeSpec::single_layer(n, k));
        out.push(CodeSpec::new(n, vec![LayerSpec::new(k, vec![-1.0, 1.0])]));
        out.push(CodeSpec::two_layer_antipodal(n, k));
    }
    out.into_iter()
        .filter(|s| s.clone().validate().is_ok_and(|v| v.total_bits() > 0))
        .collect()
}

/// Normal-approximation rates over `n_grid` at `snr_db`, with the highest-rate
/// candidate whose simulated BLER at `σ² = E_s / snr` is at most `epsilon`.
pub fn fbl_table(
    snr_db: f64,
    epsilon: f64,
    n_grid: &[usize],
    candidates: &[CodeSpec],
    mc: &FeasibilityConfig,
) -> Result<Vec<FblRow>, SimError> {
    let snr = 10f64.powf(snr_db / 10.0);
    let pool = build_pool(mc.options.workers)?;
    let mut rows = Vec::with_capacity(n_grid.len());
    for (i, &n) in n_grid.iter().enumerate() {
        let mut best: Option<(f64, f64, CodeSpec)> = None;
        for (j, spec) in candidates.iter().filter(|s| s.n == n).enumerate() {
            let v = spec.clone().validate()?;
            if mc.decoder.supports(&v).is_err() || v.code_rate() <= 0.0 {
                continue;
            }
            let rate = v.code_rate();
            if best.as_ref().is_some_and(|b| b.0 >= rate) {
                continue;
            }
            let sigma = sigma_from_snr(&v, snr_db);
            let stream = RngStream::new(mc.seed, ((i as u64) << 32) | j as u64);
            let (trials, errors) = simulate_point(
                &pool,
                &mc.options,
                &v,
                mc.decoder,
                sigma,
                stream,
                mc.trials,
                u64::MAX,
            )?;
            let bler = errors as f64 / trials as f64;
            if bler <= epsilon {
                best = Some((rate, bler, spec.clone()));
            }
        }
        rows.push(FblRow {
            n,
            capacity: awgn_capacity(snr),
            normal_approx_rate: normal_approx_rate(snr, n, epsilon)?,
            oss_rate: best.as_ref().map(|b| b.0),
            oss_bler: best.as_ref().map(|b| b.1),
            oss_code: best.map(|b| b.2),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(spec: CodeSpec, grid: Vec<f64>) -> SweepPlan {
        SweepPlan {
            spec,
            ebn0_grid_db: grid,
            max_trials: 4000,
            target_errors: 100,
            seed: 5,
            decoder: DecoderKind::EmapSsc,
        }
    }

    #[test]
    fn plan_validation() {
        let ok = plan(CodeSpec::single_layer(16, 1), vec![0.0, 1.0]);
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.ebn0_grid_db = vec![1.0, 1.0];
        assert!(matches!(bad.validate(), Err(SimError::InvalidPlan(_))));
        let mut bad = ok.clone();
        bad.ebn0_grid_db.clear();
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.max_trials = 999;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.target_errors = 19;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.decoder = DecoderKind::TwoStage;
        assert!(matches!(bad.validate(), Err(SimError::Decode(_))));
    }

    #[test]
    fn wilson_properties() {
        let (lo, hi) = wilson_interval(0, 1000, Z_95);
        assert_eq!(lo, 0.0);
        // zero-error upper limit z²/(n + z²)
        assert!((hi - Z_95 * Z_95 / (1000.0 + Z_95 * Z_95)).abs() < 1e-15);
        let (lo, hi) = wilson_interval(1000, 1000, Z_95);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0);
        let (lo, hi) = wilson_interval(37, 1000, Z_95);
        assert!(lo < 0.037 && 0.037 < hi);
        // symmetric under errors ↔ successes
        let (lo2, hi2) = wilson_interval(963, 1000, Z_95);
        assert!((lo - (1.0 - hi2)).abs() < 1e-15 && (hi - (1.0 - lo2)).abs() < 1e-15);
    }

    #[test]
    fn noiseless_point_has_no_errors() {
        let p = plan(CodeSpec::two_layer_antipodal(16, 2), vec![60.0]);
        let pts = run_sweep_with(&p, &SweepOptions::with_workers(2)).unwrap();
        assert_eq!(pts[0].errors, 0);
        assert_eq!(pts[0].trials, 4000);
    }

    #[test]
    fn early_stop_on_chunk_boundary() {
        let mut p = plan(CodeSpec::single_layer(16, 1), vec![-5.0]);
        p.max_trials = 100_000;
        let opts = SweepOptions {
            workers: 3,
            chunk_size: 100,
        };
        let pts = run_sweep_with(&p, &opts).unwrap();
        assert!(pts[0].errors >= 100);
        assert_eq!(pts[0].trials % 100, 0);
        assert!(pts[0].trials < 1000);
    }

    #[test]
    fn worker_count_invariance() {
        let p = plan(CodeSpec::two_layer_antipodal(32, 1), vec![2.0, 4.0, 6.0]);
        let a = run_sweep_with(
            &p,
            &SweepOptions {
                workers: 1,
                chunk_size: 256,
            },
        )
        .unwrap();
        let b = run_sweep_with(
            &p,
            &SweepOptions {
                workers: 7,
                chunk_size: 256,
            },
        )
        .unwrap();
        assert_eq!(sweep_csv(&a), sweep_csv(&b));
        assert!(sweep_csv(&a).starts_with(CSV_HEADER));
    }

    #[test]
    fn analytic_models() {
        let s = CodeSpec::single_layer(16, 1).validate().unwrap();
        assert_eq!(
            AnalyticModel::for_spec(&s).unwrap().kind(),
            AnalyticKind::Exact
        );
        let s = CodeSpec::two_layer_antipodal(16, 1).validate().unwrap();
        assert_eq!(
            AnalyticModel::for_spec(&s).unwrap().kind(),
            AnalyticKind::UpperBound
        );
        let three = CodeSpec::new(
            16,
            vec![
                LayerSpec::new(1, vec![1.0]),
                LayerSpec::new(1, vec![-1.0]),
                LayerSpec::new(1, vec![2.0]),
            ],
        )
        .validate()
        .unwrap();
        assert!(matches!(
            AnalyticModel::for_spec(&three),
            Err(SimError::AnalyticUnavailable(_))
        ));
        // amplitude 2 halves the effective σ
        let two = CodeSpec::new(8, vec![LayerSpec::new(1, vec![2.0])])
            .validate()
            .unwrap();
        let unit = CodeSpec::single_layer(8, 1).validate().unwrap();
        let q = QuadratureConfig::default();
        let a = AnalyticModel::for_spec(&two)
            .unwrap()
            .evaluate(0.8, &q)
            .unwrap();
        let b = AnalyticModel::for_spec(&unit)
            .unwrap()
            .evaluate(0.4, &q)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gain_table_rows() {
        let rows = gain_table(&[
            GainRowRequest::Family {
                kind: GainKind::OssTwoLayer,
                n: 65,
            },
            GainRowRequest::Cited,
        ])
        .unwrap();
        assert_eq!(rows.len(), 1 + CITED_GAINS.len());
        assert_eq!(rows[0].code, "OSS two-layer [65,12]");
        assert_eq!(rows[1].code, "RM [64,7,16]");
        assert_eq!(
            (rows[1].nominal_gain_db, rows[1].effective_gain_db),
            (5.4, 4.4)
        );
        assert_eq!(rows[1].source, GainSource::Cited);
    }

    #[test]
    fn fbl_half_epsilon_column() {
        let mc = FeasibilityConfig {
            trials: 1000,
            seed: 1,
            decoder: DecoderKind::EmapSsc,
            options: SweepOptions::with_workers(2),
        };
        let rows = fbl_table(0.0, 0.5, &[16, 64], &[], &mc).unwrap();
        for r in rows {
            let nf = r.n as f64;
            assert_eq!(r.normal_approx_rate, r.capacity + nf.log2() / (2.0 * nf));
            assert!(r.oss_rate.is_none());
        }
    }
}
