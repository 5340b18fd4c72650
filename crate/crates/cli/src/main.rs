//! `oss`: encode, decode, simulate and analyze OSS codes.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oss_core::analysis::AnalysisError;
use oss_core::sim::{
    candidate_family, compare_report, default_gain_rows, fbl_table, gain_table, run_sweep_with,
    sweep_csv, FeasibilityConfig, GainRowRequest, SimError, SweepOptions, SweepPlan,
};
use oss_core::{encode, ChannelObservation, CodeSpec, DecoderKind, MessageBits, ValidatedSpec};
use serde::Serialize;
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "oss",
    version,
    about = "Orthogonal sparse superposition codes on the AWGN channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a hex message into a codeword (JSON).
    Encode {
        #[arg(long)]
        spec: PathBuf,
        /// Message as hex, most significant bit first, zero-padded to whole digits.
        #[arg(long)]
        bits: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode an observation `{"y": [...], "sigma": s}` (JSON).
    Decode {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "emap_ssc")]
        decoder: DecoderKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo BLER over an Eb/N0 grid.
    Sweep(SweepArgs),
    /// Monte Carlo BLER beside the exact value or upper bound.
    Compare(SweepArgs),
    /// Coding-gain table.
    Gains {
        /// Extra spec to enumerate as an additional row.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normal-approximation rates and feasible OSS rates at a fixed SNR.
    Fbl {
        #[arg(long = "snr-db", allow_hyphen_values = true, default_value_t = -3.0)]
        snr_db: f64,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Block lengths, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256])]
        n: Vec<usize>,
        /// Trials per candidate code; 0 skips the feasibility search.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "emap_ssc")]
        decoder: DecoderKind,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// `start:step:stop` in dB (inclusive), or a single value.
    #[arg(long, allow_hyphen_values = true)]
    ebn0: String,
    #[arg(long = "max-trials", default_value_t = 100_000)]
    max_trials: u64,
    #[arg(long = "target-errors", default_value_t = 100)]
    target_errors: u64,
    #[arg(long, default_value = "emap_ssc")]
    decoder: DecoderKind,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Analysis(AnalysisError::QuadratureNonConvergence { .. }) => {
                CliError::Numeric(e.to_string())
            }
            SimError::WorkerPool(_) => CliError::Io(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed {what} {}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<ValidatedSpec, CliError> {
    let spec: CodeSpec = read_json(path, "spec")?;
    spec.validate()
        .map_err(|e| CliError::Input(format!("invalid spec {}: {e}", path.display())))
}

/// Parses `start:step:stop` (inclusive) or a single value.
fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("bad --ebn0 `{text}`; expected start:step:stop"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [single] => Ok(vec![single]),
        [start, step, stop] if step > 0.0 && stop >= start => {
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // rounded so that e.g. 0.1 steps print as 0.3, not 0.30000000000000004
            Ok((0..count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(bad()),
    }
}

fn sweep_setup(args: &SweepArgs) -> Result<(SweepPlan, SweepOptions), CliError> {
    let spec: CodeSpec = read_json(&args.spec, "spec")?;
    let plan = SweepPlan {
        spec,
        ebn0_grid_db: parse_grid(&args.ebn0)?,
        max_trials: args.max_trials,
        target_errors: args.target_errors,
        seed: args.seed,
        decoder: args.decoder,
    };
    plan.validate()?;
    let opts = args
        .workers
        .map_or_else(SweepOptions::default, SweepOptions::with_workers);
    Ok((plan, opts))
}

fn emit(
    out: Option<&Path>,
    csv: impl FnOnce() -> String,
    json: impl FnOnce() -> String,
) -> Result<(), CliError> {
    match out {
        None => {
            print!("{}", csv());
            Ok(())
        }
        Some(path) => {
            let body = match path.extension().and_then(|e| e.to_str()) {
                Some("csv") => csv(),
                Some("json") => json(),
                _ => {
                    return Err(CliError::Input(format!(
                        "--out must end in .csv or .json: {}",
                        path.display()
                    )))
                }
            };
            fs::write(path, body)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn emit_json(out: Option<&Path>, value: &impl Serialize) -> Result<(), CliError> {
    let body = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
    }
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Encode { spec, bits, out } => {
            let spec = load_spec(&spec)?;
            let msg = MessageBits::from_hex(&bits, spec.total_bits())
                .map_err(|e| CliError::Input(e.to_string()))?;
            let (codeword, placements) =
                encode(&spec, &msg).map_err(|e| CliError::Input(e.to_string()))?;
            emit_json(
                out.as_deref(),
                &output::EncodeOutput {
                    bits: &msg,
                    hex: msg.to_hex(),
                    placements,
                    samples: codeword.samples,
                },
            )
        }
        Command::Decode {
            spec,
            input,
            decoder,
            out,
        } => {
            let spec = load_spec(&spec)?;
            let obs: ChannelObservation = read_json(&input, "observation")?;
            let result = decoder
                .decode(&spec, &obs)
                .map_err(|e| CliError::Input(e.to_string()))?;
            emit_json(
                out.as_deref(),
                &output::DecodeOutput {
                    hex: result.bits.to_hex(),
                    result: &result,
                },
            )
        }
        Command::Sweep(args) => {
            let (plan, opts) = sweep_setup(&args)?;
            let points = run_sweep_with(&plan, &opts)?;
            emit(
                args.out.as_deref(),
                || sweep_csv(&points),
                || to_json(&points),
            )
        }
        Command::Compare(args) => {
            let (plan, opts) = sweep_setup(&args)?;
            let rows = compare_report(&plan, &opts)?;
            emit(
                args.out.as_deref(),
                || output::compare_csv(&rows),
                || to_json(&rows),
            )
        }
        Command::Gains { spec, out } => {
            let mut requests = default_gain_rows();
            if let Some(path) = spec {
                let label = path
                    .file_stem()
                    .map_or("spec".into(), |s| s.to_string_lossy().into_owned());
                requests.push(GainRowRequest::Spec {
                    label,
                    spec: load_spec(&path)?.into_spec(),
                });
            }
            let rows = gain_table(&requests)?;
            emit(
                out.as_deref(),
                || output::gains_csv(&rows),
                || to_json(&rows),
            )
        }
        Command::Fbl {
            snr_db,
            epsilon,
            n,
            trials,
            seed,
            decoder,
            workers,
            out,
        } => {
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(CliError::Input(format!(
                    "--epsilon must lie in (0, 1), got {epsilon}"
                )));
            }
            let candidates: Vec<CodeSpec> = if trials == 0 {
                Vec::new()
            } else {
                n.iter().flat_map(|&len| candidate_family(len)).collect()
            };
            let options = workers.map_or_else(SweepOptions::default, SweepOptions::with_workers);
            let mc = FeasibilityConfig {
                trials,
                seed,
                decoder,
                options,
            };
            let rows = fbl_table(snr_db, epsilon, &n, &candidates, &mc)?;
            emit(out.as_deref(), || output::fbl_csv(&rows), || to_json(&rows))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
