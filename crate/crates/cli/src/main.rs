//! `qpebt` — JSON front end for the channel/state duality toolkit.
//!
//! Exit codes: 0 success (including "unknown" verdicts), 2 invalid
//! input, 3 numerical failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qpebt_core::channels::{
    choi, kraus_from_choi, mixed_unitary_channel, phi_f, phi_lambda, KrausChannel,
};
use qpebt_core::json::{ChannelJson, ChoiJson, DensityMatrixJson, MatrixJson};
use qpebt_core::multipartite::{ghz, slice_operators, w_state};
use qpebt_core::numerics::{numerical_rank, partial_trace, Tolerances};
use qpebt_core::schmidt::{
    channel_sn_bounds, classify_pebt, classify_rs_cpt, sn_bounds, sn_isotropic,
};
use qpebt_core::states::{isotropic_fidelity, schmidt_rank, DensityMatrix, PureState};
use qpebt_core::Error;

#[derive(Parser, Debug)]
#[command(name = "qpebt", version, about = "Quantum channel duality and Schmidt-number toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,

    /// Absolute eigenvalue floor for positivity decisions.
    #[arg(long, global = true)]
    tol_psd: Option<f64>,

    /// Pretty-print the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Choi matrix of a channel given in Kraus form.
    Choi { file: PathBuf },
    /// Kraus decomposition of a Choi matrix.
    Kraus { file: PathBuf },
    /// Schmidt-number bounds of a bipartite density matrix.
    Sn {
        file: PathBuf,
        /// Local dimensions when the file holds a bare matrix.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// r-PEBT membership or, with --rs, the (r,s)-CPT bracket.
    Classify {
        file: PathBuf,
        #[arg(long, conflicts_with = "rs")]
        r: Option<usize>,
        #[arg(long)]
        rs: bool,
    },
    /// Run a named worked example and emit a full run report.
    Example {
        /// isotropic | phi-f | phi-lambda | mixed-unitary | ghz | w
        name: String,
        #[command(flatten)]
        params: ExampleParams,
    },
    /// Run every line of FILE as a qpebt invocation; one report per line.
    Batch { file: PathBuf },
}

#[derive(Args, Debug, Clone)]
struct ExampleParams {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    f: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Mixing probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long)]
    mu: Option<f64>,
    /// Bipartition cut for the multipartite examples.
    #[arg(long)]
    cut: Option<usize>,
}

#[derive(Serialize)]
struct RunReport {
    command: Vec<String>,
    input_digest: String,
    tolerances: TolEcho,
    result: Value,
    wall_time_ms: f64,
}

#[derive(Serialize)]
struct TolEcho {
    rank_rel: f64,
    psd_abs: f64,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().collect();
    match run(&cli, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli, argv: &[String]) -> Result<(), Failure> {
    let tol = resolve_tolerances(cli)?;
    match &cli.command {
        Command::Batch { file } => run_batch(file, cli.pretty),
        _ => {
            let start = Instant::now();
            let (payload, digest) = execute(&cli.command, &tol)?;
            let out = if matches!(cli.command, Command::Example { .. }) {
                serde_json::to_value(RunReport {
                    command: argv.iter().skip(1).cloned().collect(),
                    input_digest: digest,
                    tolerances: TolEcho {
                        rank_rel: tol.rank_rel,
                        psd_abs: tol.psd_abs,
                    },
                    result: payload,
                    wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                })
                .unwrap()
            } else {
                payload
            };
            emit(&out, cli.pretty);
            Ok(())
        }
    }
}

fn emit(v: &Value, pretty: bool) {
    let s = if pretty {
        serde_json::to_string_pretty(v).unwrap()
    } else {
        serde_json::to_string(v).unwrap()
    };
    println!("{s}");
}

fn resolve_tolerances(cli: &Cli) -> Result<Tolerances<f64>, Failure> {
    let defaults = Tolerances::<f64>::default();
    let env_f64 = |key: &str| -> Result<Option<f64>, Failure> {
        match std::env::var(key) {
            Ok(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| invalid(format!("{key} is not a number: {s}"))),
            Err(_) => Ok(None),
        }
    };
    let rank = match cli.tol_rank {
        Some(v) => v,
        None => env_f64("QPEBT_TOL_RANK")?.unwrap_or(defaults.rank_rel),
    };
    let psd = match cli.tol_psd {
        Some(v) => v,
        None => env_f64("QPEBT_TOL_PSD")?.unwrap_or(defaults.psd_abs),
    };
    Tolerances::new(rank, psd).map_err(Failure::from)
}

fn read_input(path: &PathBuf) -> Result<(String, String), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
    Ok((text, digest))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| invalid(format!("malformed JSON: {e}")))
}

/// Runs one subcommand and returns (payload, input digest).
fn execute(cmd: &Command, tol: &Tolerances<f64>) -> Result<(Value, String), Failure> {
    match cmd {
        Command::Choi { file } => {
            let (text, digest) = read_input(file)?;
            let phi: KrausChannel<f64> = parse_json::<ChannelJson>(&text)?.to_channel()?;
            let c = choi(&phi)?;
            Ok((serde_json::to_value(ChoiJson::from_choi(&c)).unwrap(), digest))
        }
        Command::Kraus { file } => {
            let (text, digest) = read_input(file)?;
            let c = parse_json::<ChoiJson>(&text)?.to_choi(tol)?;
            let phi = kraus_from_choi(&c, tol)?;
            Ok((
                serde_json::to_value(ChannelJson::from_channel(&phi)).unwrap(),
                digest,
            ))
        }
        Command::Sn { file, dims } => {
            let (text, digest) = read_input(file)?;
            let rho: DensityMatrix<f64> = match dims {
                Some(dims) => {
                    let m = parse_json::<MatrixJson>(&text)?.to_matrix()?;
                    DensityMatrix::new(m, dims.clone())?
                }
                None => parse_json::<DensityMatrixJson>(&text)?.to_state()?,
            };
            let b = sn_bounds(&rho, tol)?;
            Ok((serde_json::to_value(b).unwrap(), digest))
        }
        Command::Classify { file, r, rs } => {
            let (text, digest) = read_input(file)?;
            let phi: KrausChannel<f64> = parse_json::<ChannelJson>(&text)?.to_channel()?;
            let payload = if *rs {
                serde_json::to_value(classify_rs_cpt(&phi, tol)?).unwrap()
            } else {
                let r = r.ok_or_else(|| invalid("classify needs --r N or --rs"))?;
                serde_json::to_value(classify_pebt(&phi, r, tol)?).unwrap()
            };
            Ok((payload, digest))
        }
        Command::Example { name, params } => {
            let digest = format!("{:x}", Sha256::digest(format!("{name} {params:?}")));
            Ok((run_example(name, params, tol)?, digest))
        }
        Command::Batch { .. } => unreachable!("batch handled by the caller"),
    }
}

fn run_batch(file: &PathBuf, pretty: bool) -> Result<(), Failure> {
    let (text, _) = read_input(file)?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut argv = vec!["qpebt".to_string()];
        argv.extend(line.split_whitespace().map(str::to_string));
        let sub = Cli::try_parse_from(&argv)
            .map_err(|e| invalid(format!("batch line {}: {e}", lineno + 1)))?;
        if matches!(sub.command, Command::Batch { .. }) {
            return Err(invalid(format!("batch line {}: nested batch", lineno + 1)));
        }
        let tol = resolve_tolerances(&sub)?;
        let start = Instant::now();
        let (payload, digest) = execute(&sub.command, &tol)?;
        let report = RunReport {
            command: argv[1..].to_vec(),
            input_digest: digest,
            tolerances: TolEcho {
                rank_rel: tol.rank_rel,
                psd_abs: tol.psd_abs,
            },
            result: payload,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        emit(&serde_json::to_value(report).unwrap(), pretty);
    }
    Ok(())
}

fn need<T: Copy>(v: &Option<T>, flag: &str, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| invalid(format!("example {name} needs {flag}")))
}

fn run_example(name: &str, p: &ExampleParams, tol: &Tolerances<f64>) -> Result<Value, Failure> {
    match name {
        "isotropic" => {
            let d = need(&p.d, "--d", name)?;
            let f = need(&p.f, "--f", name)?;
            let rho = isotropic_fidelity(d, f)?;
            let bounds = sn_bounds(&rho, tol)?;
            Ok(json!({
                "d": d,
                "f": f,
                "schmidt_number": sn_isotropic(d, f)?,
                "bounds": bounds,
            }))
        }
        "phi-f" => {
            let d = need(&p.d, "--d", name)?;
            let f = need(&p.f, "--f", name)?;
            let phi = phi_f(d, f)?;
            Ok(json!({
                "d": d,
                "f": f,
                "channel_bounds": channel_sn_bounds(&phi, tol)?,
                "rs": classify_rs_cpt(&phi, tol)?,
            }))
        }
        "phi-lambda" => {
            let d = need(&p.d, "--d", name)?;
            let lambda = need(&p.lambda, "--lambda", name)?;
            let phi = phi_lambda(d, lambda)?;
            Ok(json!({
                "d": d,
                "lambda": lambda,
                "separable_threshold": 1.0 / (d as f64 + 1.0),
                "channel_bounds": channel_sn_bounds(&phi, tol)?,
                "rs": classify_rs_cpt(&phi, tol)?,
            }))
        }
        "mixed-unitary" => {
            let d = need(&p.d, "--d", name)?;
            let mu = p.mu.unwrap_or(1.0);
            let probs = p
                .p
                .clone()
                .ok_or_else(|| invalid("example mixed-unitary needs --p"))?;
            let phi = mixed_unitary_channel(d, &probs)?;
            // Witness coefficients 1 - d μ p_α: a negative entry means the
            // reduction witness at μ detects the channel output.
            let coefficients: Vec<f64> =
                probs.iter().map(|q| 1.0 - d as f64 * mu * q).collect();
            let detected = coefficients.iter().any(|&c| c < 0.0);
            Ok(json!({
                "d": d,
                "p": probs,
                "mu": mu,
                "witness_coefficients": coefficients,
                "detected": detected,
                "channel_bounds": channel_sn_bounds(&phi, tol)?,
            }))
        }
        "ghz" | "w" => {
            let psi: PureState<f64> = if name == "ghz" { ghz() } else { w_state() };
            let cut = p.cut.unwrap_or(1);
            let slices = slice_operators(&psi)?;
            let ranks: Vec<usize> = slices
                .ops()
                .iter()
                .map(|f| numerical_rank(f, tol))
                .collect();
            let reduced = partial_trace(psi.projector().matrix(), &[2, 2, 2], &[1, 2])?;
            let rho = DensityMatrix::new(reduced.hermitize(), vec![2, 2])?;
            Ok(json!({
                "state": name,
                "cut": cut,
                "schmidt_rank_at_cut": schmidt_rank(&psi, cut, tol)?,
                "slice_ranks": ranks,
                "reduced_23_bounds": sn_bounds(&rho, tol)?,
            }))
        }
        other => Err(invalid(format!(
            "unknown example '{other}'; expected isotropic|phi-f|phi-lambda|mixed-unitary|ghz|w"
        ))),
    }
}
