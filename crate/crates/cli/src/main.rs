//! `stabsep`: reproducible, certificate-emitting front end.
//!
//! Exit codes: 0 success or feasible, 2 usage, cap or malformed input,
//! 3 certified negative verdict, 4 internal verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use stabsep::channel::{builtin, ChannelJson, BUILTINS};
use stabsep::lemmas::csp1_equals_so1;
use stabsep::polar::{polar_form, PolarFormJson};
use stabsep::separation::{
    certify_csp, lambda_candidates, separation_report, CspVerdictJson, SeparationReportJson,
};
use stabsep::stabiliser::{enumerate_stab_states, states_orthogonal_to_zero, StabStateJson};
use stabsep::{Caps, Error, Prime, SCHEMA};

#[derive(Parser)]
#[command(
    name = "stabsep",
    version,
    about = "Exact stabiliser-channel certificates"
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Largest dense Hilbert-space dimension.
    #[arg(long, global = true, default_value_t = Caps::default().dense, value_parser = positive)]
    dense_cap: usize,
    /// Largest number of enumerated stabiliser states.
    #[arg(long, global = true, default_value_t = Caps::default().enumeration, value_parser = positive_u64)]
    enum_cap: u64,
    /// Largest number of points for the affine partition search.
    #[arg(long, global = true, default_value_t = Caps::default().partition_points, value_parser = positive_u64)]
    partition_cap: u64,
    /// Seed for randomised probes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON document here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Count (and optionally list) pure stabiliser states.
    Enumerate {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long, value_parser = prime)]
        d: Prime,
        /// Only states orthogonal to |0…0⟩.
        #[arg(long)]
        orthogonal_to_zero: bool,
        /// Include the canonical state list.
        #[arg(long)]
        list: bool,
    },
    /// Decide whether a channel is completely stabiliser preserving.
    CertifyCsp {
        /// Channel JSON file.
        #[arg(conflicts_with = "builtin", required_unless_present = "builtin")]
        file: Option<PathBuf>,
        /// One of the builtin channels.
        #[arg(long)]
        builtin: Option<String>,
        #[arg(short, long, requires = "builtin")]
        n: Option<usize>,
        #[arg(short, long, value_parser = prime, requires = "builtin")]
        d: Option<Prime>,
        /// Restrict the generators to |+⟩|0⟩ and the hyperplane states.
        #[arg(long)]
        lambda_candidates: bool,
    },
    /// Optimum over P_n, the λ matrix, and the bound on stabiliser operations.
    Separation {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long, value_parser = prime)]
        d: Prime,
    },
    /// Polar form of a 2n-qudit stabiliser state.
    Polar {
        /// Stabiliser state JSON file.
        file: PathBuf,
    },
    /// Randomised single-qudit CSP = SO probe.
    Csp1 {
        #[arg(short, long, value_parser = prime)]
        d: Prime,
        #[arg(long, default_value_t = 64)]
        objectives: usize,
        /// Clifford tuples sampled per eigenbasis.
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("{s:?} is not a positive integer")),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive(s).map(|v| v as u64)
}

fn prime(s: &str) -> Result<Prime, String> {
    let v: u32 = s.parse().map_err(|_| format!("{s:?} is not an integer"))?;
    Prime::new(v).map_err(|e| e.to_string())
}

/// Failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. }
            | Error::Malformed(_)
            | Error::DimensionMismatch(_)
            | Error::Field(_)
            | Error::InvalidGroup(_)
            | Error::NotApplicable(_)
            | Error::Unsupported(_) => 2,
            Error::Lp(_) | Error::NoSuchClifford(_) | Error::VerificationFailed(_) => 4,
        };
        Fail(code, e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail(2, format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(config: &RunConfig, value: &T) -> Result<(), Fail> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Fail(4, e.to_string()))?;
    match &config.output {
        Some(path) => {
            fs::write(path, text + "\n").map_err(|e| Fail(2, format!("{}: {e}", path.display())))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct EnumerateJson {
    schema: &'static str,
    n: usize,
    d: u32,
    orthogonal_to_zero: bool,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<Vec<StabStateJson>>,
}

#[derive(Serialize)]
struct Csp1Json {
    schema: &'static str,
    d: u32,
    seed: u64,
    channels_certified: usize,
    channel_failures: usize,
    objectives: usize,
    clifford_vertices: usize,
    measurement_vertices: usize,
    mismatches: Vec<usize>,
}

/// Runs the command; Ok carries the exit code of a successful run.
fn run(cli: Cli) -> Result<u8, Fail> {
    let config = &cli.config;
    let caps = Caps {
        dense: config.dense_cap,
        enumeration: config.enum_cap,
        partition_points: config.partition_cap,
    };
    match cli.command {
        Command::Enumerate {
            n,
            d,
            orthogonal_to_zero,
            list,
        } => {
            let states = if orthogonal_to_zero {
                states_orthogonal_to_zero(n, d.get(), &caps)?
            } else {
                enumerate_stab_states(n, d.get(), &caps)?
            };
            emit(
                config,
                &EnumerateJson {
                    schema: SCHEMA,
                    n,
                    d: d.get(),
                    orthogonal_to_zero,
                    count: states.len(),
                    states: list.then(|| states.iter().map(Into::into).collect()),
                },
            )?;
            Ok(0)
        }
        Command::CertifyCsp {
            file,
            builtin: name,
            n,
            d,
            lambda_candidates: restrict,
        } => {
            let ch = match (file, name) {
                (Some(path), _) => read_json::<ChannelJson>(&path)?
                    .to_channel(&caps)
                    .map_err(|e| Fail(2, e.to_string()))?,
                (None, Some(name)) => {
                    if !BUILTINS.contains(&name.as_str()) {
                        return Err(Fail(
                            2,
                            format!("unknown builtin {name:?}; known: {}", BUILTINS.join(", ")),
                        ));
                    }
                    let (Some(n), Some(d)) = (n, d) else {
                        return Err(Fail(2, "--builtin needs -n and -d".into()));
                    };
                    builtin(&name, n, d, &caps)?
                }
                (None, None) => return Err(Fail(2, "give a channel file or --builtin".into())),
            };
            let candidates = if restrict {
                if ch.n_in() != ch.n_out() {
                    return Err(Fail(2, "λ candidates need n_in = n_out".into()));
                }
                Some(lambda_candidates(ch.n_in(), ch.modulus())?)
            } else {
                None
            };
            let verdict = certify_csp(&ch, candidates.as_deref(), &caps)?;
            emit(config, &CspVerdictJson::new(&ch, &verdict))?;
            Ok(if verdict.is_feasible() { 0 } else { 3 })
        }
        Command::Separation { n, d } => {
            let report = separation_report(n, d, &caps)?;
            emit(config, &SeparationReportJson::from(&report))?;
            Ok(0)
        }
        Command::Polar { file } => {
            let state = read_json::<StabStateJson>(&file)?
                .to_state()
                .map_err(|e| Fail(2, e.to_string()))?;
            let form = polar_form(&state)?;
            emit(config, &PolarFormJson::from(&form))?;
            Ok(0)
        }
        Command::Csp1 {
            d,
            objectives,
            samples,
        } => {
            let r = csp1_equals_so1(d, objectives, samples, config.seed, &caps)?;
            let passed = r.passed();
            emit(
                config,
                &Csp1Json {
                    schema: SCHEMA,
                    d: d.get(),
                    seed: r.seed,
                    channels_certified: r.channels_certified,
                    channel_failures: r.channel_failures,
                    objectives: r.objectives,
                    clifford_vertices: r.clifford_vertices,
                    measurement_vertices: r.measurement_vertices,
                    mismatches: r.mismatches,
                },
            )?;
            Ok(if passed { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("STABSEP_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
    {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("stabsep: {msg}");
            ExitCode::from(code)
        }
    }
}
