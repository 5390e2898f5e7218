//! Command-line surface: fitting, census, the clustered-sample experiment,
//! the toy solver, surface emission, and the unboundedness trace, with
//! reproducible seeds and machine-readable outputs.
//!
//! Exit codes: 0 success, 2 experiment-row failure, 3 no interior root,
//! 64 usage, 66 unreadable or invalid input, 70 internal error.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::census::{census, CensusOptions, StartStrategy};
use crate::em::{run_em, Constraint, EMOptions};
use crate::error::Error;
use crate::hills::{rows_to_csv, run_manyhills};
use crate::ingest::read_sample;
use crate::mixture::{MixtureParams, Sample};
use crate::toy::{surface_grid, surface_to_csv, unboundedness_trace, ToyProblem, MAX_X};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ROW_FAILURE: i32 = 2;
pub const EXIT_NO_INTERIOR_ROOT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INPUT: i32 = 66;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser)]
#[command(
    name = "mixcrit",
    version,
    about = "Critical points of two-component Gaussian mixture likelihoods",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    /// Random data-point pairs as means.
    RandomPairs,
    /// Deterministic alpha x quantile-mean grid.
    Grid,
    /// One start per consecutive pair of the ordered sample.
    ClusterSeeded,
    /// Cluster-seeded starts plus the requested number of random pairs.
    Combined,
}

impl From<StrategyArg> for StartStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::RandomPairs => StartStrategy::RandomPairs,
            StrategyArg::Grid => StartStrategy::GridAlphaMeans,
            StrategyArg::ClusterSeeded => StartStrategy::ClusterSeeded,
            StrategyArg::Combined => StartStrategy::Combined,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one EM fit on a sample file and emit the full trace as JSON.
    Fit {
        /// Sample file: one number per line, or a JSON array.
        #[arg(long)]
        input: PathBuf,
        /// Starting point "alpha,mu1,mu2,sigma1,sigma2"; default is the
        /// moment-based split around the sample mean.
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long = "max-iters", default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long = "sigma-floor", default_value_t = 1e-8)]
        sigma_floor: f64,
        /// Constrain both components to a common standard deviation.
        #[arg(long = "equal-variance")]
        equal_variance: bool,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multi-start critical-point census of a sample file (JSON report).
    Census {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random starts (cluster-seeded starts come on top).
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Combined)]
        strategy: StrategyArg,
        #[arg(long = "tol-dedup", default_value_t = 1e-4)]
        tol_dedup: f64,
        #[arg(long = "tol-classify", default_value_t = 1e-6)]
        tol_classify: f64,
        #[arg(long = "sigma-floor", default_value_t = 1e-8)]
        sigma_floor: f64,
        #[arg(long = "max-iters", default_value_t = 10_000)]
        max_iters: usize,
        /// Decimal digits of certification precision (>= 17).
        #[arg(long, default_value_t = 30)]
        digits: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The K-cluster experiment: one certified critical point per cluster.
    Manyhills {
        /// Number of two-point clusters (K >= 2; the sample is 1, 1.2, ..., K, K+0.2).
        #[arg(long = "K")]
        k: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long = "max-iters", default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long = "sigma-floor", default_value_t = 1e-8)]
        sigma_floor: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the constrained toy model at extended precision (JSON).
    Toy {
        /// The positive data point (the other is 0).
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        /// Decimal digits of working precision (>= 17).
        #[arg(long, default_value_t = 25)]
        digits: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the toy-model likelihood surface on an (alpha, mu) grid.
    Surface {
        #[arg(long)]
        x: f64,
        #[arg(long = "alpha-steps", default_value_t = 201)]
        alpha_steps: usize,
        #[arg(long = "mu-steps", default_value_t = 201)]
        mu_steps: usize,
        /// Lower mu bound; defaults to -1.
        #[arg(long = "mu-min", allow_negative_numbers = true)]
        mu_min: Option<f64>,
        /// Upper mu bound; defaults to x + 2.
        #[arg(long = "mu-max", allow_negative_numbers = true)]
        mu_max: Option<f64>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace the likelihood blow-up as sigma1 -> 0 with mu1 pinned to the
    /// first data point.
    Unbounded {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated sigma1 values; defaults to 1e-1 .. 1e-12.
        #[arg(long)]
        sigmas: Option<String>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(CmdError { code, message }) => {
            eprintln!("mixcrit: {message}");
            code
        }
    }
}

#[derive(Debug)]
struct CmdError {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> CmdError {
    CmdError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn input_err(message: impl Into<String>) -> CmdError {
    CmdError {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn internal(e: Error) -> CmdError {
    CmdError {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    }
}

fn load_sample(path: &Path) -> Result<Sample, CmdError> {
    read_sample(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), CmdError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| CmdError {
            code: EXIT_INTERNAL,
            message: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json_pretty<T: serde::Serialize>(value: &T) -> Result<String, CmdError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CmdError {
            code: EXIT_INTERNAL,
            message: e.to_string(),
        })
}

fn dispatch(cmd: Command) -> Result<i32, CmdError> {
    match cmd {
        Command::Fit {
            input,
            start,
            max_iters,
            sigma_floor,
            equal_variance,
            out,
        } => {
            if max_iters == 0 {
                return Err(usage("--max-iters must be at least 1"));
            }
            let sample = load_sample(&input)?;
            if sample.len() < 2 {
                return Err(input_err("fit needs at least 2 data points"));
            }
            let start = match start {
                Some(s) => parse_start(&s)?,
                None => moment_start(&sample),
            };
            let opts = EMOptions {
                max_iters,
                sigma_floor,
                constraint: if equal_variance {
                    Constraint::EqualVariance
                } else {
                    Constraint::Free
                },
                ..Default::default()
            };
            let trace = run_em(&start, &sample, &opts).map_err(internal)?;
            write_output(out.as_ref(), &to_json_pretty(&trace)?)?;
            Ok(EXIT_OK)
        }
        Command::Census {
            input,
            seed,
            starts,
            strategy,
            tol_dedup,
            tol_classify,
            sigma_floor,
            max_iters,
            digits,
            out,
        } => {
            if digits < 17 {
                return Err(usage(format!("--digits must be >= 17, got {digits}")));
            }
            if starts == 0 && strategy != StrategyArg::ClusterSeeded {
                return Err(usage("--starts must be at least 1"));
            }
            if tol_dedup <= 0.0 || tol_classify <= 0.0 || sigma_floor <= 0.0 {
                return Err(usage("tolerances must be positive"));
            }
            let sample = load_sample(&input)?;
            let opts = CensusOptions {
                starts,
                strategy: strategy.into(),
                seed,
                em: EMOptions {
                    max_iters,
                    sigma_floor,
                    ..Default::default()
                },
                dedup_tol: tol_dedup,
                classify_tol: tol_classify,
                sigma_floor,
                polish_digits: digits,
            };
            let report = match census(&sample, &opts) {
                Ok(r) => r,
                Err(Error::InsufficientData { need, got }) => {
                    return Err(input_err(format!("census needs {need} points, got {got}")));
                }
                Err(e) => return Err(internal(e)),
            };
            write_output(out.as_ref(), &to_json_pretty(&report)?)?;
            Ok(EXIT_OK)
        }
        Command::Manyhills {
            k,
            format,
            max_iters,
            sigma_floor,
            out,
        } => {
            if k < 2 {
                return Err(usage(format!("--K must be at least 2, got {k}")));
            }
            if max_iters == 0 {
                return Err(usage("--max-iters must be at least 1"));
            }
            let opts = EMOptions {
                max_iters,
                sigma_floor,
                ..Default::default()
            };
            let rows = run_manyhills(k, &opts).map_err(internal)?;
            let content = match format {
                FormatArg::Csv => rows_to_csv(&rows),
                FormatArg::Json => to_json_pretty(&rows)?,
            };
            write_output(out.as_ref(), &content)?;
            let mut failed = 0;
            for row in rows.iter().filter(|r| !r.accepted) {
                failed += 1;
                eprintln!(
                    "mixcrit: row k={} failed: {}",
                    row.k,
                    row.failure.as_deref().unwrap_or("unknown reason")
                );
            }
            Ok(if failed == 0 {
                EXIT_OK
            } else {
                EXIT_ROW_FAILURE
            })
        }
        Command::Toy { x, digits, out } => {
            if digits < 17 {
                return Err(usage(format!("--digits must be >= 17, got {digits}")));
            }
            if x.is_nan() || x <= 0.0 || x > MAX_X {
                return Err(usage(format!("--x must lie in (0, {MAX_X}], got {x}")));
            }
            let problem = ToyProblem::new(x, digits).map_err(|e| usage(e.to_string()))?;
            match problem.solve() {
                Ok(result) => {
                    write_output(out.as_ref(), &to_json_pretty(&result)?)?;
                    Ok(EXIT_OK)
                }
                Err(Error::NoInteriorRoot { .. }) => {
                    eprintln!(
                        "mixcrit: no interior critical point in (0, {x}]; \
                         x is below the interior-maximum threshold"
                    );
                    Ok(EXIT_NO_INTERIOR_ROOT)
                }
                Err(e) => Err(internal(e)),
            }
        }
        Command::Surface {
            x,
            alpha_steps,
            mu_steps,
            mu_min,
            mu_max,
            format,
            out,
        } => {
            if x.is_nan() || x <= 0.0 || x > MAX_X {
                return Err(usage(format!("--x must lie in (0, {MAX_X}], got {x}")));
            }
            if alpha_steps < 2 || mu_steps < 2 {
                return Err(usage("grid needs at least 2 steps per axis"));
            }
            let lo = mu_min.unwrap_or(-1.0);
            let hi = mu_max.unwrap_or(x + 2.0);
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(usage(format!("empty mu range [{lo}, {hi}]")));
            }
            let grid = surface_grid(x, alpha_steps, (lo, hi), mu_steps)
                .map_err(|e| usage(e.to_string()))?;
            let content = match format {
                FormatArg::Csv => surface_to_csv(&grid),
                FormatArg::Json => to_json_pretty(&grid)?,
            };
            write_output(out.as_ref(), &content)?;
            Ok(EXIT_OK)
        }
        Command::Unbounded {
            input,
            sigmas,
            format,
            out,
        } => {
            let sample = load_sample(&input)?;
            let sigma_list = match sigmas {
                Some(text) => {
                    let mut vals = Vec::new();
                    for tok in text.split(',') {
                        let v: f64 = tok
                            .trim()
                            .parse()
                            .map_err(|e| usage(format!("--sigmas value {tok:?}: {e}")))?;
                        if v.is_nan() || v <= 0.0 {
                            return Err(usage(format!("sigma must be positive, got {v}")));
                        }
                        vals.push(v);
                    }
                    vals
                }
                None => (1..=12).map(|k| 10f64.powi(-k)).collect(),
            };
            let trace = match unboundedness_trace(&sample, &sigma_list) {
                Ok(t) => t,
                Err(Error::InsufficientData { .. } | Error::InvalidSample(_)) => {
                    return Err(input_err("unbounded needs at least two distinct points"));
                }
                Err(e) => return Err(internal(e)),
            };
            let content = match format {
                FormatArg::Csv => {
                    let mut s = String::from("sigma1,loglik\n");
                    for (sig, ll) in &trace {
                        s.push_str(&format!("{sig},{ll}\n"));
                    }
                    s
                }
                FormatArg::Json => to_json_pretty(&trace)?,
            };
            write_output(out.as_ref(), &content)?;
            Ok(EXIT_OK)
        }
    }
}

fn parse_start(text: &str) -> Result<MixtureParams, CmdError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(usage(format!(
            "--start needs 5 comma-separated values, got {}",
            parts.len()
        )));
    }
    let mut vals = [0.0f64; 5];
    for (slot, tok) in vals.iter_mut().zip(parts.iter()) {
        *slot = tok
            .parse()
            .map_err(|e| usage(format!("--start value {tok:?}: {e}")))?;
    }
    MixtureParams::from_array(vals).map_err(|e| usage(e.to_string()))
}

/// Overdispersed moment-based default start: means straddle the sample mean
/// by half a standard deviation.
fn moment_start(sample: &Sample) -> MixtureParams {
    let m = sample.mean();
    let s = sample.std_pop();
    let spread = if s > 0.0 { s } else { m.abs().max(1.0) * 1e-3 };
    MixtureParams {
        alpha: 0.5,
        mu1: m - 0.5 * spread,
        mu2: m + 0.5 * spread,
        sigma1: 0.75 * spread,
        sigma2: 0.75 * spread,
    }
}
