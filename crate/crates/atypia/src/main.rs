//! Command-line front end: evaluate rates, solve constraint sets, run the
//! Monte Carlo experiments, and emit CSV/JSON for external plotting.
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible constraint
//! set, 4 solver non-convergence, 5 I/O error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use atypia::config::{ConfigError, ConstraintConfig, Format, RunConfig};
use atypia::experiments::{
    coherence_experiment, compare_bounds_report, conditional_concentration, estimate_probability,
    sweep_exponent, CompareKind, EstimatePoint, FitResult, Method,
};
use atypia::output::{
    write_coherence_csv, write_compare_csv, write_concentration_csv, write_estimate_rows,
    write_json_rows, write_sidecar, Sidecar,
};
use atypia::rates::{
    coherence_rate_levy, coherence_rate_upper, gaussian_rate_scale_min, rate_binary_measurement,
    rate_entropy, rate_expectation, rate_max_eigenvalue, rate_qubit, rate_trace_distance, rate_w3,
    GaussianRatePoint, Minimizer, RateResult,
};
use atypia::sampler::SeededStream;
use atypia::solver::{min_rel_entropy, SolverConfig, SolverError};
use atypia::qstate::HermitianObservable;

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_NONCONVERGENCE: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(
    name = "atypia",
    about = "Exact decay exponents for atypical induced random quantum states, \
             with rare-event Monte Carlo verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Naive,
    Tilted,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Naive => Method::Naive,
            MethodArg::Tilted => Method::Tilted,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file for row data; stdout when omitted. A `<out>.meta.json`
    /// sidecar with the run config and fit summary is written alongside.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct SamplingArgs {
    /// Monte Carlo samples per point.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// RNG seed; fixed by default so runs are reproducible.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; defaults to all cores. Results are identical for any
    /// worker count.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed-form rate for one of the named families.
    Rate {
        #[command(subcommand)]
        family: RateFamily,
    },
    /// Minimize D(pi || rho) over a constraint set described in a JSON file.
    Solve {
        config: PathBuf,
    },
    /// Estimate the probability of a constraint set at a single n.
    Estimate {
        /// Constraint-set JSON file.
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "tilted")]
        method: MethodArg,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Estimate across an n grid and fit the decay exponent against theory.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        #[arg(long, value_enum, default_value = "tilted")]
        method: MethodArg,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Conditional concentration around the rate-minimizer, per n.
    Concentration {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        /// Trace-distance radius around the minimizer.
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Largest-amplitude exceedance experiment for Haar vectors.
    Coherence {
        #[arg(long)]
        kappa: f64,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact exponents next to earlier concentration-bound exponents.
    Compare {
        #[command(subcommand)]
        family: CompareFamily,
    },
}

#[derive(Subcommand)]
enum RateFamily {
    /// Qubit with fixed Bloch-vector norm t.
    Qubit {
        #[arg(long)]
        t: f64,
    },
    /// Largest eigenvalue at least 1/m + eps.
    MaxEig {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Rank-m0 projector outcome probability at least q.
    BinaryMeas {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        m0: usize,
        #[arg(long)]
        q: f64,
    },
    /// Trace distance from the maximally mixed state at least t.
    TraceDist {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: f64,
    },
    /// Von Neumann entropy at most eta * ln m.
    Entropy {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eta: f64,
    },
    /// Expectation of a traceless observable equal to w.
    Expectation {
        #[arg(long)]
        w: f64,
        /// Diagonal of the observable, comma-separated (must sum to 0).
        #[arg(long, value_delimiter = ',')]
        diag: Vec<f64>,
    },
    /// Closed form for the spin-1 observable diag(1, 0, -1) at m = 3.
    W3 {
        #[arg(long)]
        w: f64,
    },
    /// Largest squared amplitude at least omega: upper and Levy rates.
    Coherence {
        #[arg(long)]
        omega: f64,
    },
    /// Scale-minimized Gaussian rate at traceless coordinates t (length m^2 - 1).
    Gaussian {
        #[arg(long, value_delimiter = ',')]
        coords: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum CompareFamily {
    MaxEig {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',')]
        eps_list: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    Entropy {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',')]
        delta_list: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    Expectation {
        /// Diagonal of the observable, comma-separated (must sum to 0).
        #[arg(long, value_delimiter = ',')]
        diag: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        w_list: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    Coherence {
        #[arg(long, value_delimiter = ',')]
        omega_list: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ATYPIA_LOG")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

fn config_err(msg: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_CONFIG,
        message: msg.to_string(),
    }
}

fn io_err(msg: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_IO,
        message: msg.to_string(),
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io(_) => io_err(e),
            _ => config_err(e),
        }
    }
}

fn init_workers(workers: Option<usize>) -> Result<usize, CliError> {
    if let Some(k) = workers {
        if k == 0 {
            return Err(config_err("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| config_err(format!("thread pool: {e}")))?;
    }
    Ok(rayon::current_num_threads())
}

fn print_rate_result(label: &str, r: &RateResult) {
    println!("{label}:");
    println!("  rate      {:.16e}", r.rate);
    println!("  exponent  {:.16e}", r.exponent());
    if let Some(min) = &r.minimizer {
        let spec = match min {
            Minimizer::Spectrum(s) => s.clone(),
            Minimizer::State(rho) => rho.spectrum(),
        };
        let vals: Vec<String> = spec.values().iter().map(|v| format!("{v:.12}")).collect();
        println!("  minimizer spectrum  [{}]", vals.join(", "));
    }
    if let Some(b) = r.branch {
        println!("  branch    {b}");
    }
    println!(
        "  diagnostics  iterations {} residual {:.3e}",
        r.diagnostics.iterations, r.diagnostics.residual
    );
}

fn diag_observable(diag: &[f64]) -> Result<HermitianObservable, CliError> {
    if diag.len() < 2 {
        return Err(config_err("--diag needs at least 2 entries"));
    }
    if diag.iter().sum::<f64>().abs() > 1e-10 * diag.len() as f64 {
        return Err(config_err("--diag must sum to 0 (traceless observable)"));
    }
    Ok(HermitianObservable::from_diagonal(diag))
}

fn run_rate(family: RateFamily) -> Result<(), CliError> {
    match family {
        RateFamily::Qubit { t } => {
            let rate = rate_qubit(t).map_err(config_err)?;
            print_rate_result("qubit", &RateResult::plain(rate, 2));
        }
        RateFamily::MaxEig { m, eps } => {
            print_rate_result("max-eig", &rate_max_eigenvalue(eps, m).map_err(config_err)?);
        }
        RateFamily::BinaryMeas { m, m0, q } => {
            print_rate_result(
                "binary-meas",
                &rate_binary_measurement(q, m0, m).map_err(config_err)?,
            );
        }
        RateFamily::TraceDist { m, t } => {
            print_rate_result("trace-dist", &rate_trace_distance(t, m).map_err(config_err)?);
        }
        RateFamily::Entropy { m, eta } => {
            print_rate_result("entropy", &rate_entropy(eta, m).map_err(config_err)?);
        }
        RateFamily::Expectation { w, diag } => {
            let obs = diag_observable(&diag)?;
            print_rate_result("expectation", &rate_expectation(w, &obs).map_err(config_err)?);
        }
        RateFamily::W3 { w } => {
            let rate = rate_w3(w).map_err(config_err)?;
            print_rate_result("w3", &RateResult::plain(rate, 3));
        }
        RateFamily::Coherence { omega } => {
            let upper = coherence_rate_upper(omega).map_err(config_err)?;
            let levy = coherence_rate_levy(omega).map_err(config_err)?;
            println!("coherence:");
            println!("  upper  {upper:.16e}");
            println!("  levy   {levy:.16e}");
        }
        RateFamily::Gaussian { coords } => {
            let m2 = coords.len() + 1;
            let m = (m2 as f64).sqrt().round() as usize;
            if m * m != m2 {
                return Err(config_err(
                    "--coords must have length m^2 - 1 for some integer m",
                ));
            }
            // Leading identity coordinate is 0 for a traceless direction.
            let mut t = vec![0.0];
            t.extend_from_slice(&coords);
            let point = GaussianRatePoint::new(t).map_err(config_err)?;
            let rate = gaussian_rate_scale_min(&point).map_err(config_err)?;
            println!("gaussian:");
            println!("  scale-min rate  {rate:.16e}");
        }
    }
    Ok(())
}

fn solve_from_path(path: &PathBuf) -> Result<(ConstraintConfig, RateResult), CliError> {
    let cfg = ConstraintConfig::load(path)?;
    let set = cfg.to_constraint_set()?;
    let result = match min_rel_entropy(&set, &SolverConfig::default()) {
        Ok(r) => r,
        Err(SolverError::Infeasible(residual)) => {
            return Err(CliError {
                code: EXIT_INFEASIBLE,
                message: format!("constraint set is infeasible (residual {residual:.3e})"),
            });
        }
        Err(SolverError::NonConvergence { best }) => {
            print_rate_result("best iterate", &best);
            return Err(CliError {
                code: EXIT_NONCONVERGENCE,
                message: "solver did not converge; best iterate printed above".into(),
            });
        }
        Err(SolverError::Invalid(e)) => return Err(config_err(e)),
    };
    Ok((cfg, result))
}

/// Open `--out` (or stdout) and write rows + sidecar.
fn emit<R: serde::Serialize>(
    output: &OutputArgs,
    run: &RunConfig,
    fit: Option<&FitResult>,
    write_csv: impl Fn(&mut dyn Write) -> std::io::Result<()>,
    rows: &[R],
) -> Result<(), CliError> {
    let format = Format::from(output.format);
    let write_rows = |w: &mut dyn Write| match format {
        Format::Csv => write_csv(w),
        Format::Json => write_json_rows(w, rows),
    };
    match &output.out {
        None => {
            let stdout = std::io::stdout();
            write_rows(&mut stdout.lock()).map_err(io_err)?;
            if let Some(fit) = fit {
                println!(
                    "fit: slope {:.6} ± {:.6}, theory {:.6}, relative gap {:.3}",
                    fit.slope, fit.slope_stderr, fit.theory_rate, fit.relative_gap
                );
            }
        }
        Some(path) => {
            let mut f = std::fs::File::create(path).map_err(io_err)?;
            write_rows(&mut f).map_err(io_err)?;
            let meta = path.with_extension(format!(
                "{}meta.json",
                path.extension()
                    .map(|e| format!("{}.", e.to_string_lossy()))
                    .unwrap_or_default()
            ));
            let mut mf = std::fs::File::create(&meta).map_err(io_err)?;
            write_sidecar(&mut mf, &Sidecar { config: run, fit }).map_err(io_err)?;
            if let Some(fit) = fit {
                println!(
                    "fit: slope {:.6} ± {:.6}, theory {:.6}, relative gap {:.3}",
                    fit.slope, fit.slope_stderr, fit.theory_rate, fit.relative_gap
                );
            }
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Rate { family } => run_rate(family),
        Command::Solve { config } => {
            let (_, result) = solve_from_path(&config)?;
            print_rate_result("solve", &result);
            Ok(())
        }
        Command::Estimate {
            config,
            n,
            method,
            sampling,
            output,
        } => {
            let workers = init_workers(sampling.workers)?;
            let (cfg, _) = (ConstraintConfig::load(&config)?, ());
            let set = cfg.to_constraint_set()?;
            let point = estimate_probability(
                &set,
                n,
                sampling.samples,
                method.into(),
                SeededStream::new(sampling.seed, 0),
            )
            .map_err(config_err)?;
            let run = RunConfig {
                command: "estimate".into(),
                constraints: Some(cfg),
                n_list: Some(vec![n]),
                samples: sampling.samples,
                method: point.method,
                seed: sampling.seed,
                workers,
                eps: None,
                kappa: None,
                format: output.format.into(),
            };
            let points = vec![point];
            emit(
                &output,
                &run,
                None,
                |w| write_estimate_rows(w, Format::Csv, &points),
                &points,
            )
        }
        Command::Sweep {
            config,
            n_list,
            method,
            sampling,
            output,
        } => {
            let workers = init_workers(sampling.workers)?;
            let cfg = ConstraintConfig::load(&config)?;
            let set = cfg.to_constraint_set()?;
            let (points, fit) = sweep_exponent(
                &set,
                &n_list,
                sampling.samples,
                method.into(),
                SeededStream::new(sampling.seed, 0),
            )
            .map_err(config_err)?;
            let run = RunConfig {
                command: "sweep".into(),
                constraints: Some(cfg),
                n_list: Some(n_list),
                samples: sampling.samples,
                method: method.into(),
                seed: sampling.seed,
                workers,
                eps: None,
                kappa: None,
                format: output.format.into(),
            };
            emit(
                &output,
                &run,
                Some(&fit),
                |w| write_estimate_rows(w, Format::Csv, &points),
                &points,
            )
        }
        Command::Concentration {
            config,
            n_list,
            eps,
            sampling,
            output,
        } => {
            let workers = init_workers(sampling.workers)?;
            let cfg = ConstraintConfig::load(&config)?;
            let set = cfg.to_constraint_set()?;
            let result = conditional_concentration(
                &set,
                &n_list,
                eps,
                sampling.samples,
                SeededStream::new(sampling.seed, 0),
            )
            .map_err(config_err)?;
            let run = RunConfig {
                command: "concentration".into(),
                constraints: Some(cfg),
                n_list: Some(n_list),
                samples: sampling.samples,
                method: Method::Tilted,
                seed: sampling.seed,
                workers,
                eps: Some(eps),
                kappa: None,
                format: output.format.into(),
            };
            emit(
                &output,
                &run,
                None,
                |w| write_concentration_csv(w, &result.rows),
                &result.rows,
            )?;
            println!(
                "delta_hat: {:.6} ± {:.6}",
                result.delta_hat, result.delta_stderr
            );
            Ok(())
        }
        Command::Coherence {
            kappa,
            n_list,
            sampling,
            output,
        } => {
            let workers = init_workers(sampling.workers)?;
            let result = coherence_experiment(
                kappa,
                &n_list,
                sampling.samples,
                SeededStream::new(sampling.seed, 0),
            )
            .map_err(config_err)?;
            let points: Vec<EstimatePoint> = result
                .rows
                .iter()
                .map(|r| EstimatePoint {
                    n: r.n,
                    p_hat: r.p_hat,
                    stderr: r.stderr,
                    log_p: if r.p_hat > 0.0 {
                        r.p_hat.ln()
                    } else {
                        f64::NEG_INFINITY
                    },
                    n_samples: sampling.samples,
                    method: Method::Naive,
                    ess: None,
                    seed: sampling.seed,
                })
                .collect();
            let run = RunConfig {
                command: "coherence".into(),
                constraints: None,
                n_list: Some(n_list),
                samples: sampling.samples,
                method: Method::Naive,
                seed: sampling.seed,
                workers,
                eps: None,
                kappa: Some(kappa),
                format: output.format.into(),
            };
            emit(
                &output,
                &run,
                Some(&result.fit),
                |w| write_coherence_csv(w, &points, &result.rows),
                &result.rows,
            )
        }
        Command::Compare { family } => {
            let (kind, output) = match family {
                CompareFamily::MaxEig { m, eps_list, output } => {
                    (CompareKind::MaxEigenvalue { m, eps_list }, output)
                }
                CompareFamily::Entropy {
                    m,
                    delta_list,
                    output,
                } => (CompareKind::Entropy { m, delta_list }, output),
                CompareFamily::Expectation {
                    diag,
                    w_list,
                    output,
                } => {
                    let obs = diag_observable(&diag)?;
                    (CompareKind::Expectation { obs, w_list }, output)
                }
                CompareFamily::Coherence { omega_list, output } => {
                    (CompareKind::Coherence { omega_list }, output)
                }
            };
            let rows = compare_bounds_report(&kind).map_err(config_err)?;
            let run = RunConfig {
                command: "compare".into(),
                constraints: None,
                n_list: None,
                samples: 0,
                method: Method::Naive,
                seed: 0,
                workers: 1,
                eps: None,
                kappa: None,
                format: output.format.into(),
            };
            emit(&output, &run, None, |w| write_compare_csv(w, &rows), &rows)
        }
    }
}
