//! Command-line front end for `nvforce`: configuration, λ sweeps, readout
//! simulation and fitting, and the shape-factor self-check.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{cmd_curve, cmd_fit, cmd_simulate, cmd_verify, PhaseSource, VerifyGrid, VerifyReport};
pub use config::{RunConfig, Scenario};
pub use error::CliError;

use config::{quantity, Dim};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Current,
    Projected,
}

#[derive(Debug, Parser)]
#[command(name = "nvforce", version, about = "Monopole-dipole exclusion limits from NV spin-echo data")]
struct Cli {
    /// Run configuration (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; overrides `output` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<f64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "current", global = true)]
    scenario: ScenarioArg,
    /// Print the effective configuration and exit.
    #[arg(long = "dump-config", global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the exclusion curve over the configured λ grid.
    Curve,
    /// Check the closed-form shape factor against volume quadrature.
    Verify {
        #[arg(long, default_value = "0.1um")]
        lambda_min: String,
        #[arg(long, default_value = "1mm")]
        lambda_max: String,
        #[arg(long, default_value_t = 5)]
        lambda_points: usize,
        #[arg(long, default_value = "0.05um")]
        d_min: String,
        #[arg(long, default_value = "10um")]
        d_max: String,
        #[arg(long, default_value_t = 5)]
        d_points: usize,
        /// Comma-separated source radii.
        #[arg(long, default_value = "100um,300um,500um")]
        radii: String,
        #[arg(long = "corrupt-closed-form", hide = true)]
        corrupt: Option<f64>,
    },
    /// Generate synthetic photoluminescence readout.
    Simulate {
        /// True accumulated phase (rad).
        #[arg(long = "phi-true", conflicts_with = "coupling", required_unless_present = "coupling", allow_hyphen_values = true)]
        phi_true: Option<f64>,
        /// Coupling g; the phase follows from the configured experiment at `--lambda`.
        #[arg(long, allow_hyphen_values = true)]
        coupling: Option<f64>,
        #[arg(long, default_value = "20um")]
        lambda: String,
    },
    /// Fit readout data; with a benchmark file, difference the phases.
    Fit {
        data: PathBuf,
        #[arg(long)]
        benchmark: Option<PathBuf>,
    },
}

fn length_arg(name: &str, text: &str) -> Result<f64, CliError> {
    quantity(text, Dim::Length).map_err(|m| CliError::Usage(format!("--{name}: {m}")))
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let scenario = match cli.scenario {
        ScenarioArg::Current => Scenario::Current,
        ScenarioArg::Projected => Scenario::Projected,
    };
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        None => String::new(),
    };
    let mut cfg = RunConfig::parse(&text, scenario)?;
    if let Some(p) = &cli.out {
        cfg.output = p.display().to_string();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.rel_tol {
        cfg.rel_tol = t;
    }
    if let Some(n) = cli.threads {
        cfg.threads = Some(n);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: &Cli, cfg: &RunConfig, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<(), CliError> {
    match &cli.command {
        None => Err(CliError::Usage("no command given (curve, verify, simulate, fit)".into())),
        Some(Command::Curve) => cmd_curve(cfg, out, err),
        Some(Command::Verify {
            lambda_min,
            lambda_max,
            lambda_points,
            d_min,
            d_max,
            d_points,
            radii,
            corrupt,
        }) => {
            let radii = radii
                .split(',')
                .map(|r| length_arg("radii", r))
                .collect::<Result<Vec<_>, _>>()?;
            let grid = VerifyGrid {
                lambdas: nvforce::limits::log_grid(
                    length_arg("lambda-min", lambda_min)?,
                    length_arg("lambda-max", lambda_max)?,
                    *lambda_points,
                ),
                gaps: nvforce::limits::log_grid(length_arg("d-min", d_min)?, length_arg("d-max", d_max)?, *d_points),
                radii,
            };
            cmd_verify(&grid, cfg.rel_tol, *corrupt, out).map(|_| ())
        }
        Some(Command::Simulate {
            phi_true,
            coupling,
            lambda,
        }) => {
            let source = match (phi_true, coupling) {
                (Some(p), _) => PhaseSource::Phase(*p),
                (None, Some(g)) => PhaseSource::Coupling {
                    g: *g,
                    lambda: length_arg("lambda", lambda)?,
                },
                (None, None) => return Err(CliError::Usage("give --phi-true or --coupling".into())),
            };
            cmd_simulate(cfg, source, cli.out.as_deref(), out, err).map(|_| ())
        }
        Some(Command::Fit { data, benchmark }) => cmd_fit(data, benchmark.as_deref(), out).map(|_| ()),
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = load_config(&cli).and_then(|cfg| {
        if cli.dump_config {
            return write!(out, "{}", cfg.dump()).map_err(|e| CliError::io("<stdout>", e));
        }
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cfg.threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
        pool.install(|| dispatch(&cli, &cfg, out, err))
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
