//! `hhp`: batch front-end for the truncated period mapping.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod io;

use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "hhp",
    version,
    about = "Period mapping, Siegel-disc and quantum-calculus diagnostics for circle maps"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the run configuration.
#[derive(Debug, Args)]
struct Common {
    /// Truncation cutoff N
    #[arg(long, global = true)]
    modes: Option<usize>,
    /// Sample grid size M
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Tolerance used for the command's pass flag
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized trials
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report path (JSON); CSV tables go next to it
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// H^1/2 norm of a function
    Norm {
        #[arg(long)]
        input: String,
    },
    /// Hilbert transform of a function
    Hilbert {
        #[arg(long)]
        input: String,
    },
    /// Douglas energy against the H^1/2 norm, with a grid-refinement table
    Energy {
        #[arg(long)]
        input: String,
    },
    /// Block matrix of the pullback operator
    PullbackMatrix {
        #[arg(long)]
        map: String,
    },
    /// Period matrix of a map, or of saved pullback blocks
    Period {
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        map: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Siegel-disc membership of a period matrix
    SiegelCheck {
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        map: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Finite-difference check of the Rauch variational formula
    RauchCheck {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        eps: f64,
    },
    /// Equivariance defect for `--map phi --map psi`
    Equivariance {
        #[arg(long, num_args = 1, required = true)]
        map: Vec<String>,
    },
    /// Quantum integrability residual of a complex structure
    Integrability {
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        map: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
        /// JSON array of real trial functions
        #[arg(long)]
        input: Option<String>,
    },
    /// Hilbert-Schmidt norm of the quantum derivative
    QuantumHs {
        #[arg(long)]
        input: String,
    },
    /// Diagonal limit of a welding kernel
    Kernel {
        #[arg(long)]
        map: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
        order: u8,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x: f64,
        /// Largest step; the stencil halves it three times
        #[arg(long, default_value_t = 0.2)]
        window: f64,
        /// Use the chordal second-order kernel
        #[arg(long)]
        chordal: bool,
    },
    /// Full property catalog with a pass/fail matrix
    InvarianceSuite,
}

fn settings(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::from_env()?;
    if let Some(n) = common.modes {
        cfg.cutoff = n;
    }
    if let Some(m) = common.grid {
        cfg.grid = m;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = settings(&cli.common)?;
    let tol = cli.common.tol;
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    use commands as c;
    match cli.command {
        Command::Norm { input } => c::norm(&cfg, &input),
        Command::Hilbert { input } => c::hilbert(&cfg, &input),
        Command::Energy { input } => c::energy(&cfg, &input, tol),
        Command::PullbackMatrix { map } => c::pullback(&cfg, &map),
        Command::Period { map, matrix } => c::period(&cfg, map.as_deref(), matrix.as_deref()),
        Command::SiegelCheck { map, matrix } => {
            c::siegel_check(&cfg, map.as_deref(), matrix.as_deref(), tol)
        }
        Command::RauchCheck { m, eps } => c::rauch_check(&cfg, m, eps),
        Command::Equivariance { map } => c::equivariance(&cfg, &map, tol),
        Command::Integrability { map, matrix, input } => c::integrability(
            &cfg,
            map.as_deref(),
            matrix.as_deref(),
            input.as_deref(),
            tol,
        ),
        Command::QuantumHs { input } => c::quantum_hs(&cfg, &input),
        Command::Kernel {
            map,
            order,
            x,
            window,
            chordal,
        } => c::kernel(&cfg, &map, order, x, window, chordal, tol),
        Command::InvarianceSuite => c::invariance_suite(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hhp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
