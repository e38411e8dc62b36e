//! Command-line front end: configure runs, execute sweeps, emit
//! diagnostics and certificates, and run validation studies.
//!
//! Exit codes are part of the public contract:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 1    | check failed (e.g. convergence order low) |
//! | 2    | configuration error                       |
//! | 3    | light-cone violation                      |
//! | 4    | field overflow (blow-up detected)         |
//! | 5    | certificate failure                       |
//! | 6    | malformed input file                      |

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use logwave::Error;

#[derive(Parser)]
#[command(
    name = "logwave",
    about = "Radial solver and inequality certifier for the defocusing wave equation \
             with a logarithmically supercritical nonlinearity",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand: a config file plus key overrides.
/// Precedence: flag > LOGWAVE_OUTPUT_DIR (output directory only) > config
/// file > built-in default.
#[derive(Args, Clone, Debug, Default)]
struct ConfigArgs {
    /// TOML run configuration (defaults apply when omitted).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override data.amplitude (bump and standing-wave profiles).
    #[arg(long)]
    amplitude: Option<f64>,

    /// Override data.width (bump profiles).
    #[arg(long)]
    width: Option<f64>,

    /// Override data.support_radius (gaussian bump).
    #[arg(long)]
    support_radius: Option<f64>,

    /// Override grid.n.
    #[arg(long)]
    n: Option<usize>,

    /// Override grid.r_max.
    #[arg(long)]
    r_max: Option<f64>,

    /// Override solve.t_final.
    #[arg(long)]
    t_final: Option<f64>,

    /// Override solve.cfl.
    #[arg(long)]
    cfl: Option<f64>,

    /// Override solve.record_stride.
    #[arg(long)]
    record_stride: Option<usize>,

    /// Override nonlinearity.sigma (+1 defocusing, -1 focusing).
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<i32>,

    /// Override certifier.eps0.
    #[arg(long)]
    eps0: Option<f64>,

    /// Override certifier.c0.
    #[arg(long)]
    c0: Option<f64>,

    /// Override certifier.kappa.
    #[arg(long)]
    kappa: Option<f64>,

    /// Override certifier.kappa_b.
    #[arg(long)]
    kappa_b: Option<f64>,

    /// Override certifier.cbound_margin.
    #[arg(long)]
    cbound_margin: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one configuration and write trajectory, diagnostics and summary.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run one configuration per value of a swept parameter and tabulate.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Which knob to sweep.
        #[arg(long, value_parser = ["amplitude", "n", "cfl", "sigma"])]
        parameter: String,
        /// Comma-separated values, e.g. --values 0.5,1,2.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Re-read a trajectory dump, recompute diagnostics and certify it.
    Certify {
        /// Trajectory dump written by `run`.
        dump: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Refinement study: observed convergence order over doubling grids.
    Convergence {
        #[command(flatten)]
        config: ConfigArgs,
        /// Number of refinement levels (n, 2n, 4n, …).
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::UnsupportedData(_) => 2,
        Error::ConeViolation(_) => 3,
        Error::Overflow { .. } => 4,
        Error::Resolution(_) | Error::Degenerate(_) | Error::CertificateMismatch(_) => 5,
        Error::Format(_) => 6,
        Error::WindowOutOfRange(_) | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config } => commands::run(&config),
        Command::Sweep {
            config,
            parameter,
            values,
        } => commands::sweep(&config, &parameter, &values),
        Command::Certify { dump, config } => commands::certify(&dump, &config),
        Command::Convergence { config, levels } => commands::convergence(&config, levels),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
