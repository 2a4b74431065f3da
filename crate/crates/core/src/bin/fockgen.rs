use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fockgen::cli::{self, Format, Method, OptimizeArgs, OptimizeMode, SchemeArgs, SweepArgs};

#[derive(Parser)]
#[command(
    name = "fockgen",
    version,
    about = "Compile and evaluate photon-addition state preparation schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Scheme {
    /// Target JSON file: {"coeffs": [[re, im], ...]} or {"phase_state": {"z": [re, im], "N": n}}
    target: PathBuf,
    /// Beam-splitter transmittance modulus |T|
    #[arg(long = "T")]
    abs_t: f64,
    /// Transmittance phase in radians
    #[arg(long = "T-phase", default_value_t = 0.0, allow_hyphen_values = true)]
    t_phase: f64,
    /// Stage order as 1-based indices into the canonically sorted roots
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a target into roots and displacement parameters
    Plan(Scheme),
    /// Success probability, closed form and/or simulated
    Prob {
        #[command(flatten)]
        scheme: Scheme,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    /// CSV of success probability against |T|
    Sweep {
        target: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        min: f64,
        #[arg(long, default_value_t = 0.999)]
        max: f64,
        #[arg(long, default_value_t = 0.001)]
        step: f64,
        #[arg(long = "T-phase", default_value_t = 0.0, allow_hyphen_values = true)]
        t_phase: f64,
    },
    /// Optimize the common transmittance, per-stage transmittances, or the root order
    Optimize {
        target: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// |T| for the common-mode baseline and for order search
        #[arg(long = "T", default_value_t = 0.99)]
        abs_t: f64,
        #[arg(long, default_value_t = 0.05)]
        lo: f64,
        #[arg(long, default_value_t = 0.9999)]
        hi: f64,
        /// Coordinate-ascent sweeps for stagewise mode
        #[arg(long, default_value_t = 6)]
        iters: usize,
        /// Exhaustive order search up to this many stages, hill climbing beyond
        #[arg(long, default_value_t = 8)]
        order_limit: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Simulate,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Common,
    Stagewise,
    Order,
}

impl Scheme {
    fn split(self) -> (PathBuf, SchemeArgs, Format) {
        let format = match self.format {
            FormatArg::Table => Format::Table,
            FormatArg::Json => Format::Json,
        };
        (
            self.target,
            SchemeArgs {
                abs_t: self.abs_t,
                t_phase: self.t_phase,
                order: self.order,
            },
            format,
        )
    }
}

fn run(command: Command) -> Result<cli::Output, cli::CliError> {
    match command {
        Command::Plan(scheme) => {
            let (path, args, format) = scheme.split();
            cli::cmd_plan(&cli::load_target(&path)?, &args, format)
        }
        Command::Prob { scheme, method } => {
            let (path, args, format) = scheme.split();
            let method = match method {
                MethodArg::Analytic => Method::Analytic,
                MethodArg::Simulate => Method::Simulate,
                MethodArg::Both => Method::Both,
            };
            cli::cmd_prob(&cli::load_target(&path)?, &args, method, format)
        }
        Command::Sweep {
            target,
            min,
            max,
            step,
            t_phase,
        } => cli::cmd_sweep(
            &cli::load_target(&target)?,
            &SweepArgs {
                min,
                max,
                step,
                t_phase,
            },
        ),
        Command::Optimize {
            target,
            mode,
            abs_t,
            lo,
            hi,
            iters,
            order_limit,
        } => {
            let mode = match mode {
                ModeArg::Common => OptimizeMode::Common,
                ModeArg::Stagewise => OptimizeMode::Stagewise,
                ModeArg::Order => OptimizeMode::Order,
            };
            let args = OptimizeArgs {
                mode,
                abs_t,
                bracket: (lo, hi),
                iters,
                order_limit,
            };
            cli::cmd_optimize(&cli::load_target(&target)?, &args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
