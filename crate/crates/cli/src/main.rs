mod commands;
mod exit;
mod inputs;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use exit::code;

/// Green-function kernels, interpolation and norm checks.
#[derive(Parser, Debug)]
#[command(name = "greenkern", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize the Green function of L = P*ᵀP on a grid.
    Green(GreenArgs),
    /// Describe a kernel and tabulate it at given points.
    KernelShow(KernelShowArgs),
    /// Fit a minimum-norm interpolant to CSV data.
    Fit(FitArgs),
    /// Evaluate a fitted model at query points.
    Eval(EvalArgs),
    /// Run a named check suite and emit its JSON report.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct GridOpts {
    /// Half-width R of the grid box [−R, R)^d.
    #[arg(long)]
    extent: Option<f64>,
    /// Points per axis (even).
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct GreenArgs {
    /// Vector operator as inline JSON or a path to a JSON file.
    #[arg(long)]
    operator: String,
    #[command(flatten)]
    grid: GridOpts,
    /// Where to write the kernel container.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KernelShowArgs {
    /// Kernel spec as inline JSON or a path.
    #[arg(long, conflicts_with = "kernel_file", required_unless_present = "kernel_file")]
    kernel: Option<String>,
    /// Grid kernel written by `green`.
    #[arg(long)]
    kernel_file: Option<PathBuf>,
    /// Point to evaluate at, comma separated; repeatable.
    #[arg(long = "at", value_delimiter = ';')]
    at: Vec<String>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// CSV with d coordinate columns then one value column.
    #[arg(long)]
    data: PathBuf,
    /// Kernel spec as inline JSON or a path.
    #[arg(long, conflicts_with = "kernel_file", required_unless_present = "kernel_file")]
    kernel: Option<String>,
    /// Grid kernel written by `green`.
    #[arg(long)]
    kernel_file: Option<PathBuf>,
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
    /// Adds ε to the Gram diagonal; interpolation then holds only approximately.
    #[arg(long)]
    jitter: Option<f64>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// CSV of query points; a trailing value column is ignored.
    #[arg(long)]
    query: PathBuf,
    /// Predictions CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// pd | equivalence | gaussian-limit | min-norm | catalog-consistency
    #[arg(long)]
    check: String,
    /// Suite config as inline JSON or a path.
    #[arg(long)]
    config: Option<String>,
    /// Overrides the config's seed (default 7).
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { code::USAGE } else { code::OK } as u8);
        }
    };
    let result = match cli.command {
        Command::Green(a) => commands::green(&a.operator, a.grid.extent, a.grid.points, a.out.as_deref()),
        Command::KernelShow(a) => {
            commands::kernel_show(a.kernel.as_deref(), a.kernel_file.as_deref(), &a.at)
        }
        Command::Fit(a) => commands::fit(
            &a.data,
            a.kernel.as_deref(),
            a.kernel_file.as_deref(),
            &a.out,
            a.jitter,
        ),
        Command::Eval(a) => commands::eval(&a.model, &a.query, a.out.as_deref()),
        Command::Validate(a) => {
            commands::validate(&a.check, a.config.as_deref(), a.seed, a.out.as_deref())
        }
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
