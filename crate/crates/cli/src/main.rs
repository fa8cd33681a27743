mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Experiment driver for point-average-moment (Active Flux) schemes.
#[derive(Debug, Parser)]
#[command(name = "pampa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a 1D periodic simulation and write per-step diagnostics.
    Run1d(Run1dArgs),
    /// Run the quadratic triangle solver and write per-step diagnostics.
    Run2d(Run2dArgs),
    /// Error norms and observed orders under mesh refinement.
    Convergence(ConvergenceArgs),
    /// Summation-by-parts residuals of the element and global operators.
    SbpCheck(SbpCheckArgs),
    /// Exact element matrices (1D) or centroid weight tables (triangles).
    BasisCheck(BasisCheckArgs),
    /// Random trials of the bound-preserving average update.
    BpCheck(BpCheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FluxArg {
    Advection,
    Burgers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum IcArg {
    Cosine,
    Gaussian,
    #[value(alias = "jiangshu")]
    JiangShu,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ProjectionArg {
    Central,
    Upwind,
    LengthWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BpArg {
    Off,
    Point,
    PointAndAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CaseArg {
    Translation,
    Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VariantArg {
    Quadratic,
    Cubic,
    CubicMoment,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Problem1d {
    #[arg(long, value_enum, default_value = "advection")]
    flux: FluxArg,
    /// Advection speed.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, value_enum, default_value = "cosine")]
    ic: IcArg,
    /// Gaussian width parameter in `exp(-alpha x^2)`.
    #[arg(long, default_value_t = 100.0)]
    alpha: f64,
    /// Value of the constant profile.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    value: f64,
    /// Domain ends; default [0, 1] for the cosine and constant, [-1, 1] otherwise.
    #[arg(long, allow_negative_numbers = true)]
    x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x_max: Option<f64>,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, value_enum, default_value = "central")]
    projection: ProjectionArg,
    #[arg(long, value_enum, default_value = "off")]
    bp: BpArg,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Run1dArgs {
    #[command(flatten)]
    problem: Problem1d,
    #[arg(long, default_value_t = 100)]
    cells: usize,
    /// Random displacement of interior nodes, as a fraction of the cell width.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Diagnostics CSV; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the final point values and cell averages here.
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Problem2d {
    #[arg(long, value_enum, default_value = "translation")]
    case: CaseArg,
    #[arg(long)]
    t_end: Option<f64>,
    /// Fraction of the admissible time step.
    #[arg(long, default_value_t = 1.0)]
    dt_fraction: f64,
    /// Random displacement of interior vertices (structured meshes only).
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Run2dArgs {
    #[command(flatten)]
    problem: Problem2d,
    /// Cells per direction of the structured mesh.
    #[arg(long, default_value_t = 40)]
    cells: usize,
    /// Triangle mesh file ("NV NT", vertices, counterclockwise triangles).
    #[arg(long, conflicts_with = "jitter")]
    mesh: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the final point values and cell averages here.
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ConvergenceArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: u8,
    #[command(flatten)]
    problem: Problem1d,
    /// 2D case.
    #[arg(long, value_enum, default_value = "translation")]
    case: CaseArg,
    #[arg(long, default_value_t = 1.0)]
    dt_fraction: f64,
    /// Comma-separated cell counts; at least three levels.
    #[arg(long, value_delimiter = ',')]
    cells: Option<Vec<usize>>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SbpCheckArgs {
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Cell counts for the global periodic operator (order 2 only).
    #[arg(long, value_delimiter = ',', default_value = "8,9")]
    cells: Vec<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct BasisCheckArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: u8,
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Triangle element; defaults to quadratic for order 2, cubic-moment for order 3.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Total integral of the moment weights, as an integer or fraction.
    #[arg(long, default_value = "1")]
    moment_total: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct BpCheckArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: u8,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // help and version go to stdout and are not errors
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pampa: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
