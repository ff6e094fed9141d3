//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

/// Initial state of the Fig.-4 runs: ξ = (1,0,0), η = (0,0,1).
pub const POLARIZED_INIT: &str = "1,0,0,0,0,0,0,0,0,0,0,1";

#[derive(Debug, Parser)]
#[command(
    name = "spinor-tunnel",
    version,
    about = "Tunnelling dynamics of a spin-1 condensate in a symmetric double well"
)]
pub struct Cli {
    /// Flat key=value file supplying flag values (explicit flags win).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the coupled spinor equations.
    Simulate(SimulateArgs),
    /// Integrate the reduced (M, R0, I0) system directly.
    Reduced(ReducedArgs),
    /// Analytic period and regime, or a period measured from a CSV file.
    Period(PeriodArgs),
    /// Analytic vs measured periods over a set of tunnelling strengths.
    Scan(ScanArgs),
    /// Phase portrait (unwrapped theta, M) of a run or a CSV file.
    Portrait(PortraitArgs),
    /// Double-well mode functions and two-mode parameters.
    Modes(ModesArgs),
    /// Stationary state search from a seed.
    Stationary(StationaryArgs),
    /// Write one of the five preset figure datasets.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PhysArgs {
    /// Tunnelling coefficient J.
    #[arg(long)]
    pub j: f64,
    /// On-site energy of both wells.
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long)]
    pub eps_left: Option<f64>,
    #[arg(long)]
    pub eps_right: Option<f64>,
    /// Spin-independent interaction of both wells.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_s: f64,
    #[arg(long)]
    pub lambda_s_left: Option<f64>,
    #[arg(long)]
    pub lambda_s_right: Option<f64>,
    /// Spin-dependent interaction of both wells (negative: ferromagnetic).
    #[arg(long, default_value_t = -0.01)]
    pub lambda_a: f64,
    #[arg(long)]
    pub lambda_a_left: Option<f64>,
    #[arg(long)]
    pub lambda_a_right: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct InitArgs {
    /// Twelve comma-separated reals: re/im of xi+, xi0, xi-, eta+, eta0, eta-.
    #[arg(long, default_value = POLARIZED_INIT, allow_hyphen_values = true)]
    pub init: String,
}

#[derive(Debug, Clone, Args)]
pub struct IntegArgs {
    /// Final time.
    #[arg(long, default_value_t = 1000.0)]
    pub tmax: f64,
    /// Output sampling interval.
    #[arg(long, default_value_t = 0.5)]
    pub sample_dt: f64,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub dt_init: Option<f64>,
    #[arg(long)]
    pub dt_min: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file, `-` for standard output.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write an SVG line chart.
    #[arg(long, value_name = "SVG")]
    pub plot: Option<PathBuf>,
    /// Columns drawn by --plot.
    #[arg(long, value_delimiter = ',', default_value = "M_left")]
    pub plot_columns: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
    #[command(flatten)]
    pub init: InitArgs,
    #[command(flatten)]
    pub integ: IntegArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ReducedArgs {
    #[arg(long)]
    pub j: f64,
    #[arg(long, default_value_t = -0.01)]
    pub lambda_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub r0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub i0: f64,
    #[command(flatten)]
    pub integ: IntegArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum PeriodMethodArg {
    #[default]
    Extrema,
    Autocorrelation,
}

#[derive(Debug, Args)]
pub struct PeriodArgs {
    /// Tunnelling coefficient for the analytic period.
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long, default_value_t = -0.01)]
    pub lambda_a: f64,
    /// Trajectory CSV to measure instead of (or besides) the analytic value.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Column measured from --input.
    #[arg(long, default_value = "M_left")]
    pub column: String,
    #[arg(long, value_enum, default_value_t = PeriodMethodArg::Extrema)]
    pub method: PeriodMethodArg,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Explicit tunnelling strengths.
    #[arg(long, value_delimiter = ',')]
    pub j: Vec<f64>,
    /// Evenly spaced J from --j-min to --j-max.
    #[arg(long)]
    pub j_min: Option<f64>,
    #[arg(long)]
    pub j_max: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub j_steps: usize,
    #[arg(long, default_value_t = -0.01)]
    pub lambda_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_s: f64,
    /// Integration length in analytic periods.
    #[arg(long, default_value_t = 4.5)]
    pub periods: f64,
    #[arg(long, default_value_t = 2000)]
    pub samples_per_period: usize,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PortraitArgs {
    /// Read the trajectory from a CSV instead of integrating.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_s: f64,
    #[arg(long, default_value_t = -0.01)]
    pub lambda_a: f64,
    #[command(flatten)]
    pub init: InitArgs,
    #[command(flatten)]
    pub integ: IntegArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    /// Quartic barrier height.
    #[arg(long, default_value_t = 10.0)]
    pub v0: f64,
    /// Quartic well half-separation.
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    /// Two-column (x, V) table replacing the quartic shape.
    #[arg(long)]
    pub potential_file: Option<PathBuf>,
    #[arg(long, default_value_t = -6.0)]
    pub x_min: f64,
    #[arg(long, default_value_t = 6.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 1024)]
    pub points: usize,
    /// Effective 1D spin-independent coupling.
    #[arg(long, default_value_t = 0.0)]
    pub c_s: f64,
    /// Effective 1D spin-dependent coupling.
    #[arg(long, default_value_t = 0.0)]
    pub c_a: f64,
    /// Tabulate |J| over these barrier heights instead of writing mode functions.
    #[arg(long, value_delimiter = ',')]
    pub v0_scan: Vec<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct StationaryArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
    #[command(flatten)]
    pub init: InitArgs,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    /// Optional one-row data file with the converged state.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure number, 1 to 5.
    #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
    pub number: u8,
    /// Output directory (default: figN).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write SVG charts next to the data files.
    #[arg(long)]
    pub plot: bool,
}
