use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "oscillab", version, about = "Oscillation checks for linear ODE systems φ' = A(t)φ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample A, B_k, C and ν_k on a grid as CSV.
    Reduce(ReduceArgs),
    /// Integrate the system and write the trajectory and its zero crossings.
    Simulate(SimulateArgs),
    /// Run one decision procedure and print its verdict as JSON.
    Check(CheckArgs),
    /// Label the system by simulating a bundle of solutions.
    Classify(ClassifyArgs),
    /// Run every applicable check plus the classifier in one document.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// System definition (JSON, or TOML by extension).
    #[arg(long, short)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Grid start; defaults to t0.
    #[arg(long)]
    pub t_start: Option<f64>,
    /// Grid end; defaults to t0 + 10.
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Initial vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub init: Vec<f64>,
    #[arg(long)]
    pub t_end: f64,
    /// Components (1-based) whose zero crossings are recorded; defaults to all.
    #[arg(long, value_delimiter = ',')]
    pub events: Vec<usize>,
    /// Trajectory CSV.
    #[arg(long, short, default_value = "traj.csv")]
    pub output: PathBuf,
    /// Zero-crossing CSV; defaults to zeros.csv next to the trajectory.
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// Resample on this many uniform points instead of the step points.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub tol: OdeArgs,
}

#[derive(Debug, Args, Clone)]
pub struct OdeArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Absolute tolerance, relative to the solution norm.
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    /// Sign patterns of B_k plus the π integral (n >= 3).
    Suboscillation,
    /// B_k ≡ 0 plus two diverging weighted integrals (n >= 3).
    Oscillation,
    /// Cooperative systems: lower bound and stability necessary conditions.
    Nonoscillation,
    /// Planar system: two diverging weighted integrals.
    PlanarOscillation,
    /// Planar system: weighted integral over --interval reaches π.
    PlanarInterval,
    /// Comparison of two scalar Riccati equations given by --first/--second.
    Comparison,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub check: CheckName,
    /// System definition; not used by `comparison`.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Search or test window `a,b`; defaults to [t0, t0 + 50].
    #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
    pub window: Vec<f64>,
    /// Start points of the suboscillation search.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub starts: Vec<f64>,
    /// Interval `a b` of the planar interval check.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub interval: Vec<f64>,
    /// Positive initial vector `x1,...,xn` for the nonoscillation bound;
    /// repeatable.
    #[arg(long = "init")]
    pub inits: Vec<String>,
    /// Divergence ladder as offsets from t0.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Vec<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// `B_k ≡ 0` tolerance relative to the coefficient scale.
    #[arg(long)]
    pub sup_tol: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    /// `f,g,h` of the first Riccati equation `y' = −(f y² + g y + h)`.
    #[arg(long, value_delimiter = ',')]
    pub first: Vec<String>,
    /// `f,g,h` of the second Riccati equation.
    #[arg(long, value_delimiter = ',')]
    pub second: Vec<String>,
    /// Initial value of the second equation's solution.
    #[arg(long, allow_negative_numbers = true)]
    pub y2_init: Option<f64>,
    /// Initial value of the first equation's solution; at least --y2-init.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma0: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 100.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 5)]
    pub min_zeros: usize,
    /// Number of initial vectors: the canonical basis, then seeded random ones.
    #[arg(long, default_value_t = 8)]
    pub bundle: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Window for ratio validation, sign tests and the suboscillation search.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub window: Vec<f64>,
    #[arg(long, default_value_t = 100.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 5)]
    pub min_zeros: usize,
    #[arg(long, default_value_t = 8)]
    pub bundle: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}
