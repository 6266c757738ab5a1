//! Command-line interface definition.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discrep_core::{DiscrepancyConfig, NoiseDirection, SolverMode};

#[derive(Parser, Debug)]
#[command(
    name = "discrep",
    version,
    about = "Tikhonov regularization with a gap-certified discrepancy principle",
    long_about = "Solves ill-posed linear operator equations Au = f from noisy data f_delta \
                  by Tikhonov regularization. The regularization parameter epsilon is chosen \
                  so that the residual of a (possibly approximate, gap-certified) minimizer \
                  matches C*delta."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one noisy instance and report epsilon, the discrepancy, and errors.
    Solve(SolveArgs),
    /// Run a delta-sweep convergence experiment and write a CSV.
    Sweep(SweepArgs),
    /// List gallery problem families with conditioning diagnostics.
    Gallery(GalleryArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ProblemSelect {
    /// Problem family: diagonal | hilbert | blur.
    #[arg(long)]
    pub problem: String,
    /// Problem size n.
    #[arg(long)]
    pub n: usize,
    /// Spectrum decay exponent (diagonal family only).
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Gaussian kernel width (blur family only).
    #[arg(long, default_value_t = 0.05)]
    pub s: f64,
}

#[derive(Args, Debug, Clone)]
pub struct PrincipleOpts {
    /// Discrepancy constant C (> 1).
    #[arg(long = "C", default_value_t = 1.5)]
    pub c: f64,
    /// Gap constant b (> 0, with C^2 > 1 + b).
    #[arg(long = "b", default_value_t = 0.5)]
    pub b: f64,
    /// Minimizer: "exact" (SVD filter factors) or "cg" (certified approximate).
    #[arg(long, value_enum, default_value_t = SolverArg::Exact)]
    pub solver: SolverArg,
    /// Relative width of the accepted band |h - C*delta| <= tol * C*delta.
    #[arg(long = "root-tol", default_value_t = 1e-6)]
    pub root_tol: f64,
}

impl PrincipleOpts {
    pub fn to_config(&self) -> DiscrepancyConfig {
        DiscrepancyConfig {
            c: self.c,
            b: self.b,
            root_rel_tol: self.root_tol,
            solver_mode: self.solver.into(),
            ..DiscrepancyConfig::default()
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverArg {
    Exact,
    Cg,
}

impl From<SolverArg> for SolverMode {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Exact => SolverMode::Exact,
            SolverArg::Cg => SolverMode::CertifiedApprox,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyArg {
    /// Seeded standard normal direction, normalized to unit length.
    Random,
    /// Left singular vector of the smallest singular value.
    Worst,
    /// First coordinate basis vector.
    Axis,
}

impl From<PolicyArg> for NoiseDirection {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Random => NoiseDirection::RandomUnit,
            PolicyArg::Worst => NoiseDirection::WorstCaseSmallestSingular,
            PolicyArg::Axis => NoiseDirection::Axis,
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemSelect,
    /// Noise level delta (> 0).
    #[arg(long)]
    pub delta: f64,
    #[command(flatten)]
    pub opts: PrincipleOpts,
    /// Noise direction policy.
    #[arg(long, value_enum, default_value_t = PolicyArg::Random)]
    pub policy: PolicyArg,
    /// Seed for the noise direction.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemSelect,
    /// Strictly decreasing comma-separated noise levels, e.g. 1e-1,1e-2,1e-3.
    #[arg(long = "delta-list", value_delimiter = ',', required = true)]
    pub delta_list: Vec<f64>,
    /// Independent noise draws per delta.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[command(flatten)]
    pub opts: PrincipleOpts,
    /// Noise direction policy.
    #[arg(long, value_enum, default_value_t = PolicyArg::Random)]
    pub policy: PolicyArg,
    /// Base seed; each (delta, trial) derives its own seed from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Record per-trial wall time in the wall_ms column. Off by default so
    /// that identical invocations produce byte-identical CSV output.
    #[arg(long, default_value_t = false)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct GalleryArgs {
    /// Restrict the listing to one family and print its diagnostics.
    #[arg(long)]
    pub problem: Option<String>,
    /// Size for the diagnostics (default: a family-specific sample size).
    #[arg(long)]
    pub n: Option<usize>,
    /// Spectrum decay exponent (diagonal family only).
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Gaussian kernel width (blur family only).
    #[arg(long, default_value_t = 0.05)]
    pub s: f64,
}
