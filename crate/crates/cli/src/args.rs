use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

/// Size/shape reduction of the planar equal-mass three-body problem:
/// simulations, measure contours and the exact constant-measure elimination.
#[derive(Debug, Parser)]
#[command(name = "saari", version)]
pub struct Cli {
    /// TOML file with default values for any option; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output directory (default: $SAARI_OUT_DIR, else the current directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the reduced equations and write trajectory CSV and JSON.
    Simulate(SimulateArgs),
    /// Trace level sets of the configurational measure.
    Contour(ContourArgs),
    /// Run the exact elimination pipeline.
    VerifyProof(ProofArgs),
    /// List the central configurations and search for others.
    CentralConfigs(CentralArgs),
    /// Check the normalized positions Q_k along a trajectory.
    QkCheck(QkArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    /// Rigidly rotating equilateral triangle.
    LagrangeRotating,
    /// Seeded perturbation of the rotating equilateral triangle.
    NearLagrange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Rk4,
    Dopri5,
}

#[derive(Debug, Default, Args)]
pub struct OrbitArgs {
    /// Potential exponent alpha (U = sum r^-alpha).
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Named initial data.
    #[arg(long, value_enum, conflicts_with = "initial_state")]
    pub fixture: Option<Fixture>,

    /// TOML file with the initial state.
    #[arg(long, value_name = "FILE")]
    pub initial_state: Option<PathBuf>,

    /// Side length of the fixture triangle.
    #[arg(long)]
    pub side: Option<f64>,

    /// Seed for the near-lagrange fixture.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Integrate to this physical time.
    #[arg(long, conflicts_with = "s_end")]
    pub t_end: Option<f64>,

    /// Integrate to this shape time instead.
    #[arg(long)]
    pub s_end: Option<f64>,

    /// Sampling interval of the output.
    #[arg(long)]
    pub output_interval: Option<f64>,

    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,

    #[arg(long)]
    pub abs_tol: Option<f64>,

    #[arg(long)]
    pub rel_tol: Option<f64>,

    /// Largest step (the fixed step for rk4).
    #[arg(long)]
    pub max_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub orbit: OrbitArgs,

    /// Also integrate the Cartesian equations and compare.
    #[arg(long)]
    pub check_oracle: bool,

    /// Base name of the output files.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct ContourArgs {
    /// Comma-separated levels mu0.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,

    #[arg(long)]
    pub alpha: Option<f64>,

    /// Trace levels at or below the minimum of mu anyway.
    #[arg(long)]
    pub force: bool,

    /// Largest tracing step.
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ProofArgs {
    /// Stop after this stage.
    #[arg(long)]
    pub stage: Option<String>,

    /// Worker threads for the interpolation stage.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Leave stage timings out of the report (for byte-identical output).
    #[arg(long)]
    pub omit_timings: bool,
}

#[derive(Debug, Args)]
pub struct CentralArgs {
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Half width of the square searched for critical points.
    #[arg(long)]
    pub half_width: Option<f64>,

    /// Grid cells per side for the search.
    #[arg(long)]
    pub cells: Option<usize>,
}

#[derive(Debug, Args)]
pub struct QkArgs {
    #[command(flatten)]
    pub orbit: OrbitArgs,

    /// Initial orientation theta(0) used for Q_k.
    #[arg(long)]
    pub theta0: Option<f64>,
}
