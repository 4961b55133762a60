use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use insdg::cases::StudyKind;
use insdg::linsolve::PrecondKind;
use insdg::perfmodel::MIN_TRIALS;

#[derive(Debug, Parser)]
#[command(
    name = "insdg",
    version,
    about = "High-order DG incompressible Navier-Stokes benchmark harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One simulation: the Taylor vortex on an N x N grid (`--mesh N`), or flow
    /// from rest with uniform inflow on a mesh file (`--mesh FILE`).
    Run(SolverArgs),
    /// Taylor-vortex refinement study.
    Convergence(ConvergenceArgs),
    /// Flow past the square cylinder with Strouhal extraction.
    Cylinder(SolverArgs),
    /// Roofline bounds and measured throughput of the elemental kernels.
    Roofline(RooflineArgs),
}

/// Settings shared by the simulation commands; flags override `--config` keys.
#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// Key-value configuration file (`key = value` lines, `#` comments).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cells per side of the structured vortex grid, or a mesh file.
    #[arg(long)]
    pub mesh: Option<String>,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Macro time step.
    #[arg(long, conflicts_with = "cfl")]
    pub dt: Option<f64>,
    /// Choose the macro step so each advection substep meets this CFL number.
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Advection substeps per macro step; 0 disables subcycling.
    #[arg(long)]
    pub subcycles: Option<usize>,
    #[arg(long)]
    pub final_time: Option<f64>,
    /// Pressure preconditioner: none, jacobi, amg or pmg-amg.
    #[arg(long)]
    pub precond: Option<PrecondKind>,
    /// Relative residual tolerance of both PCG solves.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    /// spatial, temporal or subcycle.
    pub kind: StudyKind,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Cells per side of each spatial refinement level.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32])]
    pub cells: Vec<usize>,
    /// Macro steps of each temporal or subcycling refinement level.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 5e-3, 2.5e-3, 1.25e-3])]
    pub dts: Vec<f64>,
    /// Substep counts for an iteration and speedup sweep at a fixed substep
    /// (`--dt` is the substep); written to `subcycle.csv`.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RooflineArgs {
    /// Hardware descriptor file; defaults to the host estimate.
    #[arg(long)]
    pub hardware: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4, 5])]
    pub degrees: Vec<usize>,
    /// Cells per side of the benchmark grid.
    #[arg(long, default_value_t = 16)]
    pub cells: usize,
    #[arg(long, default_value_t = MIN_TRIALS)]
    pub trials: usize,
    /// Use this copy bandwidth in GB/s instead of measuring it.
    #[arg(long)]
    pub copy_bandwidth: Option<f64>,
    /// Copy buffer size for the bandwidth measurement.
    #[arg(long, default_value_t = 256)]
    pub copy_mib: usize,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}
