//! Benchmark drivers: the Taylor vortex with convergence and subcycling studies,
//! flow past a square cylinder with Strouhal extraction, error norms and CSV output.

mod csv;
mod cylinder;
mod norms;
mod study;
mod vortex;

pub use csv::{
    emit_csv, errors_csv, iterations_csv, parse_errors_csv, probe_csv, snapshot_csv, subcycle_csv,
    timings_csv, ERRORS_HEADER, ITERS_HEADER, SNAPSHOT_HEADER, SUBCYCLE_HEADER, TIMINGS_HEADER,
};
pub use cylinder::{
    cylinder_mesh, graded_lines, run_cylinder, run_inflow, strouhal, CylinderConfig, CylinderRun,
    StrouhalEstimate, CYLINDER_DOMAIN, MIN_CYCLES,
};
pub use norms::{l2_error, ErrorNorm, Probe};
pub use study::{
    convergence_row, fit_slope, run_convergence, run_subcycle_study, ConvergenceConfig,
    ConvergenceRecord, ConvergenceRow, ErrorColumn, StudyKind, SubcycleRow,
};
pub use vortex::{
    run_vortex, taylor_exact, vortex_initial_state, vortex_mesh, ExactSolution, VortexConfig,
    VortexRun, VORTEX_TAGS,
};
