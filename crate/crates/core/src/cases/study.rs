use std::fmt;
use std::str::FromStr;

use super::{run_vortex, VortexConfig, VortexRun};
use crate::error::{Error, Result};

/// Refinement direction of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    /// Mesh refinement at fixed step and degree.
    Spatial,
    /// Step refinement at fixed mesh, no subcycling.
    Temporal,
    /// Step refinement at fixed mesh with a fixed number of substeps.
    Subcycle,
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StudyKind::Spatial => "spatial",
            StudyKind::Temporal => "temporal",
            StudyKind::Subcycle => "subcycle",
        })
    }
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spatial" => Ok(StudyKind::Spatial),
            "temporal" => Ok(StudyKind::Temporal),
            "subcycle" => Ok(StudyKind::Subcycle),
            _ => Err(Error::Config(format!("unknown study `{s}`"))),
        }
    }
}

/// One run of a convergence study. Failed runs keep `NaN` errors and the message.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub dt: f64,
    pub n: usize,
    /// Substeps, 0 without subcycling.
    pub ns: usize,
    pub err_u: f64,
    pub err_v: f64,
    pub err_p: f64,
    pub iterations_v: f64,
    pub iterations_p: f64,
    pub seconds: f64,
    pub failure: Option<String>,
}

/// Error column of a [`ConvergenceRow`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorColumn {
    U,
    V,
    P,
}

impl ConvergenceRow {
    pub fn error(&self, c: ErrorColumn) -> f64 {
        match c {
            ErrorColumn::U => self.err_u,
            ErrorColumn::V => self.err_v,
            ErrorColumn::P => self.err_p,
        }
    }
}

/// Rows of one refinement sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub kind: StudyKind,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceRecord {
    /// Least-squares slope of `log err` against `log h` (spatial) or `log dt`
    /// over the rows with finite positive errors; `None` with fewer than two.
    pub fn slope(&self, c: ErrorColumn) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.error(c).is_finite() && r.error(c) > 0.0)
            .map(|r| {
                let x = if self.kind == StudyKind::Spatial {
                    r.h
                } else {
                    r.dt
                };
                (x.ln(), r.error(c).ln())
            })
            .collect();
        fit_slope(&pts)
    }
}

/// Least-squares slope through `(x, y)` points.
pub fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Refinement sequence around a base vortex configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub kind: StudyKind,
    pub base: VortexConfig,
    /// Cells per side for spatial studies.
    pub cells: Vec<usize>,
    /// Steps for temporal and subcycling studies.
    pub dts: Vec<f64>,
}

/// Row for one vortex run; a failed run keeps `NaN` errors and the message.
pub fn convergence_row(cfg: &VortexConfig, run: Result<VortexRun>) -> ConvergenceRow {
    let (_, dt) = cfg.steps();
    let mut r = ConvergenceRow {
        h: 1.0 / cfg.cells as f64,
        dt,
        n: cfg.degree,
        ns: cfg.subcycles.unwrap_or(0),
        err_u: f64::NAN,
        err_v: f64::NAN,
        err_p: f64::NAN,
        iterations_v: f64::NAN,
        iterations_p: f64::NAN,
        seconds: f64::NAN,
        failure: None,
    };
    match run {
        Ok(run) => {
            r.err_u = run.err_u;
            r.err_v = run.err_v;
            r.err_p = run.err_p;
            r.iterations_v = run.mean_velocity_iterations();
            r.iterations_p = run.mean_pressure_iterations();
            r.seconds = run.seconds;
        }
        Err(e) => r.failure = Some(e.to_string()),
    }
    r
}

/// Runs every member of the sequence; solver failures are recorded per row.
pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceRecord> {
    let mut variants = Vec::new();
    match cfg.kind {
        StudyKind::Spatial => {
            for &cells in &cfg.cells {
                variants.push(VortexConfig {
                    cells,
                    ..cfg.base.clone()
                });
            }
        }
        StudyKind::Temporal | StudyKind::Subcycle => {
            if cfg.kind == StudyKind::Subcycle && cfg.base.subcycles.is_none() {
                return Err(Error::Config(
                    "subcycling study needs a substep count".into(),
                ));
            }
            for &dt in &cfg.dts {
                let mut v = VortexConfig {
                    dt,
                    ..cfg.base.clone()
                };
                if cfg.kind == StudyKind::Temporal {
                    v.subcycles = None;
                }
                variants.push(v);
            }
        }
    }
    if variants.is_empty() {
        return Err(Error::Config(format!(
            "{} study has no refinement levels",
            cfg.kind
        )));
    }
    Ok(ConvergenceRecord {
        kind: cfg.kind,
        rows: variants
            .iter()
            .map(|v| convergence_row(v, run_vortex(v)))
            .collect(),
    })
}

/// Iteration counts and wall time for one substep count.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcycleRow {
    pub ns: usize,
    pub dt: f64,
    pub macro_steps: usize,
    pub mean_velocity_iterations: f64,
    pub mean_pressure_iterations: f64,
    pub advection_seconds: f64,
    pub velocity_seconds: f64,
    pub pressure_seconds: f64,
    pub update_seconds: f64,
    pub seconds: f64,
    /// Wall time of the first entry over this entry's.
    pub speedup: f64,
}

/// Runs the vortex with `dt = Ns * substep_dt` for every `Ns`, so the advection
/// substep is the same across the sweep.
pub fn run_subcycle_study(
    base: &VortexConfig,
    substep_dt: f64,
    ns: &[usize],
) -> Result<Vec<SubcycleRow>> {
    let mut rows: Vec<SubcycleRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(Error::Config("substep count must be >= 1".into()));
        }
        let cfg = VortexConfig {
            dt: substep_dt * n as f64,
            subcycles: Some(n),
            ..base.clone()
        };
        let run = run_vortex(&cfg)?;
        let sum = |f: fn(&crate::splitting::StepStats) -> f64| run.steps.iter().map(f).sum::<f64>();
        let seconds = sum(|s| s.total_seconds);
        rows.push(SubcycleRow {
            ns: n,
            dt: run.dt,
            macro_steps: run.steps.len(),
            mean_velocity_iterations: run.mean_velocity_iterations(),
            mean_pressure_iterations: run.mean_pressure_iterations(),
            advection_seconds: sum(|s| s.advection_seconds),
            velocity_seconds: sum(|s| s.velocity_seconds),
            pressure_seconds: sum(|s| s.pressure_seconds),
            update_seconds: sum(|s| s.update_seconds),
            seconds,
            speedup: rows.first().map_or(1.0, |r0| r0.seconds / seconds),
        });
    }
    Ok(rows)
}
