use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use super::l2_error;
use crate::config::KeyValues;
use crate::dgops::{
    advection, BcSpec, Discretization, GradientFn, PressureFn, ScalarField, VectorField,
};
use crate::error::{Error, Result};
use crate::linsolve::PrecondKind;
use crate::mesh::{BoundaryTag, Mesh};
use crate::splitting::{FlowState, StepConfig, StepStats, Stepper, SubcycleConfig};

/// Analytic velocity, pressure and velocity gradient.
#[derive(Clone)]
pub struct ExactSolution {
    pub nu: f64,
    pub u: PressureFn,
    pub v: PressureFn,
    pub p: PressureFn,
    pub grad: GradientFn,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactSolution")
            .field("nu", &self.nu)
            .finish_non_exhaustive()
    }
}

impl ExactSolution {
    /// Exact velocity on inflow faces, exact pressure and viscous flux on outflow faces.
    pub fn bc_spec(&self) -> BcSpec {
        let (u, v) = (self.u.clone(), self.v.clone());
        BcSpec {
            inflow: Arc::new(move |x, y, t| (u(x, y, t), v(x, y, t))),
            outflow_pressure: self.p.clone(),
            outflow_gradient: Some(self.grad.clone()),
        }
    }

    pub fn velocity(&self, disc: &Discretization, t: f64) -> VectorField {
        VectorField::interpolate(&disc.geom, |x, y| ((self.u)(x, y, t), (self.v)(x, y, t)))
    }

    pub fn pressure(&self, disc: &Discretization, t: f64) -> ScalarField {
        ScalarField::interpolate(&disc.geom, |x, y| (self.p)(x, y, t))
    }
}

/// Decaying Taylor vortex
/// `u = (-sin(2 pi y), sin(2 pi x)) e^{-4 pi^2 nu t}`,
/// `p = -cos(2 pi x) cos(2 pi y) e^{-8 pi^2 nu t}`.
pub fn taylor_exact(nu: f64) -> Result<ExactSolution> {
    if !(nu > 0.0) {
        return Err(Error::Config(format!(
            "viscosity must be positive, got {nu}"
        )));
    }
    let k = 2.0 * PI;
    let decay = move |t: f64| (-nu * 4.0 * PI * PI * t).exp();
    Ok(ExactSolution {
        nu,
        u: Arc::new(move |_, y, t| -(k * y).sin() * decay(t)),
        v: Arc::new(move |x, _, t| (k * x).sin() * decay(t)),
        p: Arc::new(move |x, y, t| -(k * x).cos() * (k * y).cos() * decay(t) * decay(t)),
        grad: Arc::new(move |x, y, t| {
            let a = k * decay(t);
            [[0.0, -a * (k * y).cos()], [a * (k * x).cos(), 0.0]]
        }),
    })
}

/// Boundary kinds of the vortex square: outflow on the right, inflow elsewhere.
pub const VORTEX_TAGS: [BoundaryTag; 4] = [
    BoundaryTag::DirichletInflow,
    BoundaryTag::NeumannOutflow,
    BoundaryTag::DirichletInflow,
    BoundaryTag::DirichletInflow,
];

/// Structured `cells x cells` mesh of `[-0.5, 0.5]^2` with [`VORTEX_TAGS`].
pub fn vortex_mesh(cells: usize) -> Result<Mesh> {
    Mesh::generate_structured(cells, cells, [-0.5, 0.5, -0.5, 0.5], VORTEX_TAGS)
}

/// One Taylor-vortex run.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexConfig {
    pub degree: usize,
    /// Cells per side; the mesh has `2 cells^2` triangles.
    pub cells: usize,
    pub nu: f64,
    pub final_time: f64,
    /// Target step; rounded so that an integer number of steps reaches `final_time`.
    pub dt: f64,
    pub order: usize,
    pub pressure_order: usize,
    pub subcycles: Option<usize>,
    pub velocity_precond: PrecondKind,
    pub pressure_precond: PrecondKind,
    pub tol: f64,
    pub max_iter: usize,
    /// Start from exact history levels instead of the lower-order startup ramp.
    pub exact_history: bool,
}

impl Default for VortexConfig {
    fn default() -> Self {
        Self {
            degree: 3,
            cells: 4,
            nu: 0.01,
            final_time: 0.5,
            dt: 1e-2,
            order: 2,
            pressure_order: 1,
            subcycles: None,
            velocity_precond: PrecondKind::Jacobi,
            pressure_precond: PrecondKind::PmgAmg,
            tol: 1e-10,
            max_iter: 5000,
            exact_history: true,
        }
    }
}

impl VortexConfig {
    /// Overrides fields from `degree`, `cells`, `nu`, `final_time`, `dt`, `order`,
    /// `pressure_order`, `subcycles`, `velocity_precond`, `precond`, `tol`,
    /// `max_iter` and `exact_history` keys.
    pub fn apply(&mut self, kv: &KeyValues) -> Result<()> {
        kv.check_keys(&[
            "degree",
            "cells",
            "nu",
            "final_time",
            "dt",
            "order",
            "pressure_order",
            "velocity_precond",
            "precond",
            "tol",
            "max_iter",
            "exact_history",
            "subcycles",
        ])?;
        macro_rules! set {
            ($field:ident, $key:literal) => {
                if let Some(v) = kv.get($key)? {
                    self.$field = v;
                }
            };
        }
        set!(degree, "degree");
        set!(cells, "cells");
        set!(nu, "nu");
        set!(final_time, "final_time");
        set!(dt, "dt");
        set!(order, "order");
        set!(pressure_order, "pressure_order");
        set!(velocity_precond, "velocity_precond");
        set!(pressure_precond, "precond");
        set!(tol, "tol");
        set!(max_iter, "max_iter");
        set!(exact_history, "exact_history");
        if let Some(ns) = kv.get::<usize>("subcycles")? {
            self.subcycles = (ns > 0).then_some(ns);
        }
        Ok(())
    }

    /// Number of macro steps and the step that reaches `final_time` exactly.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.final_time / self.dt).round().max(1.0) as usize;
        (n, self.final_time / n as f64)
    }

    pub fn step_config(&self) -> StepConfig {
        StepConfig {
            order: self.order,
            pressure_order: self.pressure_order,
            dt: self.steps().1,
            nu: self.nu,
            subcycling: self.subcycles.map(|substeps| SubcycleConfig { substeps }),
            velocity_tol: self.tol,
            pressure_tol: self.tol,
            max_iter: self.max_iter,
            velocity_precond: self.velocity_precond,
            pressure_precond: self.pressure_precond,
            ..Default::default()
        }
    }
}

/// Final errors and per-step statistics of a vortex run.
#[derive(Debug, Clone)]
pub struct VortexRun {
    pub h: f64,
    pub dt: f64,
    pub err_u: f64,
    pub err_v: f64,
    pub err_p: f64,
    pub steps: Vec<StepStats>,
    pub times: Vec<f64>,
    pub seconds: f64,
    /// Final velocity and pressure.
    pub velocity: VectorField,
    pub pressure: ScalarField,
}

impl VortexRun {
    pub fn mean_velocity_iterations(&self) -> f64 {
        mean(
            self.steps
                .iter()
                .map(|s| (s.velocity_iterations[0] + s.velocity_iterations[1]) as f64 / 2.0),
        )
    }

    pub fn mean_pressure_iterations(&self) -> f64 {
        mean(self.steps.iter().map(|s| s.pressure_iterations as f64))
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Initial state at `t = 0`, with exact levels at `-i dt` when requested.
pub fn vortex_initial_state(
    exact: &ExactSolution,
    disc: &Discretization,
    cfg: &StepConfig,
    exact_history: bool,
    bc: &BcSpec,
) -> Result<FlowState> {
    let mut state = FlowState::new(0.0, exact.velocity(disc, 0.0), exact.pressure(disc, 0.0));
    if exact_history {
        for i in 1..cfg.time_depth() {
            let t = -(i as f64) * cfg.dt;
            if i < cfg.velocity_depth() {
                let u = exact.velocity(disc, t);
                if cfg.subcycling.is_none() {
                    state
                        .advection
                        .push(advection(&u, &u, t, bc, &disc.geom, &disc.conn, &disc.re)?);
                }
                state.velocity.push(u);
            }
            if i < cfg.pressure_order {
                state.pressure.push(exact.pressure(disc, t));
            }
            state.times.push(t);
        }
    }
    Ok(state)
}

/// Advances the Taylor vortex to `final_time` and measures the relative L2 errors.
pub fn run_vortex(cfg: &VortexConfig) -> Result<VortexRun> {
    let start = Instant::now();
    let exact = taylor_exact(cfg.nu)?;
    let mesh = vortex_mesh(cfg.cells)?;
    let disc = Discretization::new(&mesh, cfg.degree)?;
    let bc = exact.bc_spec();
    let step_cfg = cfg.step_config();
    let (n_steps, dt) = cfg.steps();
    let stepper = Stepper::new(&mesh, &disc, bc.clone(), step_cfg.clone())?;
    let mut state = vortex_initial_state(&exact, &disc, &step_cfg, cfg.exact_history, &bc)?;
    let mut steps = Vec::with_capacity(n_steps);
    let mut times = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        steps.push(stepper.step(&mut state)?);
        times.push(state.t);
    }
    let t = state.t;
    let u = state.u();
    Ok(VortexRun {
        h: 1.0 / cfg.cells as f64,
        dt,
        err_u: l2_error(&u.u, |x, y| (exact.u)(x, y, t), &disc)?.value,
        err_v: l2_error(&u.v, |x, y| (exact.v)(x, y, t), &disc)?.value,
        err_p: l2_error(state.p(), |x, y| (exact.p)(x, y, t), &disc)?.value,
        steps,
        times,
        seconds: start.elapsed().as_secs_f64(),
        velocity: u.clone(),
        pressure: state.p().clone(),
    })
}
