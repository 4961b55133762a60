use std::time::Instant;

use super::{
    lagrange_weights, lserk_step, pressure_extrapolation, scheme_coefficients, SchemeCoefficients,
};
use crate::dgops::{
    advection, boundary_lift, boundary_trace, dg_divergence, dg_gradient_with, mass_apply, BcSpec,
    Discretization, EllipticBc, EllipticData, EllipticKind, ScalarField, VectorField,
};
use crate::error::{Error, Result};
use crate::linsolve::{
    build_preconditioner, is_singular, pcg, BlockJacobi, MgConfig, PcgOptions, PrecondKind,
    Preconditioner, SipdgOperator, SolveStats,
};
use crate::mesh::{BoundaryTag, Mesh};

/// Semi-Lagrangian subcycling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcycleConfig {
    /// LSERK substeps per macro step.
    pub substeps: usize,
}

/// Parameters of the splitting scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct StepConfig {
    pub order: usize,
    /// Order `J` of the pressure increment `delta^J P`.
    pub pressure_order: usize,
    pub dt: f64,
    pub nu: f64,
    pub subcycling: Option<SubcycleConfig>,
    pub velocity_tol: f64,
    pub pressure_tol: f64,
    pub max_iter: usize,
    pub velocity_precond: PrecondKind,
    pub pressure_precond: PrecondKind,
    pub mg: MgConfig,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            order: 2,
            pressure_order: 1,
            dt: 1e-3,
            nu: 1e-2,
            subcycling: None,
            velocity_tol: 1e-8,
            pressure_tol: 1e-8,
            max_iter: 2000,
            velocity_precond: PrecondKind::Jacobi,
            pressure_precond: PrecondKind::PmgAmg,
            mg: MgConfig::default(),
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        scheme_coefficients(self.order)?;
        if self.pressure_order > 3 {
            return Err(Error::Config(format!(
                "pressure increment order must be at most 3, got {}",
                self.pressure_order
            )));
        }
        if !(self.dt > 0.0) || !(self.nu > 0.0) {
            return Err(Error::Config(format!(
                "time step and viscosity must be positive (dt = {}, nu = {})",
                self.dt, self.nu
            )));
        }
        if let Some(s) = self.subcycling {
            if s.substeps == 0 {
                return Err(Error::Config("substeps must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// Velocity levels kept in the history: `S`, plus one for the degree-`S`
    /// time interpolant of the subcycled advecting field.
    pub fn velocity_depth(&self) -> usize {
        self.order + usize::from(self.subcycling.is_some())
    }

    /// Time levels kept in the history.
    pub fn time_depth(&self) -> usize {
        self.velocity_depth().max(self.pressure_order).max(1)
    }
}

/// Velocity, pressure and their histories, newest first.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub step: usize,
    pub velocity: Vec<VectorField>,
    pub times: Vec<f64>,
    pub pressure: Vec<ScalarField>,
    /// `N(U^{n-i})`, kept only without subcycling.
    pub advection: Vec<VectorField>,
}

impl FlowState {
    pub fn new(t: f64, u: VectorField, p: ScalarField) -> Self {
        Self {
            t,
            step: 0,
            velocity: vec![u],
            times: vec![t],
            pressure: vec![p],
            advection: Vec::new(),
        }
    }

    pub fn u(&self) -> &VectorField {
        &self.velocity[0]
    }

    pub fn p(&self) -> &ScalarField {
        &self.pressure[0]
    }
}

/// Wall time and solver work of one macro step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepStats {
    pub order: usize,
    pub advection_seconds: f64,
    pub velocity_seconds: f64,
    pub pressure_seconds: f64,
    pub update_seconds: f64,
    pub total_seconds: f64,
    /// Velocity-solve iterations of the `u` and `v` components.
    pub velocity_iterations: [usize; 2],
    pub pressure_iterations: usize,
    pub advection_evaluations: usize,
}

impl StepStats {
    pub fn stage_seconds(&self) -> f64 {
        self.advection_seconds + self.velocity_seconds + self.pressure_seconds + self.update_seconds
    }
}

fn combine<'a>(weights: &[f64], fields: impl Iterator<Item = &'a VectorField>) -> VectorField {
    let mut out: Option<VectorField> = None;
    for (w, f) in weights.iter().zip(fields) {
        match out.as_mut() {
            None => {
                let mut g = f.clone();
                g.scale(*w);
                out = Some(g);
            }
            Some(o) => o.axpy(*w, f),
        }
    }
    out.expect("at least one field")
}

fn combine_scalar<'a>(
    k: usize,
    np: usize,
    weights: &[f64],
    fields: impl Iterator<Item = &'a ScalarField>,
) -> ScalarField {
    let mut out = ScalarField::zeros(k, np);
    for (w, f) in weights.iter().zip(fields) {
        out.axpy(*w, f);
    }
    out
}

/// `U_hat = sum beta_i U^{n-i} - dt sum alpha_i N(U^{n-i})`.
pub fn advect_extrapolate(
    velocity: &[VectorField],
    advection: &[VectorField],
    coeffs: &SchemeCoefficients,
    dt: f64,
) -> Result<VectorField> {
    let s = coeffs.order;
    if velocity.len() < s || advection.len() < s {
        return Err(Error::Config(format!(
            "order-{s} extrapolation needs {s} history levels, have {}",
            velocity.len().min(advection.len())
        )));
    }
    let mut out = combine(&coeffs.beta, velocity.iter());
    let n = combine(&coeffs.alpha, advection.iter());
    out.axpy(-dt, &n);
    Ok(out)
}

/// Integrates `dU/dt = -N(Ubar(t), U)` from `t_start` to `t_end` in `substeps`
/// LSERK steps; returns the final field and the number of advection evaluations.
#[allow(clippy::too_many_arguments)]
pub fn transport(
    ubar: impl Fn(f64) -> VectorField,
    u0: &VectorField,
    t_start: f64,
    t_end: f64,
    substeps: usize,
    bc: &BcSpec,
    disc: &Discretization,
) -> Result<(VectorField, usize)> {
    let mut u = u0.clone();
    let mut evals = 0;
    let h = (t_end - t_start) / substeps as f64;
    for m in 0..substeps {
        lserk_step(
            |y, tau| {
                evals += 1;
                let mut r = advection(&ubar(tau), y, tau, bc, &disc.geom, &disc.conn, &disc.re)?;
                r.scale(-1.0);
                Ok(r)
            },
            &mut u,
            t_start + m as f64 * h,
            h,
        )?;
    }
    Ok((u, evals))
}

/// Semi-Lagrangian advection stage: every history level `U^{n-i}`, `i < S`, is
/// transported from `t^{n-i}` to `t^{n+1}` in `(i+1) Ns` substeps, with the advecting
/// field the Lagrange interpolant through up to `S + 1` history levels; returns `sum beta_i U_i(t^{n+1})` and the
/// number of advection evaluations.
#[allow(clippy::too_many_arguments)]
pub fn subcycle_advect(
    velocity: &[VectorField],
    times: &[f64],
    coeffs: &SchemeCoefficients,
    dt: f64,
    substeps: usize,
    bc: &BcSpec,
    disc: &Discretization,
) -> Result<(VectorField, usize)> {
    let s = coeffs.order;
    if velocity.len() < s || times.len() < s || substeps == 0 {
        return Err(Error::Config(format!(
            "subcycling needs {s} history levels and >= 1 substep"
        )));
    }
    let t_new = times[0] + dt;
    let m = (s + 1).min(velocity.len()).min(times.len());
    let (hist_t, hist_u) = (&times[..m], &velocity[..m]);
    let ubar = |tau: f64| combine(&lagrange_weights(hist_t, tau), hist_u.iter());
    let mut evals = 0;
    let mut parts = Vec::with_capacity(s);
    for i in 0..s {
        let (ui, n) = transport(
            ubar,
            &hist_u[i],
            hist_t[i],
            t_new,
            (i + 1) * substeps,
            bc,
            disc,
        )?;
        evals += n;
        parts.push(ui);
    }
    Ok((combine(&coeffs.beta, parts.iter()), evals))
}

/// Largest stable substep `CFL min_e h_e / ((N+1)^2 |u|_max)`.
pub fn subcycle_dt(disc: &Discretization, u: &VectorField, cfl: f64) -> f64 {
    let umax =
        u.u.values
            .iter()
            .zip(&u.v.values)
            .fold(0.0f64, |m, (a, b)| m.max((a * a + b * b).sqrt()));
    let hmin = (0..disc.geom.k)
        .map(|e| disc.geom.h_min(e))
        .fold(f64::INFINITY, f64::min);
    let n1 = (disc.degree() + 1) as f64;
    cfl * hmin / (n1 * n1 * umax.max(f64::MIN_POSITIVE))
}

fn check_converged(st: &SolveStats) -> Result<()> {
    if st.converged {
        Ok(())
    } else {
        Err(Error::NotConverged {
            iterations: st.iterations,
            residual: st.relative_residual,
        })
    }
}

/// Advances a [`FlowState`] with the four-stage algebraic splitting scheme.
pub struct Stepper<'a> {
    pub mesh: &'a Mesh,
    pub disc: &'a Discretization,
    pub bc: BcSpec,
    pub config: StepConfig,
    pressure_pc: Box<dyn Preconditioner + Send + Sync + 'a>,
    pressure_singular: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(
        mesh: &'a Mesh,
        disc: &'a Discretization,
        bc: BcSpec,
        config: StepConfig,
    ) -> Result<Self> {
        config.validate()?;
        let pbc = EllipticBc::PRESSURE;
        let pressure_pc =
            build_preconditioner(config.pressure_precond, mesh, disc, 0.0, pbc, config.mg)?;
        Ok(Self {
            mesh,
            disc,
            pressure_singular: is_singular(disc, 0.0, pbc),
            bc,
            config,
            pressure_pc,
        })
    }

    fn zeros_v(&self) -> VectorField {
        VectorField::zeros(self.disc.geom.k, self.disc.re.np)
    }

    /// Outflow pressure data combined with the given time weights.
    fn pressure_trace(&self, weights: &[f64], times: &[f64]) -> Vec<f64> {
        boundary_trace(&self.disc.geom, &self.disc.conn, |_, x, y, _, _| {
            weights
                .iter()
                .zip(times)
                .map(|(w, &t)| w * self.bc.pressure(x, y, t))
                .sum()
        })
    }

    /// Solves `(-L + gamma/(nu dt)) U = U_hat/(nu dt) - G sigma P / nu` with velocity
    /// data at `t_new`; returns the solution and the iteration count per component.
    #[allow(clippy::too_many_arguments)]
    pub fn velocity_stage(
        &self,
        u_hat: &VectorField,
        grad_sigma_p: &VectorField,
        gamma: f64,
        t_new: f64,
        guess: &VectorField,
    ) -> Result<(VectorField, [usize; 2])> {
        let (dt, nu) = (self.config.dt, self.config.nu);
        let d = self.disc;
        let lambda = gamma / (nu * dt);
        let bc = EllipticBc::VELOCITY;
        let op = SipdgOperator::new(&d.re, &d.geom, &d.conn, lambda, bc);
        let pc: Box<dyn Preconditioner + Send + Sync> = match self.config.velocity_precond {
            PrecondKind::Jacobi => Box::new(BlockJacobi::new(&d.re, &d.geom, lambda)),
            kind => build_preconditioner(kind, self.mesh, d, lambda, bc, self.config.mg)?,
        };
        let mut out = self.zeros_v();
        let mut iterations = [0; 2];
        for c in 0..2 {
            let comp = |f: &'_ VectorField| if c == 0 { f.u.clone() } else { f.v.clone() };
            let mut rhs = comp(u_hat);
            rhs.scale(1.0 / (nu * dt));
            rhs.axpy(-1.0 / nu, &comp(grad_sigma_p));
            let mut b = mass_apply(&rhs, &d.geom, &d.re)?;
            let data = EllipticData {
                value: boundary_trace(&d.geom, &d.conn, |tag, x, y, _, _| {
                    if tag.is_velocity_dirichlet() {
                        let g = self.bc.velocity(tag, x, y, t_new);
                        if c == 0 {
                            g.0
                        } else {
                            g.1
                        }
                    } else {
                        0.0
                    }
                }),
                flux: boundary_trace(&d.geom, &d.conn, |tag, x, y, nx, ny| {
                    match (&self.bc.outflow_gradient, tag) {
                        (Some(g), BoundaryTag::NeumannOutflow) => {
                            let gr = g(x, y, t_new)[c];
                            nx * gr[0] + ny * gr[1]
                        }
                        _ => 0.0,
                    }
                }),
            };
            let lift = boundary_lift(&data, bc, &d.geom, &d.conn, &d.re)?;
            b.axpy(-1.0, &lift);
            let mut x = comp(guess).values;
            let opts = PcgOptions {
                tol: self.config.velocity_tol,
                max_iter: self.config.max_iter,
                project_mean: false,
            };
            let st = pcg(&op, pc.as_ref(), &b.values, &mut x, opts)?;
            check_converged(&st)?;
            iterations[c] = st.iterations;
            let target = if c == 0 { &mut out.u } else { &mut out.v };
            target.values = x;
        }
        Ok((out, iterations))
    }

    /// Solves `-L dP = -(gamma/dt) D.U_hathat` with Dirichlet data `dirichlet` (per
    /// trace) on outflow faces and homogeneous Neumann data elsewhere.
    pub fn pressure_stage(
        &self,
        u_hh: &VectorField,
        gamma: f64,
        t_new: f64,
        dirichlet: &[f64],
    ) -> Result<(ScalarField, SolveStats)> {
        let d = self.disc;
        let bc = EllipticBc::PRESSURE;
        let mut div = dg_divergence(u_hh, t_new, &self.bc, &d.geom, &d.conn, &d.re)?;
        div.scale(-gamma / self.config.dt);
        let mut b = mass_apply(&div, &d.geom, &d.re)?;
        let data = EllipticData {
            value: dirichlet.to_vec(),
            flux: vec![0.0; dirichlet.len()],
        };
        let lift = boundary_lift(&data, bc, &d.geom, &d.conn, &d.re)?;
        b.axpy(-1.0, &lift);
        let op = SipdgOperator::new(&d.re, &d.geom, &d.conn, 0.0, bc);
        let mut x = vec![0.0; b.len()];
        let opts = PcgOptions {
            tol: self.config.pressure_tol,
            max_iter: self.config.max_iter,
            project_mean: self.pressure_singular,
        };
        let st = pcg(&op, self.pressure_pc.as_ref(), &b.values, &mut x, opts)?;
        check_converged(&st)?;
        Ok((ScalarField::from_values(d.geom.k, d.re.np, x)?, st))
    }

    /// `U^{n+1} = U_hathat - (dt/gamma) G dP`, `P^{n+1} = dP + sigma P`.
    pub fn update_stage(
        &self,
        u_hh: &VectorField,
        delta_p: &ScalarField,
        dirichlet: &[f64],
        sigma_p: &ScalarField,
        gamma: f64,
    ) -> Result<(VectorField, ScalarField)> {
        let d = self.disc;
        let g = dg_gradient_with(delta_p, dirichlet, &d.geom, &d.conn, &d.re)?;
        let mut u = u_hh.clone();
        u.axpy(-self.config.dt / gamma, &g);
        let mut p = sigma_p.clone();
        p.axpy(1.0, delta_p);
        Ok((u, p))
    }

    /// Advances `state` by one macro step.
    pub fn step(&self, state: &mut FlowState) -> Result<StepStats> {
        let start = Instant::now();
        let cfg = &self.config;
        let d = self.disc;
        let (k, np) = (d.geom.k, d.re.np);
        let s = cfg.order.min(state.velocity.len());
        let coeffs = scheme_coefficients(s)?;
        let gamma = coeffs.gamma;
        let dt = cfg.dt;
        let t_new = state.t + dt;
        let mut stats = StepStats {
            order: s,
            ..Default::default()
        };

        let t0 = Instant::now();
        let u_hat = match cfg.subcycling {
            None => {
                let n0 = advection(
                    state.u(),
                    state.u(),
                    state.t,
                    &self.bc,
                    &d.geom,
                    &d.conn,
                    &d.re,
                )?;
                stats.advection_evaluations = 1;
                state.advection.insert(0, n0);
                state.advection.truncate(cfg.order);
                advect_extrapolate(&state.velocity, &state.advection, &coeffs, dt)?
            }
            Some(sc) => {
                let (u, n) = subcycle_advect(
                    &state.velocity,
                    &state.times,
                    &coeffs,
                    dt,
                    sc.substeps,
                    &self.bc,
                    d,
                )?;
                stats.advection_evaluations = n;
                u
            }
        };
        stats.advection_seconds = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let j = cfg.pressure_order.min(state.pressure.len());
        let sigma_w = pressure_extrapolation(j);
        let sigma_p = combine_scalar(k, np, &sigma_w, state.pressure.iter());
        let sigma_trace = self.pressure_trace(&sigma_w, &state.times);
        let grad_sigma = dg_gradient_with(&sigma_p, &sigma_trace, &d.geom, &d.conn, &d.re)?;
        let (u_hh, vit) = self.velocity_stage(&u_hat, &grad_sigma, gamma, t_new, state.u())?;
        stats.velocity_iterations = vit;
        stats.velocity_seconds = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let new_trace = self.pressure_trace(&[1.0], &[t_new]);
        let incr: Vec<f64> = new_trace
            .iter()
            .zip(&sigma_trace)
            .map(|(a, b)| a - b)
            .collect();
        let incr = self.restrict_to_outflow(incr);
        let (delta_p, pst) = self.pressure_stage(&u_hh, gamma, t_new, &incr)?;
        stats.pressure_iterations = pst.iterations;
        stats.pressure_seconds = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let (u_new, p_new) = self.update_stage(&u_hh, &delta_p, &incr, &sigma_p, gamma)?;
        state.velocity.insert(0, u_new);
        state.velocity.truncate(cfg.velocity_depth());
        state.times.insert(0, t_new);
        state.times.truncate(cfg.time_depth());
        state.pressure.insert(0, p_new);
        state.pressure.truncate(cfg.pressure_order.max(1));
        state.t = t_new;
        state.step += 1;
        stats.update_seconds = t0.elapsed().as_secs_f64();
        stats.total_seconds = start.elapsed().as_secs_f64();
        Ok(stats)
    }

    fn restrict_to_outflow(&self, mut v: Vec<f64>) -> Vec<f64> {
        let d = self.disc;
        for e in 0..d.geom.k {
            for f in 0..3 {
                let keep = matches!(
                    d.conn.bc[3 * e + f].map(|t| EllipticBc::PRESSURE.kind(t)),
                    Some(EllipticKind::Dirichlet)
                );
                if !keep {
                    for jn in 0..d.conn.nfp {
                        v[d.conn.trace(e, f, jn)] = 0.0;
                    }
                }
            }
        }
        v
    }
}
