use std::time::Instant;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::Probe;
use crate::config::KeyValues;
use crate::dgops::{BcSpec, Discretization, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::linsolve::PrecondKind;
use crate::mesh::{BoundaryTag, Mesh};
use crate::splitting::{FlowState, StepConfig, StepStats, Stepper, SubcycleConfig};

/// Channel extent `[x0, x1] x [y0, y1]` around the unit square cylinder at the origin.
pub const CYLINDER_DOMAIN: [f64; 4] = [-16.0, 25.0, -22.0, 22.0];

/// Coordinate lines on `[a, b]`: uniform spacing `h` on `[c0, c1]` (which must
/// contain the cylinder edges at +-1/2 as lines), growing geometrically by `growth`
/// towards both ends.
pub fn graded_lines(a: f64, b: f64, c0: f64, c1: f64, h: f64, growth: f64) -> Result<Vec<f64>> {
    if !(a < c0 && c0 <= -0.5 && 0.5 <= c1 && c1 < b && h > 0.0 && growth >= 1.0) {
        return Err(Error::Config(format!(
            "bad grading: [{a}, {b}] core [{c0}, {c1}] h {h} growth {growth}"
        )));
    }
    let m = (1.0 / h).round();
    if (m * h - 1.0).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "core spacing {h} must divide the cylinder width"
        )));
    }
    let below = ((-0.5 - c0) / h).round() as usize;
    let above = ((c1 - 0.5) / h).round() as usize;
    let mut core: Vec<f64> = (0..=(below + m as usize + above))
        .map(|i| -0.5 - below as f64 * h + i as f64 * h)
        .collect();
    let grow = |from: f64, to: f64| -> Vec<f64> {
        let dir = (to - from).signum();
        let mut out = Vec::new();
        let (mut x, mut dx) = (from, h * growth);
        while (to - x) * dir > 1.5 * dx {
            x += dir * dx;
            out.push(x);
            dx *= growth;
        }
        out.push(to);
        out
    };
    let first = core[0];
    let last = *core.last().expect("non-empty core");
    let mut lines: Vec<f64> = grow(first, a).into_iter().rev().collect();
    lines.append(&mut core);
    lines.extend(grow(last, b));
    Ok(lines)
}

/// Square-cylinder channel: inflow on the left, top and bottom, outflow on the
/// right, no-slip walls on the cylinder.
pub fn cylinder_mesh(h: f64, growth: f64) -> Result<Mesh> {
    let [x0, x1, y0, y1] = CYLINDER_DOMAIN;
    let xs = graded_lines(x0, x1, -2.0, 8.0, h, growth)?;
    let ys = graded_lines(y0, y1, -2.0, 2.0, h, growth)?;
    let inside = |i: usize, j: usize| {
        let (xc, yc) = (0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
        xc.abs() < 0.5 && yc.abs() < 0.5
    };
    Mesh::tensor_grid(
        &xs,
        &ys,
        [
            BoundaryTag::DirichletInflow,
            BoundaryTag::NeumannOutflow,
            BoundaryTag::DirichletInflow,
            BoundaryTag::DirichletInflow,
        ],
        |i, j| !inside(i, j),
    )
}

/// Dominant frequency of a probe signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrouhalEstimate {
    /// `f D / U` with `D = U = 1`.
    pub strouhal: f64,
    /// Periods of the dominant frequency in the analysed window.
    pub cycles: f64,
    /// At least five cycles and a non-flat signal.
    pub reliable: bool,
}

/// Minimum number of cycles in the analysed window for a reliable estimate.
pub const MIN_CYCLES: f64 = 5.0;

/// Peak of the Hann-windowed discrete Fourier transform of the second half of a
/// uniformly sampled `signal`, refined by a parabola through the peak bin and its
/// neighbours. The transform is zero-padded to eight times the window length.
pub fn strouhal(times: &[f64], signal: &[f64]) -> Result<StrouhalEstimate> {
    if times.len() != signal.len() {
        return Err(Error::Shape {
            expected: times.len(),
            got: signal.len(),
        });
    }
    let start = times.len() / 2;
    let (t, s) = (&times[start..], &signal[start..]);
    let n = t.len();
    if n < 8 {
        return Err(Error::Config(format!(
            "signal tail of {n} samples is too short"
        )));
    }
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    if !(dt > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return Err(Error::Config(
            "probe signal must be uniformly sampled".into(),
        ));
    }
    let mean = s.iter().sum::<f64>() / n as f64;
    let spread = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>().sqrt() / (n as f64).sqrt();
    let len = 8 * n.next_power_of_two();
    let mut buf: Vec<Complex<f64>> = s
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos();
            Complex::new(w * (v - mean), 0.0)
        })
        .collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mag: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm()).collect();
    let k = (1..mag.len() - 1)
        .max_by(|&a, &b| mag[a].total_cmp(&mag[b]))
        .expect("spectrum has interior bins");
    let (l, c, r) = (mag[k - 1], mag[k], mag[k + 1]);
    let denom = l - 2.0 * c + r;
    let shift = if denom.abs() > 0.0 {
        0.5 * (l - r) / denom
    } else {
        0.0
    };
    let freq = (k as f64 + shift) / (len as f64 * dt);
    let cycles = freq * (t[n - 1] - t[0]);
    let flat = spread <= 1e-10 * mean.abs().max(1.0);
    Ok(StrouhalEstimate {
        strouhal: freq,
        cycles,
        reliable: !flat && cycles >= MIN_CYCLES,
    })
}

/// Flow past the square cylinder.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderConfig {
    pub degree: usize,
    /// Spacing of the uniform core around the cylinder.
    pub core_spacing: f64,
    pub growth: f64,
    pub nu: f64,
    pub inflow_speed: f64,
    pub dt: f64,
    pub final_time: f64,
    pub order: usize,
    pub subcycles: Option<usize>,
    pub probe: (f64, f64),
    pub velocity_precond: PrecondKind,
    pub pressure_precond: PrecondKind,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CylinderConfig {
    fn default() -> Self {
        Self {
            degree: 4,
            core_spacing: 0.5,
            growth: 1.3,
            nu: 0.01,
            inflow_speed: 1.0,
            dt: 5e-3,
            final_time: 150.0,
            order: 2,
            subcycles: None,
            probe: (2.5, 0.5),
            velocity_precond: PrecondKind::Jacobi,
            pressure_precond: PrecondKind::PmgAmg,
            tol: 1e-8,
            max_iter: 5000,
        }
    }
}

impl CylinderConfig {
    /// Overrides fields from `degree`, `core_spacing`, `growth`, `nu`,
    /// `inflow_speed`, `dt`, `final_time`, `order`, `subcycles`, `probe_x`,
    /// `probe_y`, `velocity_precond`, `precond`, `tol` and `max_iter` keys.
    pub fn apply(&mut self, kv: &KeyValues) -> Result<()> {
        kv.check_keys(&[
            "degree",
            "core_spacing",
            "growth",
            "nu",
            "inflow_speed",
            "dt",
            "final_time",
            "order",
            "probe_x",
            "probe_y",
            "velocity_precond",
            "precond",
            "tol",
            "max_iter",
            "subcycles",
        ])?;
        macro_rules! set {
            ($field:expr, $key:literal) => {
                if let Some(v) = kv.get($key)? {
                    $field = v;
                }
            };
        }
        set!(self.degree, "degree");
        set!(self.core_spacing, "core_spacing");
        set!(self.growth, "growth");
        set!(self.nu, "nu");
        set!(self.inflow_speed, "inflow_speed");
        set!(self.dt, "dt");
        set!(self.final_time, "final_time");
        set!(self.order, "order");
        set!(self.probe.0, "probe_x");
        set!(self.probe.1, "probe_y");
        set!(self.velocity_precond, "velocity_precond");
        set!(self.pressure_precond, "precond");
        set!(self.tol, "tol");
        set!(self.max_iter, "max_iter");
        if let Some(ns) = kv.get::<usize>("subcycles")? {
            self.subcycles = (ns > 0).then_some(ns);
        }
        Ok(())
    }
}

/// Probe history, shedding frequency and per-step statistics.
#[derive(Debug, Clone)]
pub struct CylinderRun {
    pub elements: usize,
    pub times: Vec<f64>,
    /// Probe velocity `(u, v)` after each step.
    pub probe: Vec<(f64, f64)>,
    /// From the transverse probe velocity.
    pub strouhal: Option<StrouhalEstimate>,
    pub steps: Vec<StepStats>,
    pub seconds: f64,
    /// Final velocity and pressure.
    pub velocity: VectorField,
    pub pressure: ScalarField,
}

/// Flow past the square cylinder on the graded mesh of `cfg`.
pub fn run_cylinder(cfg: &CylinderConfig) -> Result<CylinderRun> {
    run_inflow(&cylinder_mesh(cfg.core_spacing, cfg.growth)?, cfg)
}

/// Impulsively started flow from rest with uniform inflow `(inflow_speed, 0)` on
/// `mesh`; records the probe velocity every step. The probe must lie in the mesh.
pub fn run_inflow(mesh: &Mesh, cfg: &CylinderConfig) -> Result<CylinderRun> {
    let start = Instant::now();
    let disc = Discretization::new(mesh, cfg.degree)?;
    let probe = Probe::new(mesh, &disc, cfg.probe.0, cfg.probe.1)?;
    let n_steps = (cfg.final_time / cfg.dt).round().max(1.0) as usize;
    let step_cfg = StepConfig {
        order: cfg.order,
        dt: cfg.final_time / n_steps as f64,
        nu: cfg.nu,
        subcycling: cfg.subcycles.map(|substeps| SubcycleConfig { substeps }),
        velocity_tol: cfg.tol,
        pressure_tol: cfg.tol,
        max_iter: cfg.max_iter,
        velocity_precond: cfg.velocity_precond,
        pressure_precond: cfg.pressure_precond,
        ..Default::default()
    };
    let stepper = Stepper::new(
        mesh,
        &disc,
        BcSpec::uniform_inflow(cfg.inflow_speed, 0.0),
        step_cfg,
    )?;
    let (k, np) = (disc.geom.k, disc.re.np);
    let mut state = FlowState::new(0.0, VectorField::zeros(k, np), ScalarField::zeros(k, np));
    let mut run = CylinderRun {
        elements: k,
        times: Vec::with_capacity(n_steps),
        probe: Vec::with_capacity(n_steps),
        strouhal: None,
        steps: Vec::with_capacity(n_steps),
        seconds: 0.0,
        velocity: VectorField::zeros(k, np),
        pressure: ScalarField::zeros(k, np),
    };
    for _ in 0..n_steps {
        run.steps.push(stepper.step(&mut state)?);
        run.times.push(state.t);
        run.probe
            .push((probe.eval(&state.u().u), probe.eval(&state.u().v)));
    }
    let v: Vec<f64> = run.probe.iter().map(|p| p.1).collect();
    run.strouhal = strouhal(&run.times, &v).ok();
    run.velocity = state.u().clone();
    run.pressure = state.p().clone();
    run.seconds = start.elapsed().as_secs_f64();
    Ok(run)
}
