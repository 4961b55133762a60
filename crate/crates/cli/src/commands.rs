use std::path::{Path, PathBuf};

use insdg::cases::{
    convergence_row, cylinder_mesh, emit_csv, errors_csv, iterations_csv, probe_csv,
    run_convergence, run_inflow, run_subcycle_study, run_vortex, snapshot_csv, subcycle_csv,
    taylor_exact, timings_csv, vortex_mesh, ConvergenceConfig, ConvergenceRecord, CylinderConfig,
    CylinderRun, StudyKind, VortexConfig,
};
use insdg::config::KeyValues;
use insdg::dgops::{Discretization, VectorField};
use insdg::mesh::{load_mesh, Mesh};
use insdg::perfmodel::{
    benchmark_kernels, measure_copy_bandwidth, HardwareDescriptor, RooflineReport,
};
use insdg::splitting::subcycle_dt;

use crate::args::{ConvergenceArgs, RooflineArgs, SolverArgs};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

enum MeshChoice {
    Cells(usize),
    File(PathBuf),
}

fn mesh_choice(arg: &Option<String>) -> Option<MeshChoice> {
    arg.as_ref().map(|m| match m.parse::<usize>() {
        Ok(n) => MeshChoice::Cells(n),
        Err(_) => MeshChoice::File(PathBuf::from(m)),
    })
}

fn read_mesh(path: &Path) -> Result<Mesh> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(load_mesh(&text)?)
}

fn key_values(args: &SolverArgs) -> Result<KeyValues> {
    match &args.config {
        Some(path) => Ok(KeyValues::read(path)?),
        None => Ok(KeyValues::default()),
    }
}

/// Macro step whose advection substeps meet `cfl` for the velocity `u`.
fn cfl_step(disc: &Discretization, u: &VectorField, cfl: f64, subcycles: Option<usize>) -> f64 {
    subcycle_dt(disc, u, cfl) * subcycles.unwrap_or(1) as f64
}

fn vortex_config(args: &SolverArgs) -> Result<VortexConfig> {
    let mut cfg = VortexConfig::default();
    cfg.apply(&key_values(args)?)?;
    match mesh_choice(&args.mesh) {
        Some(MeshChoice::Cells(n)) => cfg.cells = n,
        Some(MeshChoice::File(p)) => {
            return Err(CliError::Usage(format!(
                "the vortex study uses structured grids; `--mesh` must be a cell count, got {}",
                p.display()
            )))
        }
        None => {}
    }
    if let Some(v) = args.degree {
        cfg.degree = v;
    }
    if let Some(v) = args.subcycles {
        cfg.subcycles = (v > 0).then_some(v);
    }
    if let Some(v) = args.final_time {
        cfg.final_time = v;
    }
    if let Some(v) = args.precond {
        cfg.pressure_precond = v;
    }
    if let Some(v) = args.tol {
        cfg.tol = v;
    }
    if let Some(v) = args.nu {
        cfg.nu = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(cfl) = args.cfl {
        let disc = Discretization::new(&vortex_mesh(cfg.cells)?, cfg.degree)?;
        let u0 = taylor_exact(cfg.nu)?.velocity(&disc, 0.0);
        cfg.dt = cfl_step(&disc, &u0, cfl, cfg.subcycles);
    }
    Ok(cfg)
}

fn inflow_config(args: &SolverArgs) -> Result<CylinderConfig> {
    let mut cfg = CylinderConfig::default();
    cfg.apply(&key_values(args)?)?;
    if let Some(v) = args.degree {
        cfg.degree = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = args.subcycles {
        cfg.subcycles = (v > 0).then_some(v);
    }
    if let Some(v) = args.final_time {
        cfg.final_time = v;
    }
    if let Some(v) = args.precond {
        cfg.pressure_precond = v;
    }
    if let Some(v) = args.tol {
        cfg.tol = v;
    }
    if let Some(v) = args.nu {
        cfg.nu = v;
    }
    Ok(cfg)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    emit_csv(&dir.join(name), contents)?;
    Ok(())
}

fn run_on_mesh(
    mesh: &Mesh,
    args: &SolverArgs,
) -> Result<(CylinderConfig, CylinderRun, Discretization)> {
    let mut cfg = inflow_config(args)?;
    let disc = Discretization::new(mesh, cfg.degree)?;
    if let Some(cfl) = args.cfl {
        let u = VectorField::interpolate(&disc.geom, |_, _| (cfg.inflow_speed, 0.0));
        cfg.dt = cfl_step(&disc, &u, cfl, cfg.subcycles);
    }
    let run = run_inflow(mesh, &cfg)?;
    Ok((cfg, run, disc))
}

fn write_inflow_outputs(dir: &Path, run: &CylinderRun, disc: &Discretization) -> Result<()> {
    write(dir, "iters.csv", &iterations_csv(&run.steps, &run.times))?;
    write(dir, "timings.csv", &timings_csv(&run.steps))?;
    write(dir, "probe.csv", &probe_csv(&run.times, &run.probe))?;
    write(
        dir,
        "snapshot.csv",
        &snapshot_csv(&disc.geom, &run.velocity, &run.pressure),
    )
}

pub fn run(args: &SolverArgs) -> Result<()> {
    if let Some(MeshChoice::File(path)) = mesh_choice(&args.mesh) {
        let mesh = read_mesh(&path)?;
        let (cfg, run, disc) = run_on_mesh(&mesh, args)?;
        write_inflow_outputs(&args.out_dir, &run, &disc)?;
        let (u, v) = run.probe.last().copied().unwrap_or_default();
        println!(
            "{} elements, N = {}, {} steps to t = {}: probe ({}, {}) u = {u:.6e} v = {v:.6e} ({:.2} s)",
            run.elements,
            cfg.degree,
            run.steps.len(),
            run.times.last().copied().unwrap_or(0.0),
            cfg.probe.0,
            cfg.probe.1,
            run.seconds
        );
        return Ok(());
    }
    let cfg = vortex_config(args)?;
    let result = run_vortex(&cfg)?;
    let dir = &args.out_dir;
    write(
        dir,
        "iters.csv",
        &iterations_csv(&result.steps, &result.times),
    )?;
    write(dir, "timings.csv", &timings_csv(&result.steps))?;
    let disc = Discretization::new(&vortex_mesh(cfg.cells)?, cfg.degree)?;
    write(
        dir,
        "snapshot.csv",
        &snapshot_csv(&disc.geom, &result.velocity, &result.pressure),
    )?;
    println!(
        "Taylor vortex N = {}, {} x {} cells, dt = {:e}, T = {}: err_u = {:.4e} err_v = {:.4e} err_p = {:.4e} ({:.2} s)",
        cfg.degree, cfg.cells, cfg.cells, result.dt, cfg.final_time, result.err_u, result.err_v, result.err_p, result.seconds
    );
    let record = ConvergenceRecord {
        kind: StudyKind::Temporal,
        rows: vec![convergence_row(&cfg, Ok(result))],
    };
    write(dir, "errors.csv", &errors_csv(&record))
}

pub fn convergence(args: &ConvergenceArgs) -> Result<()> {
    let base = vortex_config(&args.solver)?;
    let dir = &args.solver.out_dir;
    if !args.sweep.is_empty() {
        let rows = run_subcycle_study(&base, base.dt, &args.sweep)?;
        for r in &rows {
            println!(
                "Ns = {:>2}: {} macro steps, velocity {:.2} / pressure {:.2} iterations, {:.3} s, speedup {:.2}",
                r.ns, r.macro_steps, r.mean_velocity_iterations, r.mean_pressure_iterations, r.seconds, r.speedup
            );
        }
        return write(dir, "subcycle.csv", &subcycle_csv(&rows));
    }
    let record = run_convergence(&ConvergenceConfig {
        kind: args.kind,
        base,
        cells: args.cells.clone(),
        dts: args.dts.clone(),
    })?;
    let csv = errors_csv(&record);
    for r in &record.rows {
        if let Some(msg) = &r.failure {
            eprintln!("h = {:e}, dt = {:e}: {msg}", r.h, r.dt);
        }
    }
    print!("{csv}");
    write(dir, "errors.csv", &csv)
}

pub fn cylinder(args: &SolverArgs) -> Result<()> {
    let cfg = inflow_config(args)?;
    let mesh = match mesh_choice(&args.mesh) {
        Some(MeshChoice::File(path)) => read_mesh(&path)?,
        Some(MeshChoice::Cells(_)) => {
            return Err(CliError::Usage(
                "the cylinder mesh is set by `core_spacing` and `growth` in --config, or by a mesh file".into(),
            ))
        }
        None => cylinder_mesh(cfg.core_spacing, cfg.growth)?,
    };
    let (_, run, disc) = run_on_mesh(&mesh, args)?;
    write_inflow_outputs(&args.out_dir, &run, &disc)?;
    match &run.strouhal {
        Some(st) => println!(
            "{} elements, {} steps: St = {:.4} from {:.1} cycles{} ({:.1} s)",
            run.elements,
            run.steps.len(),
            st.strouhal,
            st.cycles,
            if st.reliable { "" } else { " (unreliable)" },
            run.seconds
        ),
        None => println!(
            "{} elements, {} steps: probe history too short for a frequency estimate ({:.1} s)",
            run.elements,
            run.steps.len(),
            run.seconds
        ),
    }
    Ok(())
}

pub fn roofline(args: &RooflineArgs) -> Result<()> {
    let hw = match &args.hardware {
        Some(path) => HardwareDescriptor::read(path)?,
        None => HardwareDescriptor::host(),
    };
    let b_g = match args.copy_bandwidth {
        Some(gbs) => gbs * 1e9,
        None => measure_copy_bandwidth(args.copy_mib << 20, args.trials)?,
    };
    let mut report = RooflineReport::new(&hw, b_g);
    let mesh = Mesh::generate_structured(
        args.cells,
        args.cells,
        [0.0, 1.0, 0.0, 1.0],
        [insdg::BoundaryTag::DirichletInflow; 4],
    )?;
    for &n in &args.degrees {
        benchmark_kernels(&mut report, &mesh, n, args.trials)?;
    }
    println!(
        "{}: copy bandwidth {:.2} GB/s, fast-memory bandwidth {:.2} GB/s",
        report.hardware,
        report.copy_bandwidth * 1e-9,
        report.shared_bandwidth * 1e-9
    );
    for r in &report.rows {
        println!(
            "{:>14} N={} bound {:>9.3} GFLOP/s measured {:>8.3} GFLOP/s efficiency {:.3}",
            r.cost.kernel.to_string(),
            r.cost.n,
            r.bound.combined * 1e-9,
            r.measured_gflops,
            r.efficiency()
        );
    }
    write(&args.out_dir, "roofline.csv", &report.to_csv())
}
