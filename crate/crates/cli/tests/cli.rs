use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const CHANNEL: &str = "$Nodes 6
1 0 0
2 1 0
3 2 0
4 0 1
5 1 1
6 2 1
$Elements 4
1 1 2 5
2 1 5 4
3 2 3 6
4 2 6 5
$Boundary 6
1 2 3
2 3 3
3 6 2
6 5 3
5 4 3
4 1 1
";

fn insdg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_insdg"))
        .args(args)
        .output()
        .expect("spawn insdg")
}

fn out_dir(tmp: &TempDir, name: &str) -> String {
    tmp.path().join(name).to_string_lossy().into_owned()
}

fn read(dir: &str, file: &str) -> String {
    std::fs::read_to_string(Path::new(dir).join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

const SMALL: [&str; 8] = [
    "--mesh",
    "4",
    "--degree",
    "2",
    "--dt",
    "0.01",
    "--final-time",
    "0.05",
];

#[test]
fn vortex_run_writes_outputs() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "run");
    let out = insdg(&[&["run"][..], &SMALL, &["--out-dir", &dir]].concat());
    assert_ok(&out);
    assert!(read(&dir, "errors.csv").starts_with("h,dt,N,Ns,err_u,err_v,err_p\n"));
    let iters = read(&dir, "iters.csv");
    assert!(iters.starts_with("step,t,it_velocity_u,it_velocity_v,it_pressure\n"));
    assert_eq!(iters.lines().count(), 6);
    assert!(read(&dir, "timings.csv").starts_with("stage,seconds,fraction\n"));
    let snapshot = read(&dir, "snapshot.csv");
    assert_eq!(snapshot.lines().count(), 1 + 32 * 6);
}

#[test]
fn identical_runs_are_bitwise_reproducible() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (out_dir(&tmp, "a"), out_dir(&tmp, "b"));
    for dir in [&a, &b] {
        assert_ok(&insdg(
            &[
                &["run"][..],
                &SMALL,
                &["--subcycles", "2", "--out-dir", dir],
            ]
            .concat(),
        ));
    }
    assert_eq!(read(&a, "errors.csv"), read(&b, "errors.csv"));
    assert_eq!(read(&a, "snapshot.csv"), read(&b, "snapshot.csv"));
}

#[test]
fn temporal_study_reports_rows_and_slope() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "temporal");
    let out = insdg(&[
        "convergence",
        "temporal",
        "--mesh",
        "4",
        "--degree",
        "2",
        "--dts",
        "0.02,0.01",
        "--final-time",
        "0.1",
        "--out-dir",
        &dir,
    ]);
    assert_ok(&out);
    let csv = read(&dir, "errors.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("# temporal slope"));
    assert_eq!(String::from_utf8_lossy(&out.stdout), csv);
}

#[test]
fn subcycle_study_requires_substeps() {
    let tmp = TempDir::new().unwrap();
    let out = insdg(&[
        "convergence",
        "subcycle",
        "--mesh",
        "4",
        "--out-dir",
        &out_dir(&tmp, "s"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("substep"));
}

#[test]
fn subcycle_sweep_writes_table() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "sweep");
    let out = insdg(&[
        "convergence",
        "temporal",
        "--mesh",
        "4",
        "--degree",
        "2",
        "--dt",
        "0.01",
        "--final-time",
        "0.04",
        "--sweep",
        "1,2",
        "--out-dir",
        &dir,
    ]);
    assert_ok(&out);
    let csv = read(&dir, "subcycle.csv");
    assert_eq!(csv.lines().count(), 3);
    assert!(!Path::new(&dir).join("errors.csv").exists());
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("vortex.cfg");
    std::fs::write(
        &cfg,
        "# small run\ndegree = 1\ncells = 2\ndt = 0.02\nfinal_time = 0.04\n",
    )
    .unwrap();
    let cfg = cfg.to_string_lossy().into_owned();
    let dir = out_dir(&tmp, "cfg");
    assert_ok(&insdg(&["run", "--config", &cfg, "--out-dir", &dir]));
    let row = read(&dir, "errors.csv").lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("5e-1,2e-2,1,0,"), "{row}");

    let dir = out_dir(&tmp, "flags");
    assert_ok(&insdg(&[
        "run",
        "--config",
        &cfg,
        "--degree",
        "2",
        "--dt",
        "0.01",
        "--out-dir",
        &dir,
    ]));
    let row = read(&dir, "errors.csv").lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("5e-1,1e-2,2,0,"), "{row}");
    assert_eq!(read(&dir, "iters.csv").lines().count(), 5);
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "viscosity = 0.1\n").unwrap();
    let out = insdg(&[
        "run",
        "--config",
        &cfg.to_string_lossy(),
        "--out-dir",
        &out_dir(&tmp, "x"),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inflow_run_on_mesh_file() {
    let tmp = TempDir::new().unwrap();
    let mesh = tmp.path().join("channel.msh");
    std::fs::write(&mesh, CHANNEL).unwrap();
    let cfg = tmp.path().join("channel.cfg");
    std::fs::write(&cfg, "probe_x = 1.5\nprobe_y = 0.5\nnu = 0.05\n").unwrap();
    let dir = out_dir(&tmp, "channel");
    let out = insdg(&[
        "run",
        "--mesh",
        &mesh.to_string_lossy(),
        "--config",
        &cfg.to_string_lossy(),
        "--degree",
        "3",
        "--dt",
        "0.01",
        "--final-time",
        "0.1",
        "--out-dir",
        &dir,
    ]);
    assert_ok(&out);
    let probe = read(&dir, "probe.csv");
    assert!(probe.starts_with("t,u,v\n"), "{probe}");
    assert_eq!(probe.lines().count(), 11);
    let last: Vec<f64> = probe
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!(
        last[1] > 0.5 && last[1] < 2.0,
        "streamwise probe velocity {}",
        last[1]
    );
    assert!(!Path::new(&dir).join("errors.csv").exists());
}

#[test]
fn missing_mesh_file_reports_path() {
    let tmp = TempDir::new().unwrap();
    let out = insdg(&[
        "run",
        "--mesh",
        "nowhere.msh",
        "--out-dir",
        &out_dir(&tmp, "x"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.msh"));
}

#[test]
fn roofline_with_given_bandwidth() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "roof");
    let out = insdg(&[
        "roofline",
        "--degrees",
        "1,2",
        "--cells",
        "4",
        "--copy-bandwidth",
        "10",
        "--out-dir",
        &dir,
    ]);
    assert_ok(&out);
    let csv = read(&dir, "roofline.csv");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("kernel,N,K,W,"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn invalid_arguments_are_usage_errors() {
    assert_eq!(insdg(&["run", "--precond", "ilu"]).status.code(), Some(2));
    assert_eq!(
        insdg(&["run", "--dt", "0.1", "--cfl", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(insdg(&["convergence", "sideways"]).status.code(), Some(2));
}
