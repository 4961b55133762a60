use std::fmt::Write as _;
use std::path::Path;

use super::{ConvergenceRecord, ConvergenceRow, ErrorColumn, SubcycleRow};
use crate::dgops::{ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::mesh::Geometry;
use crate::splitting::StepStats;

pub const ERRORS_HEADER: &str = "h,dt,N,Ns,err_u,err_v,err_p";
pub const ITERS_HEADER: &str = "step,t,it_velocity_u,it_velocity_v,it_pressure";
pub const TIMINGS_HEADER: &str = "stage,seconds,fraction";
pub const SNAPSHOT_HEADER: &str = "x,y,u,v,p";
pub const SUBCYCLE_HEADER: &str =
    "Ns,dt,macro_steps,mean_it_velocity,mean_it_pressure,advection_s,velocity_s,pressure_s,update_s,total_s,speedup";

fn line(out: &mut String, args: std::fmt::Arguments<'_>) {
    out.write_fmt(args).expect("string write");
    out.push('\n');
}

/// `errors.csv`: one line per row, then a `# slope` comment when slopes exist.
pub fn errors_csv(record: &ConvergenceRecord) -> String {
    let mut out = format!("{ERRORS_HEADER}\n");
    for r in &record.rows {
        line(
            &mut out,
            format_args!(
                "{:e},{:e},{},{},{:e},{:e},{:e}",
                r.h, r.dt, r.n, r.ns, r.err_u, r.err_v, r.err_p
            ),
        );
    }
    let slopes = [ErrorColumn::U, ErrorColumn::V, ErrorColumn::P].map(|c| record.slope(c));
    if let [Some(su), Some(sv), Some(sp)] = slopes {
        let axis = if record.kind == super::StudyKind::Spatial {
            "h"
        } else {
            "dt"
        };
        line(
            &mut out,
            format_args!(
                "# {} slope vs {axis}: err_u={su:.4},err_v={sv:.4},err_p={sp:.4}",
                record.kind
            ),
        );
    }
    out
}

/// Parses the data lines of `errors.csv`; comment lines are skipped.
pub fn parse_errors_csv(text: &str) -> Result<Vec<ConvergenceRow>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h == ERRORS_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `{ERRORS_HEADER}`"),
            })
        }
    }
    lines
        .map(|(i, l)| {
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(bad("expected 7 columns"));
            }
            let real = |s: &str| s.parse::<f64>().map_err(|_| bad("invalid number"));
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad("invalid integer"));
            Ok(ConvergenceRow {
                h: real(f[0])?,
                dt: real(f[1])?,
                n: int(f[2])?,
                ns: int(f[3])?,
                err_u: real(f[4])?,
                err_v: real(f[5])?,
                err_p: real(f[6])?,
                iterations_v: f64::NAN,
                iterations_p: f64::NAN,
                seconds: f64::NAN,
                failure: None,
            })
        })
        .collect()
}

/// `iters.csv` from per-step statistics and the time reached after each step.
pub fn iterations_csv(steps: &[StepStats], times: &[f64]) -> String {
    let mut out = format!("{ITERS_HEADER}\n");
    for (i, (s, t)) in steps.iter().zip(times).enumerate() {
        line(
            &mut out,
            format_args!(
                "{},{:e},{},{},{}",
                i + 1,
                t,
                s.velocity_iterations[0],
                s.velocity_iterations[1],
                s.pressure_iterations
            ),
        );
    }
    out
}

/// `timings.csv`: summed wall time of each stage and its share of the step total.
pub fn timings_csv(steps: &[StepStats]) -> String {
    let sum = |f: fn(&StepStats) -> f64| steps.iter().map(f).sum::<f64>();
    let total = sum(|s| s.total_seconds);
    let stages = [
        ("advection", sum(|s| s.advection_seconds)),
        ("velocity", sum(|s| s.velocity_seconds)),
        ("pressure", sum(|s| s.pressure_seconds)),
        ("update", sum(|s| s.update_seconds)),
        ("total", total),
    ];
    let mut out = format!("{TIMINGS_HEADER}\n");
    for (name, secs) in stages {
        let frac = if total > 0.0 { secs / total } else { 0.0 };
        line(&mut out, format_args!("{name},{secs:.6e},{frac:.6}"));
    }
    out
}

/// Nodal `(x, y, u, v, p)` values.
pub fn snapshot_csv(geom: &Geometry, u: &VectorField, p: &ScalarField) -> String {
    let mut out = format!("{SNAPSHOT_HEADER}\n");
    for i in 0..geom.x.len() {
        line(
            &mut out,
            format_args!(
                "{:e},{:e},{:e},{:e},{:e}",
                geom.x[i], geom.y[i], u.u.values[i], u.v.values[i], p.values[i]
            ),
        );
    }
    out
}

pub fn subcycle_csv(rows: &[SubcycleRow]) -> String {
    let mut out = format!("{SUBCYCLE_HEADER}\n");
    for r in rows {
        line(
            &mut out,
            format_args!(
                "{},{:e},{},{:.4},{:.4},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.4}",
                r.ns,
                r.dt,
                r.macro_steps,
                r.mean_velocity_iterations,
                r.mean_pressure_iterations,
                r.advection_seconds,
                r.velocity_seconds,
                r.pressure_seconds,
                r.update_seconds,
                r.seconds,
                r.speedup
            ),
        );
    }
    out
}

/// Probe history `t,u,v`.
pub fn probe_csv(times: &[f64], probe: &[(f64, f64)]) -> String {
    let mut out = String::from("t,u,v\n");
    for (t, (u, v)) in times.iter().zip(probe) {
        line(&mut out, format_args!("{t:e},{u:e},{v:e}"));
    }
    out
}

/// Writes `contents` to `path`, creating parent directories.
pub fn emit_csv(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::StudyKind;
    use super::*;

    fn row(h: f64, e: f64) -> ConvergenceRow {
        ConvergenceRow {
            h,
            dt: 1e-3,
            n: 2,
            ns: 0,
            err_u: e,
            err_v: 2.0 * e,
            err_p: 10.0 * e.sqrt(),
            iterations_v: 3.0,
            iterations_p: 4.0,
            seconds: 0.1,
            failure: None,
        }
    }

    #[test]
    fn empty_record_is_header_only() {
        let rec = ConvergenceRecord {
            kind: StudyKind::Spatial,
            rows: vec![],
        };
        assert_eq!(errors_csv(&rec), format!("{ERRORS_HEADER}\n"));
        assert!(parse_errors_csv(&errors_csv(&rec)).unwrap().is_empty());
    }

    #[test]
    fn golden_four_row_record() {
        let rec = ConvergenceRecord {
            kind: StudyKind::Spatial,
            rows: [0.25, 0.125, 0.0625, 0.03125]
                .iter()
                .map(|&h: &f64| row(h, h.powi(3)))
                .collect(),
        };
        let expected = "h,dt,N,Ns,err_u,err_v,err_p\n\
            2.5e-1,1e-3,2,0,1.5625e-2,3.125e-2,1.25e0\n\
            1.25e-1,1e-3,2,0,1.953125e-3,3.90625e-3,4.419417382415922e-1\n\
            6.25e-2,1e-3,2,0,2.44140625e-4,4.8828125e-4,1.5625e-1\n\
            3.125e-2,1e-3,2,0,3.0517578125e-5,6.103515625e-5,5.524271728019903e-2\n\
            # spatial slope vs h: err_u=3.0000,err_v=3.0000,err_p=1.5000\n";
        assert_eq!(errors_csv(&rec), expected);
        let parsed = parse_errors_csv(&errors_csv(&rec)).unwrap();
        assert_eq!(parsed.len(), 4);
        for (a, b) in parsed.iter().zip(&rec.rows) {
            assert_eq!((a.h, a.dt, a.n, a.ns), (b.h, b.dt, b.n, b.ns));
            assert_eq!((a.err_u, a.err_v, a.err_p), (b.err_u, b.err_v, b.err_p));
        }
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(parse_errors_csv("a,b\n").is_err());
        assert!(parse_errors_csv(&format!("{ERRORS_HEADER}\n1,2,3\n")).is_err());
        assert!(parse_errors_csv(&format!("{ERRORS_HEADER}\n1,2,x,0,1,1,1\n")).is_err());
    }

    #[test]
    fn timings_fractions_sum_to_one() {
        let s = StepStats {
            advection_seconds: 1.0,
            velocity_seconds: 2.0,
            pressure_seconds: 3.0,
            update_seconds: 0.5,
            total_seconds: 6.5,
            ..Default::default()
        };
        let csv = timings_csv(&[s.clone(), s]);
        let fracs: Vec<f64> = csv
            .lines()
            .skip(1)
            .filter(|l| !l.starts_with("total"))
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert!((fracs.iter().sum::<f64>() - 1.0).abs() < 1e-5);
        assert!(csv.contains("pressure,6.000000e0,"));
    }

    #[test]
    fn writes_into_new_directory() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out/errors.csv");
        emit_csv(&path, "h\n").unwrap();
        assert_eq!(std::fs::read_to_string(path).unwrap(), "h\n");
    }
}
