use std::fmt::Write as _;
use std::hint::black_box;
use std::path::Path;
use std::time::{Duration, Instant};

use super::{kernel_cost_for, roofline_bound, shared_bandwidth, HardwareDescriptor};
use super::{KernelCostModel, KernelId, RooflineBound};
use crate::dgops::{
    advection_surface_kernel, advection_volume_kernel, local_gradient_kernel, sipdg_kernel,
    Discretization, EllipticBc,
};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Smallest copy buffer accepted by [`measure_copy_bandwidth`].
pub const MIN_COPY_BYTES: usize = 256 << 20;
pub const WARMUP_CALLS: usize = 3;
pub const MIN_TRIALS: usize = 11;

const MIN_BATCH: Duration = Duration::from_millis(1);

/// Median wall time of one call of `f`: [`WARMUP_CALLS`] discarded calls, then
/// `trials` timed samples. Calls shorter than 1 ms are batched so each sample
/// spans at least 1 ms.
pub fn median_seconds(mut f: impl FnMut(), trials: usize) -> Result<f64> {
    if trials < MIN_TRIALS {
        return Err(Error::Config(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    for _ in 0..WARMUP_CALLS {
        f();
    }
    let start = Instant::now();
    f();
    let once = start.elapsed();
    let batch = if once >= MIN_BATCH {
        1
    } else {
        (MIN_BATCH.as_secs_f64() / once.as_secs_f64().max(1e-9)).ceil() as usize
    };
    let mut samples: Vec<f64> = (0..trials)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..batch {
                f();
            }
            start.elapsed().as_secs_f64() / batch as f64
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let median = samples[trials / 2];
    if median <= 0.0 {
        return Err(Error::Benchmark("timer resolution too coarse".into()));
    }
    Ok(median)
}

/// Achievable memory-to-memory bandwidth in bytes/s. A buffer of `buffer_bytes` is
/// copied; each copy moves `2 * buffer_bytes` (read plus write).
pub fn measure_copy_bandwidth(buffer_bytes: usize, trials: usize) -> Result<f64> {
    if buffer_bytes < MIN_COPY_BYTES {
        return Err(Error::Benchmark(format!(
            "copy buffer of {buffer_bytes} bytes is below the cache-defeating minimum of {MIN_COPY_BYTES}"
        )));
    }
    let alloc = |fill: u8| -> Result<Vec<u8>> {
        let mut v = Vec::new();
        v.try_reserve_exact(buffer_bytes).map_err(|e| {
            Error::Benchmark(format!("allocation of {buffer_bytes} bytes failed: {e}"))
        })?;
        v.resize(buffer_bytes, fill);
        Ok(v)
    };
    let src = alloc(1)?;
    let mut dst = alloc(0)?;
    let t = median_seconds(
        || {
            dst.copy_from_slice(black_box(&src));
            black_box(&mut dst);
        },
        trials,
    )?;
    Ok(2.0 * buffer_bytes as f64 / t)
}

/// One kernel's predicted bounds and measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct RooflineRow {
    pub cost: KernelCostModel,
    pub bound: RooflineBound,
    pub seconds: f64,
    pub measured_gflops: f64,
}

impl RooflineRow {
    /// Measured over combined bound.
    pub fn efficiency(&self) -> f64 {
        self.measured_gflops * 1e9 / self.bound.combined
    }

    /// Measurement beats the model by more than 5%.
    pub fn violates_model(&self) -> bool {
        self.efficiency() > 1.05
    }
}

/// Predicted and measured throughput of the elemental kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct RooflineReport {
    pub hardware: String,
    pub copy_bandwidth: f64,
    pub shared_bandwidth: f64,
    pub rows: Vec<RooflineRow>,
}

pub const CSV_HEADER: &str = "kernel,N,K,W,D_in,D_out,S_in,S_out,copy_bound,fast_bound,combined_bound,measured_gflops,efficiency";

impl RooflineReport {
    pub fn new(hw: &HardwareDescriptor, copy_bandwidth: f64) -> Self {
        Self {
            hardware: hw.name.clone(),
            copy_bandwidth,
            shared_bandwidth: shared_bandwidth(hw),
            rows: Vec::new(),
        }
    }

    /// Bounds are in GFLOP/s.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            let c = &r.cost;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
                c.kernel,
                c.n,
                c.k,
                c.w,
                c.d_in,
                c.d_out,
                c.s_in,
                c.s_out,
                r.bound.copy * 1e-9,
                r.bound.fast * 1e-9,
                r.bound.combined * 1e-9,
                r.measured_gflops,
                r.efficiency()
            )
            .expect("string write");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Times the four kernels at degree `degree` on `mesh` and appends one row per kernel.
pub fn benchmark_kernels(
    report: &mut RooflineReport,
    mesh: &Mesh,
    degree: usize,
    trials: usize,
) -> Result<()> {
    let d = Discretization::new(mesh, degree)?;
    let (re, geom, conn) = (&d.re, &d.geom, &d.conn);
    let len = geom.k * re.np;
    let field = |s: f64| (0..len).map(|i| (i as f64 * s).sin()).collect::<Vec<f64>>();
    let (u, v, w, z) = (field(0.3), field(0.7), field(1.1), field(1.3));
    let data = vec![0.5; 2 * 3 * geom.k * re.nfc()];
    let mut a = vec![0.0; len];
    let mut b = vec![0.0; len];
    for kernel in KernelId::ALL {
        let seconds = match kernel {
            KernelId::LocalGradient => median_seconds(
                || local_gradient_kernel(re, geom, black_box(&u), &mut a, &mut b),
                trials,
            )?,
            KernelId::Sipdg => median_seconds(
                || {
                    sipdg_kernel(
                        re,
                        geom,
                        conn,
                        EllipticBc::VELOCITY,
                        1.0,
                        black_box(&u),
                        &v,
                        &w,
                        None,
                        &mut a,
                    )
                },
                trials,
            )?,
            KernelId::AdvVolume => median_seconds(
                || advection_volume_kernel(re, geom, black_box(&u), &v, &w, &z, &mut a, &mut b),
                trials,
            )?,
            KernelId::AdvSurface => median_seconds(
                || {
                    advection_surface_kernel(
                        re,
                        geom,
                        conn,
                        black_box(&u),
                        &v,
                        &w,
                        &z,
                        &data,
                        &mut a,
                        &mut b,
                    )
                },
                trials,
            )?,
        };
        black_box((&a, &b));
        let cost = kernel_cost_for(kernel, re, geom.k);
        let bound = roofline_bound(&cost, report.copy_bandwidth, report.shared_bandwidth)?;
        report.rows.push(RooflineRow {
            cost,
            bound,
            seconds,
            measured_gflops: cost.w as f64 / seconds * 1e-9,
        });
    }
    Ok(())
}
