//! Empirical roofline model: copy and fast-memory bandwidth bounds, per-kernel work
//! and data-movement inventories, and measured-versus-predicted reports.

mod bench;
mod cost;

use std::path::Path;

pub use bench::{
    benchmark_kernels, measure_copy_bandwidth, median_seconds, RooflineReport, RooflineRow,
    CSV_HEADER, MIN_COPY_BYTES, MIN_TRIALS, WARMUP_CALLS,
};
pub use cost::{
    instrumented_flops, kernel_cost, kernel_cost_for, sipdg_operator_bytes, KernelCostModel,
    KernelId,
};

use crate::config::KeyValues;
use crate::error::{Error, Result};

/// Throughput description of a processor's fast-memory tier.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareDescriptor {
    pub name: String,
    pub sm_count: usize,
    pub alus_per_sm: usize,
    pub word_bytes: usize,
    pub clock_ghz: f64,
    pub nominal_copy_bw_gbs: Option<f64>,
}

impl HardwareDescriptor {
    pub fn new(
        name: &str,
        sm_count: usize,
        alus_per_sm: usize,
        word_bytes: usize,
        clock_ghz: f64,
    ) -> Result<Self> {
        let hw = Self {
            name: name.to_string(),
            sm_count,
            alus_per_sm,
            word_bytes,
            clock_ghz,
            nominal_copy_bw_gbs: None,
        };
        hw.validate()?;
        Ok(hw)
    }

    /// Tesla P100. The clock is the effective rate that makes the bandwidth
    /// product 7.882 TB/s.
    pub fn p100() -> Self {
        Self {
            name: "p100".into(),
            sm_count: 56,
            alus_per_sm: 1,
            word_bytes: 8,
            clock_ghz: 17.59375,
            nominal_copy_bw_gbs: Some(549.0),
        }
    }

    /// Host CPU, modelling L1 as the fast tier: two 8-byte loads per cycle per core.
    pub fn host() -> Self {
        let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self {
            name: "host".into(),
            sm_count: cores,
            alus_per_sm: 2,
            word_bytes: 8,
            clock_ghz: 3.0,
            nominal_copy_bw_gbs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::Config(format!(
                "hardware descriptor: {what} must be positive"
            )))
        };
        if self.sm_count == 0 {
            return bad("sm_count");
        }
        if self.alus_per_sm == 0 {
            return bad("alus_per_sm");
        }
        if self.word_bytes == 0 {
            return bad("word_bytes");
        }
        if !(self.clock_ghz > 0.0 && self.clock_ghz.is_finite()) {
            return bad("clock_ghz");
        }
        if self.nominal_copy_bw_gbs.is_some_and(|b| !(b > 0.0)) {
            return bad("nominal_copy_bw_gbs");
        }
        Ok(())
    }

    /// Reads `name`, `sm_count`, `alus_per_sm`, `word_bytes`, `clock_ghz` and the
    /// optional `nominal_copy_bw_gbs` from `key = value` text.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let hw = Self {
            name: kv.get_str("name").unwrap_or("custom").to_string(),
            sm_count: kv.require("sm_count")?,
            alus_per_sm: kv.require("alus_per_sm")?,
            word_bytes: kv.require("word_bytes")?,
            clock_ghz: kv.require("clock_ghz")?,
            nominal_copy_bw_gbs: kv.get("nominal_copy_bw_gbs")?,
        };
        hw.validate()?;
        Ok(hw)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_key_values(&KeyValues::read(path)?)
    }
}

/// `B_sh = SMs x ALUs x word length x clock`, in bytes/s.
pub fn shared_bandwidth(hw: &HardwareDescriptor) -> f64 {
    hw.sm_count as f64 * hw.alus_per_sm as f64 * hw.word_bytes as f64 * hw.clock_ghz * 1e9
}

/// Roofline bounds in flop/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RooflineBound {
    pub copy: f64,
    pub fast: f64,
    pub combined: f64,
}

/// `B_g W / (D_in + D_out)`, `B_sh W / (S_in + S_out)` and their minimum.
pub fn roofline_bound(cost: &KernelCostModel, b_g: f64, b_sh: f64) -> Result<RooflineBound> {
    if !(b_g > 0.0 && b_sh > 0.0) {
        return Err(Error::Config(format!(
            "bandwidths must be positive, got {b_g}, {b_sh}"
        )));
    }
    let d = cost.d_in + cost.d_out;
    let s = cost.s_in + cost.s_out;
    if d == 0 || s == 0 {
        return Err(Error::Config(format!(
            "{} cost model moves no data",
            cost.kernel
        )));
    }
    let w = cost.w as f64;
    let copy = b_g * w / d as f64;
    let fast = b_sh * w / s as f64;
    Ok(RooflineBound {
        copy,
        fast,
        combined: copy.min(fast),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(w: u64, d: u64, s: u64) -> KernelCostModel {
        KernelCostModel {
            kernel: KernelId::Sipdg,
            n: 1,
            k: 1,
            np: 3,
            nfp: 2,
            nc: 6,
            nfc: 3,
            w,
            d_in: d / 2,
            d_out: d - d / 2,
            s_in: s / 2,
            s_out: s - s / 2,
        }
    }

    #[test]
    fn unit_product() {
        let hw = HardwareDescriptor::new("unit", 1, 1, 8, 1.0).unwrap();
        assert_eq!(shared_bandwidth(&hw), 8e9);
        let mut fast = hw.clone();
        fast.clock_ghz = 2.0;
        assert_eq!(shared_bandwidth(&fast), 2.0 * shared_bandwidth(&hw));
    }

    #[test]
    fn p100_bandwidth() {
        assert_eq!(shared_bandwidth(&HardwareDescriptor::p100()), 7.882e12);
    }

    #[test]
    fn quarter_flop_per_byte_bound() {
        let b = roofline_bound(
            &model(1000, 100, 4000),
            1e9,
            shared_bandwidth(&HardwareDescriptor::p100()),
        )
        .unwrap();
        assert!((b.fast - 1.9705e12).abs() <= 1e-3 * 1.9705e12);
        assert_eq!(b.combined, b.copy.min(b.fast));
    }

    #[test]
    fn bounds_scale_with_work_and_bandwidth() {
        let a = roofline_bound(&model(500, 80, 300), 2e10, 3e11).unwrap();
        let b = roofline_bound(&model(1000, 80, 300), 2e10, 3e11).unwrap();
        assert!((b.copy - 2.0 * a.copy).abs() < 1e-6 * b.copy);
        assert!((b.fast - 2.0 * a.fast).abs() < 1e-6 * b.fast);
        let c = roofline_bound(&model(500, 80, 300), 4e10, 6e11).unwrap();
        assert!((c.combined - 2.0 * a.combined).abs() < 1e-6 * c.combined);
        assert!(a.combined <= a.copy && a.combined <= a.fast);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(roofline_bound(&model(10, 0, 8), 1.0, 1.0).is_err());
        assert!(roofline_bound(&model(10, 8, 0), 1.0, 1.0).is_err());
        assert!(roofline_bound(&model(10, 8, 8), 0.0, 1.0).is_err());
        assert!(HardwareDescriptor::new("x", 0, 1, 8, 1.0).is_err());
        assert!(HardwareDescriptor::new("x", 1, 1, 8, -1.0).is_err());
    }

    #[test]
    fn descriptor_from_config() {
        let kv = KeyValues::parse(
            "name = p100\nsm_count = 56\nalus_per_sm = 1\nword_bytes = 8\nclock_ghz = 17.59375\n",
        )
        .unwrap();
        let hw = HardwareDescriptor::from_key_values(&kv).unwrap();
        assert_eq!(hw.name, "p100");
        assert_eq!(shared_bandwidth(&hw), 7.882e12);
        let missing = KeyValues::parse("sm_count = 56\n").unwrap();
        assert!(HardwareDescriptor::from_key_values(&missing).is_err());
    }
}
