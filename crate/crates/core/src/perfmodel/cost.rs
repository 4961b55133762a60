use std::fmt;
use std::str::FromStr;

use crate::dgops::{
    advection_surface_kernel, advection_volume_kernel, counted, flops, local_gradient_kernel,
    reset_flops, sipdg_kernel, Counted, Discretization, EllipticBc,
};
use crate::error::{Error, Result};
use crate::refelem::{build_default, ReferenceElement};

const WORD: u64 = 8;
const NF: u64 = 3;

/// The four modelled elemental kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    LocalGradient,
    Sipdg,
    AdvVolume,
    AdvSurface,
}

impl KernelId {
    pub const ALL: [KernelId; 4] = [
        KernelId::LocalGradient,
        KernelId::Sipdg,
        KernelId::AdvVolume,
        KernelId::AdvSurface,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::LocalGradient => "local_gradient",
            KernelId::Sipdg => "sipdg",
            KernelId::AdvVolume => "adv_volume",
            KernelId::AdvSurface => "adv_surface",
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown kernel `{s}`")))
    }
}

/// Work and data movement of one kernel launch over `k` elements.
///
/// `d_in`/`d_out` are global-memory bytes of the kernel's input and output arrays;
/// `s_in`/`s_out` are fast-memory bytes read from and written to the per-element
/// staging arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelCostModel {
    pub kernel: KernelId,
    pub n: usize,
    pub k: usize,
    pub np: usize,
    pub nfp: usize,
    pub nc: usize,
    pub nfc: usize,
    pub w: u64,
    pub d_in: u64,
    pub d_out: u64,
    pub s_in: u64,
    pub s_out: u64,
}

impl KernelCostModel {
    /// Flops per global byte.
    pub fn global_intensity(&self) -> f64 {
        self.w as f64 / (self.d_in + self.d_out) as f64
    }

    /// Flops per fast-memory byte.
    pub fn fast_intensity(&self) -> f64 {
        self.w as f64 / (self.s_in + self.s_out) as f64
    }
}

/// Cost model for degree `n` with the default cubature.
pub fn kernel_cost(kernel: KernelId, n: usize, k: usize) -> Result<KernelCostModel> {
    if n == 0 || k == 0 {
        return Err(Error::Config(format!(
            "kernel cost needs N, K >= 1, got N={n}, K={k}"
        )));
    }
    Ok(kernel_cost_for(kernel, &build_default(n)?, k))
}

/// Cost model for the cubature sizes of `re`.
pub fn kernel_cost_for(kernel: KernelId, re: &ReferenceElement, k: usize) -> KernelCostModel {
    let (np, nfp, nc, nfc) = (re.np as u64, re.nfp as u64, re.nc() as u64, re.nfc() as u64);
    let kk = k as u64;
    let nt = NF * nfp;
    let (w, d_in, d_out, s_in, s_out) = match kernel {
        // inputs u, D = [Dr, Ds], G = [rx, sx, ry, sy]; output [ux, uy].
        // staged: u.
        KernelId::LocalGradient => (
            kk * (4 * np * np + 6 * np),
            kk * np + 2 * np * np + 4 * kk,
            2 * kk * np,
            kk * np * np,
            kk * np,
        ),
        // inputs u, grad u, idM, idP, D, Lift, Mass, sG, G; output Au.
        // staged: face vectors jx, jy, sv and volume vectors gr, gs, w, u.
        KernelId::Sipdg => (
            kk * (8 * np * np + 18 * nfp * np + 13 * np + 51 * nfp),
            3 * kk * np + 2 * kk * nt + 2 * np * np + np * nt + np * np + 4 * kk * NF + 5 * kk,
            kk * np,
            kk * (4 * np * np + 3 * np * nt),
            kk * (3 * nt + 4 * np),
        ),
        // inputs Ubar, Utilde, interpolation, projections [Pr, Ps], G; output N.
        // staged: the four velocity components and the four cubature fluxes.
        KernelId::AdvVolume => (
            kk * (24 * np * nc + 4 * nc + 14 * np),
            4 * kk * np + nc * np + 2 * np * nc + 4 * kk,
            2 * kk * np,
            kk * 8 * np * nc,
            kk * (4 * np + 4 * nc),
        ),
        // inputs Ubar, Utilde, idM, idP, cubature lift, face interpolation, sG;
        // output N. staged: eight trace arrays and the two cubature fluxes.
        KernelId::AdvSurface => (
            kk * (48 * nfc * nfp + 105 * nfc + 12 * np * nfc + 2 * np + 3),
            4 * kk * np + 2 * kk * nt + np * NF * nfc + NF * nfc * np + 4 * kk * NF,
            2 * kk * np,
            kk * (24 * nfc * nfp + 6 * np * nfc),
            kk * (8 * nt + 2 * NF * nfc),
        ),
    };
    KernelCostModel {
        kernel,
        n: re.degree,
        k,
        np: re.np,
        nfp: re.nfp,
        nc: re.nc(),
        nfc: re.nfc(),
        w,
        d_in: WORD * d_in,
        d_out: WORD * d_out,
        s_in: WORD * s_in,
        s_out: WORD * s_out,
    }
}

/// Bytes of the reference operators the SIPDG kernel streams per element: mass,
/// lift and the two derivative matrices.
pub fn sipdg_operator_bytes(n: usize) -> u64 {
    let np = ((n + 1) * (n + 2) / 2) as u64;
    let nfp = (n + 1) as u64;
    WORD * (np * np + np * NF * nfp + 2 * np * np)
}

fn count(f: impl FnOnce()) -> u64 {
    reset_flops();
    f();
    flops()
}

/// Operations performed by one call of the actual kernel on `d`, tallied with the
/// counting scalar. Boundary faces use homogeneous or constant data.
pub fn instrumented_flops(kernel: KernelId, d: &Discretization) -> u64 {
    let (re, geom, conn) = (&d.re, &d.geom, &d.conn);
    let len = geom.k * re.np;
    let field = |s: f64| counted(&(0..len).map(|i| (i as f64 * s).sin()).collect::<Vec<_>>());
    let mut a = vec![Counted(0.0); len];
    let mut b = vec![Counted(0.0); len];
    match kernel {
        KernelId::LocalGradient => {
            let u = field(0.3);
            count(|| local_gradient_kernel(re, geom, &u, &mut a, &mut b))
        }
        KernelId::Sipdg => {
            let (u, ux, uy) = (field(0.3), field(0.7), field(1.1));
            let bc = EllipticBc::VELOCITY;
            count(|| sipdg_kernel(re, geom, conn, bc, 2.0, &u, &ux, &uy, None, &mut a))
        }
        KernelId::AdvVolume => {
            let (p, q, r, s) = (field(0.3), field(0.7), field(1.1), field(1.3));
            count(|| advection_volume_kernel(re, geom, &p, &q, &r, &s, &mut a, &mut b))
        }
        KernelId::AdvSurface => {
            let (p, q, r, s) = (field(0.3), field(0.7), field(1.1), field(1.3));
            let data = vec![0.5; 2 * 3 * geom.k * re.nfc()];
            count(|| {
                advection_surface_kernel(re, geom, conn, &p, &q, &r, &s, &data, &mut a, &mut b)
            })
        }
    }
}
