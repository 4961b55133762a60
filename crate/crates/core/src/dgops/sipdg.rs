use super::{local_gradient, EllipticBc, EllipticKind, KernelScalar, ScalarField};
use crate::error::{Error, Result};
use crate::mesh::{Connectivity, Geometry};
use crate::refelem::ReferenceElement;

/// Inhomogeneous elliptic boundary data, one entry per trace node
/// (`Connectivity::trace` indexing). `value` is read on Dirichlet faces, `flux`
/// (outward normal derivative) on Neumann faces.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticData {
    pub value: Vec<f64>,
    pub flux: Vec<f64>,
}

impl EllipticData {
    pub fn zeros(conn: &Connectivity) -> Self {
        Self {
            value: vec![0.0; conn.id_m.len()],
            flux: vec![0.0; conn.id_m.len()],
        }
    }
}

/// Screened-Poisson SIPDG action, grouped as
/// `J M (-D.[Du + 1/2 n L[u]] - L[1/2 n.[Du] + tau [u] - n.(1/2 L n[u])^-]) + lambda J M u`.
///
/// Exterior traces on boundary faces are mirrored: Dirichlet `u+ = 2g - u-`,
/// `grad u+ = grad u-`; Neumann `u+ = u-`, `grad u+ = 2 h n - grad u-`. With
/// `data = None` the mirror is homogeneous.
#[allow(clippy::too_many_arguments)]
pub fn sipdg_kernel<T: KernelScalar>(
    re: &ReferenceElement,
    geom: &Geometry,
    conn: &Connectivity,
    bc: EllipticBc,
    lambda: f64,
    u: &[T],
    ux: &[T],
    uy: &[T],
    data: Option<&EllipticData>,
    out: &mut [T],
) {
    let (np, nfp) = (re.np, re.nfp);
    let nt = 3 * nfp;
    let half = T::lit(0.5);
    let lam = T::lit(lambda);
    let mut du = vec![T::zero(); nt];
    let mut dux = vec![T::zero(); nt];
    let mut duy = vec![T::zero(); nt];
    let mut jx = vec![T::zero(); nt];
    let mut jy = vec![T::zero(); nt];
    let mut sv = vec![T::zero(); nt];
    let mut lx = vec![T::zero(); np];
    let mut ly = vec![T::zero(); np];
    let mut gr = vec![T::zero(); np];
    let mut gs = vec![T::zero(); np];
    let mut w = vec![T::zero(); np];

    for e in 0..geom.k {
        // jumps at the face nodes
        for f in 0..3 {
            let fid = 3 * e + f;
            let (s, nx, ny) = (
                T::lit(geom.fscale[fid]),
                T::lit(geom.nx[fid]),
                T::lit(geom.ny[fid]),
            );
            let kind = conn.bc[fid].map(|t| bc.kind(t));
            for j in 0..nfp {
                let t = conn.trace(e, f, j);
                let (m, p) = (conn.id_m[t], conn.id_p[t]);
                let (um, uxm, uym) = (u[m], ux[m], uy[m]);
                let (up, uxp, uyp) = match (kind, data) {
                    (None, _) => (u[p], ux[p], uy[p]),
                    (Some(EllipticKind::Dirichlet), None) => (-um, uxm, uym),
                    (Some(EllipticKind::Dirichlet), Some(d)) => {
                        (T::lit(2.0 * d.value[t]) - um, uxm, uym)
                    }
                    (Some(EllipticKind::Neumann), None) => (um, -uxm, -uym),
                    (Some(EllipticKind::Neumann), Some(d)) => {
                        let h = 2.0 * d.flux[t];
                        (
                            um,
                            T::lit(h * geom.nx[fid]) - uxm,
                            T::lit(h * geom.ny[fid]) - uym,
                        )
                    }
                };
                let l = f * nfp + j;
                du[l] = up - um;
                dux[l] = uxp - uxm;
                duy[l] = uyp - uym;
                let sc = s * du[l];
                jx[l] = nx * sc;
                jy[l] = ny * sc;
            }
        }
        // half the lifted normal jump
        for i in 0..np {
            let row = re.lift.row(i);
            let (mut ax, mut ay) = (T::zero(), T::zero());
            for l in 0..nt {
                ax = ax + T::lit(row[l]) * jx[l];
                ay = ay + T::lit(row[l]) * jy[l];
            }
            lx[i] = half * ax;
            ly[i] = half * ay;
        }
        // volume divergence
        let (rx, sx) = (T::lit(geom.rx[e]), T::lit(geom.sx[e]));
        let (ry, sy) = (T::lit(geom.ry[e]), T::lit(geom.sy[e]));
        for i in 0..np {
            let n = e * np + i;
            let fx = ux[n] + lx[i];
            let fy = uy[n] + ly[i];
            gr[i] = rx * fx + ry * fy;
            gs[i] = sx * fx + sy * fy;
        }
        for i in 0..np {
            let (dr, ds) = (re.dr.row(i), re.ds.row(i));
            let mut acc = T::zero();
            for j in 0..np {
                acc = acc + T::lit(dr[j]) * gr[j];
                acc = acc + T::lit(ds[j]) * gs[j];
            }
            w[i] = acc;
        }
        // surface terms
        for f in 0..3 {
            let fid = 3 * e + f;
            let (s, nx, ny) = (
                T::lit(geom.fscale[fid]),
                T::lit(geom.nx[fid]),
                T::lit(geom.ny[fid]),
            );
            let tau = T::lit(geom.tau[fid]);
            for (j, &node) in re.face_nodes(f).iter().enumerate() {
                let l = f * nfp + j;
                sv[l] = s
                    * (half * (nx * dux[l] + ny * duy[l]) + tau * du[l]
                        - (nx * lx[node] + ny * ly[node]));
            }
        }
        for i in 0..np {
            let row = re.lift.row(i);
            let mut acc = w[i];
            for l in 0..nt {
                acc = acc + T::lit(row[l]) * sv[l];
            }
            w[i] = acc;
        }
        // mass
        let jac = T::lit(geom.jac[e]);
        let ue = &u[e * np..(e + 1) * np];
        for i in 0..np {
            let row = re.mass.row(i);
            let (mut mw, mut mu) = (T::zero(), T::zero());
            for j in 0..np {
                mw = mw + T::lit(row[j]) * w[j];
                mu = mu + T::lit(row[j]) * ue[j];
            }
            out[e * np + i] = jac * (lam * mu - mw);
        }
    }
}

fn check_inputs(
    f: &ScalarField,
    grad: (&ScalarField, &ScalarField),
    lambda: f64,
    geom: &Geometry,
    re: &ReferenceElement,
) -> Result<()> {
    if !(lambda >= 0.0) {
        return Err(Error::Config(format!(
            "screening parameter must be >= 0, got {lambda}"
        )));
    }
    f.check_matches(geom.k, re.np)?;
    grad.0.check_matches(geom.k, re.np)?;
    grad.1.check_matches(geom.k, re.np)
}

/// `A f` with homogeneous boundary mirroring; `grad` must be `local_gradient(f)`.
pub fn sipdg_apply(
    f: &ScalarField,
    grad: (&ScalarField, &ScalarField),
    lambda: f64,
    bc: EllipticBc,
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
) -> Result<ScalarField> {
    check_inputs(f, grad, lambda, geom, re)?;
    let mut out = ScalarField::zeros(geom.k, re.np);
    sipdg_kernel(
        re,
        geom,
        conn,
        bc,
        lambda,
        &f.values,
        &grad.0.values,
        &grad.1.values,
        None,
        &mut out.values,
    );
    Ok(out)
}

/// `A f` with inhomogeneous boundary data in the mirrored traces.
#[allow(clippy::too_many_arguments)]
pub fn sipdg_apply_with(
    f: &ScalarField,
    grad: (&ScalarField, &ScalarField),
    lambda: f64,
    bc: EllipticBc,
    data: &EllipticData,
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
) -> Result<ScalarField> {
    check_inputs(f, grad, lambda, geom, re)?;
    if data.value.len() != conn.id_m.len() || data.flux.len() != conn.id_m.len() {
        return Err(Error::Shape {
            expected: conn.id_m.len(),
            got: data.value.len().min(data.flux.len()),
        });
    }
    let mut out = ScalarField::zeros(geom.k, re.np);
    sipdg_kernel(
        re,
        geom,
        conn,
        bc,
        lambda,
        &f.values,
        &grad.0.values,
        &grad.1.values,
        Some(data),
        &mut out.values,
    );
    Ok(out)
}

/// Computes the local gradient and applies the homogeneous operator.
pub fn elliptic_apply(
    f: &ScalarField,
    lambda: f64,
    bc: EllipticBc,
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
) -> Result<ScalarField> {
    let (fx, fy) = local_gradient(f, geom, re)?;
    sipdg_apply(f, (&fx, &fy), lambda, bc, geom, conn, re)
}

/// Boundary-data part of the operator, `A(0; g)`; moved to the right-hand side.
pub fn boundary_lift(
    data: &EllipticData,
    bc: EllipticBc,
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
) -> Result<ScalarField> {
    let z = ScalarField::zeros(geom.k, re.np);
    sipdg_apply_with(&z, (&z, &z), 0.0, bc, data, geom, conn, re)
}
