use super::{boundary_trace, lift_faces, local_gradient, BcSpec, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::mesh::{Connectivity, Geometry};
use crate::refelem::ReferenceElement;

/// DG gradient `(v, G p) = (v, grad p) + (v, n (p* - p-))` with `p* = {p}` on
/// interior faces, `p* = p-` on velocity-Dirichlet faces and `p* = outflow[t]` on
/// outflow faces (per trace node).
pub fn dg_gradient_with(
    p: &ScalarField,
    outflow: &[f64],
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
) -> Result<VectorField> {
    if outflow.len() != conn.id_m.len() {
        return Err(Error::Shape {
            expected: conn.id_m.len(),
            got: outflow.len(),
        });
    }
    let (px, py) = local_gradient(p, geom, re)?;
    let mut out = VectorField { u: px, v: py };
    let (np, nfp) = (re.np, re.nfp);
    let mut gx = vec![0.0; 3 * nfp];
    let mut gy = vec![0.0; 3 * nfp];
    let mut buf = vec![0.0; np];
    for e in 0..geom.k {
        for f in 0..3 {
            let fid = 3 * e + f;
            for j in 0..nfp {
                let t = conn.trace(e, f, j);
                let pm = p.values[conn.id_m[t]];
                let d = match conn.bc[fid] {
                    None => 0.5 * (p.values[conn.id_p[t]] - pm),
                    Some(tag) if tag.is_velocity_dirichlet() => 0.0,
                    Some(_) => outflow[t] - pm,
                };
                gx[f * nfp + j] = geom.nx[fid] * d;
                gy[f * nfp + j] = geom.ny[fid] * d;
            }
        }
        lift_faces(re, geom, e, &gx, &mut buf);
        for (o, b) in out.u.values[e * np..(e + 1) * np].iter_mut().zip(&buf) {
            *o += b;
        }
        lift_faces(re, geom, e, &gy, &mut buf);
        for (o, b) in out.v.values[e * np..(e + 1) * np].iter_mut().zip(&buf) {
            *o += b;
        }
    }
    Ok(out)
}

/// DG gradient with outflow pressure taken from `bc` at time `t`.
pub fn dg_gradient(
    p: &ScalarField,
    t: f64,
    bc: &BcSpec,
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
) -> Result<VectorField> {
    let data = boundary_trace(geom, conn, |_, x, y, _, _| bc.pressure(x, y, t));
    dg_gradient_with(p, &data, geom, conn, re)
}

/// DG divergence `(v, D u) = (v, div u) + (v, n.(u* - u-))` with `u* = {u}` on
/// interior faces, `u* = g_D(t)` on velocity-Dirichlet faces and `u* = u-` on outflow.
pub fn dg_divergence(
    w: &VectorField,
    t: f64,
    bc: &BcSpec,
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
) -> Result<ScalarField> {
    w.check_matches(geom.k, re.np)?;
    let (ux, _) = local_gradient(&w.u, geom, re)?;
    let (_, vy) = local_gradient(&w.v, geom, re)?;
    let mut out = ux;
    for (o, b) in out.values.iter_mut().zip(&vy.values) {
        *o += b;
    }
    let (np, nfp) = (re.np, re.nfp);
    let mut g = vec![0.0; 3 * nfp];
    let mut buf = vec![0.0; np];
    for e in 0..geom.k {
        for f in 0..3 {
            let fid = 3 * e + f;
            let (nx, ny) = (geom.nx[fid], geom.ny[fid]);
            for j in 0..nfp {
                let tr = conn.trace(e, f, j);
                let m = conn.id_m[tr];
                let (um, vm) = (w.u.values[m], w.v.values[m]);
                let (du, dv) = match conn.bc[fid] {
                    None => {
                        let p = conn.id_p[tr];
                        (0.5 * (w.u.values[p] - um), 0.5 * (w.v.values[p] - vm))
                    }
                    Some(tag) if tag.is_velocity_dirichlet() => {
                        let (gu, gv) = bc.velocity(tag, geom.x[m], geom.y[m], t);
                        (gu - um, gv - vm)
                    }
                    Some(_) => (0.0, 0.0),
                };
                g[f * nfp + j] = nx * du + ny * dv;
            }
        }
        lift_faces(re, geom, e, &g, &mut buf);
        for (o, b) in out.values[e * np..(e + 1) * np].iter_mut().zip(&buf) {
            *o += b;
        }
    }
    Ok(out)
}
