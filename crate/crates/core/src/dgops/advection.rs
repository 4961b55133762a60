use super::{BcSpec, KernelScalar, VectorField};
use crate::error::Result;
use crate::mesh::{Connectivity, Geometry};
use crate::refelem::ReferenceElement;

/// Volume part of `-N(Ubar, Utilde)`: interpolate to cubature nodes, form
/// `F0..F3 = ubar ut, vbar ut, ubar vt, vbar vt`, project with `Pr`, `Ps` and apply
/// the chain rule.
#[allow(clippy::too_many_arguments)]
pub fn advection_volume_kernel<T: KernelScalar>(
    re: &ReferenceElement,
    geom: &Geometry,
    ub: &[T],
    vb: &[T],
    ut: &[T],
    vt: &[T],
    nu: &mut [T],
    nv: &mut [T],
) {
    let (np, nc) = (re.np, re.nc());
    let mut f = vec![[T::zero(); 4]; nc];
    for e in 0..geom.k {
        let r = e * np..(e + 1) * np;
        let (ube, vbe, ute, vte) = (&ub[r.clone()], &vb[r.clone()], &ut[r.clone()], &vt[r]);
        for (i, fi) in f.iter_mut().enumerate() {
            let row = re.interp_cub.row(i);
            let (mut a, mut b, mut c, mut d) = (T::zero(), T::zero(), T::zero(), T::zero());
            for j in 0..np {
                let w = T::lit(row[j]);
                a = a + w * ube[j];
                b = b + w * vbe[j];
                c = c + w * ute[j];
                d = d + w * vte[j];
            }
            *fi = [a * c, b * c, a * d, b * d];
        }
        let (rx, sx) = (T::lit(geom.rx[e]), T::lit(geom.sx[e]));
        let (ry, sy) = (T::lit(geom.ry[e]), T::lit(geom.sy[e]));
        for i in 0..np {
            let (pr, ps) = (re.proj_r.row(i), re.proj_s.row(i));
            let mut fr = [T::zero(); 4];
            let mut fs = [T::zero(); 4];
            for j in 0..nc {
                let (a, b) = (T::lit(pr[j]), T::lit(ps[j]));
                for q in 0..4 {
                    fr[q] = fr[q] + a * f[j][q];
                    fs[q] = fs[q] + b * f[j][q];
                }
            }
            nu[e * np + i] = rx * fr[0] + sx * fs[0] + ry * fr[1] + sy * fs[1];
            nv[e * np + i] = rx * fr[2] + sx * fs[2] + ry * fr[3] + sy * fs[3];
        }
    }
}

/// Dirichlet velocity at the face cubature points of every velocity-Dirichlet face,
/// laid out `2 * ((3 e + f) Nfc + j) + component`.
pub fn advection_boundary_data(
    t: f64,
    bc: &BcSpec,
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
) -> Vec<f64> {
    let (nfp, nfc) = (re.nfp, re.nfc());
    let mut out = vec![0.0; 2 * 3 * nfc * geom.k];
    for e in 0..geom.k {
        for f in 0..3 {
            let Some(tag) = conn.bc[3 * e + f] else {
                continue;
            };
            if !tag.is_velocity_dirichlet() {
                continue;
            }
            for j in 0..nfc {
                let row = re.interp_fcub.row(f * nfc + j);
                let (mut x, mut y) = (0.0, 0.0);
                for k in 0..nfp {
                    let m = conn.id_m[conn.trace(e, f, k)];
                    x += row[k] * geom.x[m];
                    y += row[k] * geom.y[m];
                }
                let (u, v) = bc.velocity(tag, x, y, t);
                let id = 2 * ((3 * e + f) * nfc + j);
                out[id] = u;
                out[id + 1] = v;
            }
        }
    }
    out
}

/// Subtracts the lifted local Lax-Friedrichs flux from `nu`, `nv`.
///
/// At each face cubature point `lambda = max(|n.Ubar-|, |n.Ubar+|)` and
/// `F*_u = a (nx (ub+ ut+ + ub- ut-) + ny (vb+ ut+ + vb- ut-) + lambda (ut- - ut+))`
/// with `a = J_f / (2 J)`. Velocity-Dirichlet faces take both exterior states from
/// `dirichlet`; other boundary faces reuse the interior trace.
#[allow(clippy::too_many_arguments)]
pub fn advection_surface_kernel<T: KernelScalar>(
    re: &ReferenceElement,
    geom: &Geometry,
    conn: &Connectivity,
    ub: &[T],
    vb: &[T],
    ut: &[T],
    vt: &[T],
    dirichlet: &[f64],
    nu: &mut [T],
    nv: &mut [T],
) {
    let (np, nfp, nfc) = (re.np, re.nfp, re.nfc());
    let half = T::lit(0.5);
    let mut fu = vec![T::zero(); 3 * nfc];
    let mut fv = vec![T::zero(); 3 * nfc];
    for e in 0..geom.k {
        for f in 0..3 {
            let fid = 3 * e + f;
            let (nx, ny) = (T::lit(geom.nx[fid]), T::lit(geom.ny[fid]));
            let a = half * T::lit(geom.fscale[fid]);
            let dir = conn.bc[fid].is_some_and(|t| t.is_velocity_dirichlet());
            for j in 0..nfc {
                let row = re.interp_fcub.row(f * nfc + j);
                let mut m = [T::zero(); 4];
                let mut p = [T::zero(); 4];
                for k in 0..nfp {
                    let t = conn.trace(e, f, k);
                    let (im, ip) = (conn.id_m[t], conn.id_p[t]);
                    let w = T::lit(row[k]);
                    m[0] = m[0] + w * ub[im];
                    m[1] = m[1] + w * vb[im];
                    m[2] = m[2] + w * ut[im];
                    m[3] = m[3] + w * vt[im];
                    p[0] = p[0] + w * ub[ip];
                    p[1] = p[1] + w * vb[ip];
                    p[2] = p[2] + w * ut[ip];
                    p[3] = p[3] + w * vt[ip];
                }
                if dir {
                    let id = 2 * (fid * nfc + j);
                    let (gu, gv) = (T::lit(dirichlet[id]), T::lit(dirichlet[id + 1]));
                    p = [gu, gv, gu, gv];
                }
                let [ubm, vbm, utm, vtm] = m;
                let [ubp, vbp, utp, vtp] = p;
                let lm = nx * ubm + ny * vbm;
                let lp = nx * ubp + ny * vbp;
                let lam = lm.abs().max(lp.abs());
                let l = f * nfc + j;
                fu[l] = a
                    * (nx * (ubp * utp + ubm * utm)
                        + ny * (vbp * utp + vbm * utm)
                        + lam * (utm - utp));
                fv[l] = a
                    * (nx * (ubp * vtp + ubm * vtm)
                        + ny * (vbp * vtp + vbm * vtm)
                        + lam * (vtm - vtp));
            }
        }
        for i in 0..np {
            let row = re.lift_cub.row(i);
            let (mut su, mut sv) = (T::zero(), T::zero());
            for l in 0..3 * nfc {
                let w = T::lit(row[l]);
                su = su + w * fu[l];
                sv = sv + w * fv[l];
            }
            nu[e * np + i] = nu[e * np + i] - su;
            nv[e * np + i] = nv[e * np + i] - sv;
        }
    }
}

/// Volume contribution to `-N(Ubar, Utilde)`.
pub fn advection_volume(
    ubar: &VectorField,
    utilde: &VectorField,
    geom: &Geometry,
    re: &ReferenceElement,
) -> Result<VectorField> {
    ubar.check_matches(geom.k, re.np)?;
    utilde.check_matches(geom.k, re.np)?;
    let mut out = VectorField::zeros(geom.k, re.np);
    advection_volume_kernel(
        re,
        geom,
        &ubar.u.values,
        &ubar.v.values,
        &utilde.u.values,
        &utilde.v.values,
        &mut out.u.values,
        &mut out.v.values,
    );
    Ok(out)
}

/// Adds the surface contribution to `-N(Ubar, Utilde)` into `out`, which holds the
/// volume contribution.
#[allow(clippy::too_many_arguments)]
pub fn advection_surface(
    ubar: &VectorField,
    utilde: &VectorField,
    t: f64,
    bc: &BcSpec,
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
    out: &mut VectorField,
) -> Result<()> {
    ubar.check_matches(geom.k, re.np)?;
    utilde.check_matches(geom.k, re.np)?;
    out.check_matches(geom.k, re.np)?;
    let data = advection_boundary_data(t, bc, geom, conn, re);
    advection_surface_kernel(
        re,
        geom,
        conn,
        &ubar.u.values,
        &ubar.v.values,
        &utilde.u.values,
        &utilde.v.values,
        &data,
        &mut out.u.values,
        &mut out.v.values,
    );
    Ok(())
}

/// `N(Ubar, Utilde)`, the DG approximation of `Ubar . grad Utilde`.
pub fn advection(
    ubar: &VectorField,
    utilde: &VectorField,
    t: f64,
    bc: &BcSpec,
    geom: &Geometry,
    conn: &Connectivity,
    re: &ReferenceElement,
) -> Result<VectorField> {
    let mut out = advection_volume(ubar, utilde, geom, re)?;
    advection_surface(ubar, utilde, t, bc, geom, conn, re, &mut out)?;
    out.scale(-1.0);
    Ok(out)
}
