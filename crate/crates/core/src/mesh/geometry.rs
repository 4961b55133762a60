use super::{face_vertices, FaceLink, Mesh};
use crate::error::{Error, Result};
use crate::refelem::ReferenceElement;

/// Per-element affine factors and per-face normals, surface Jacobians and penalties.
///
/// Face quantities are indexed `3 * e + f`.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub degree: usize,
    pub k: usize,
    pub np: usize,
    pub rx: Vec<f64>,
    pub sx: Vec<f64>,
    pub ry: Vec<f64>,
    pub sy: Vec<f64>,
    pub jac: Vec<f64>,
    pub nx: Vec<f64>,
    pub ny: Vec<f64>,
    /// Face length over the reference face length 2.
    pub sj: Vec<f64>,
    /// `sJ / J`.
    pub fscale: Vec<f64>,
    /// Interior-penalty parameter, identical on both sides of interior faces.
    pub tau: Vec<f64>,
    /// Characteristic length `|E| / |face|`.
    pub h: Vec<f64>,
    /// Physical node coordinates, element-major.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Geometry {
    pub fn face(&self, e: usize, f: usize) -> usize {
        3 * e + f
    }

    pub fn total_area(&self) -> f64 {
        self.jac.iter().map(|j| 2.0 * j).sum()
    }

    /// Smallest characteristic length of element `e`.
    pub fn h_min(&self, e: usize) -> f64 {
        self.h[3 * e..3 * e + 3]
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Physical coordinates of the reference nodes mapped to every element.
pub fn physical_nodes(mesh: &Mesh, re: &ReferenceElement) -> (Vec<f64>, Vec<f64>) {
    let np = re.np;
    let mut x = vec![0.0; mesh.num_elements() * np];
    let mut y = vec![0.0; mesh.num_elements() * np];
    for (e, t) in mesh.triangles.iter().enumerate() {
        let (a, b, c) = (
            mesh.vertices[t[0]],
            mesh.vertices[t[1]],
            mesh.vertices[t[2]],
        );
        for (n, &(r, s)) in re.node_set.coords.iter().enumerate() {
            let (la, lb, lc) = (-(r + s) / 2.0, (1.0 + r) / 2.0, (1.0 + s) / 2.0);
            x[e * np + n] = la * a[0] + lb * b[0] + lc * c[0];
            y[e * np + n] = la * a[1] + lb * b[1] + lc * c[1];
        }
    }
    (x, y)
}

/// Penalty `tau = Np * max(1/h+, 1/h-)` with `Np = (N+1)(N+2)/2`.
pub fn penalty(degree: usize, h_minus: f64, h_plus: f64) -> f64 {
    let np = ((degree + 1) * (degree + 2)) as f64 / 2.0;
    np * (1.0 / h_minus).max(1.0 / h_plus)
}

/// Computes affine factors, normals, surface Jacobians and penalties.
pub fn compute_geometry(mesh: &Mesh, re: &ReferenceElement) -> Result<Geometry> {
    let k = mesh.num_elements();
    let mut g = Geometry {
        degree: re.degree,
        k,
        np: re.np,
        rx: vec![0.0; k],
        sx: vec![0.0; k],
        ry: vec![0.0; k],
        sy: vec![0.0; k],
        jac: vec![0.0; k],
        nx: vec![0.0; 3 * k],
        ny: vec![0.0; 3 * k],
        sj: vec![0.0; 3 * k],
        fscale: vec![0.0; 3 * k],
        tau: vec![0.0; 3 * k],
        h: vec![0.0; 3 * k],
        x: Vec::new(),
        y: Vec::new(),
    };
    for (e, t) in mesh.triangles.iter().enumerate() {
        let (a, b, c) = (
            mesh.vertices[t[0]],
            mesh.vertices[t[1]],
            mesh.vertices[t[2]],
        );
        let (xr, xs) = ((b[0] - a[0]) / 2.0, (c[0] - a[0]) / 2.0);
        let (yr, ys) = ((b[1] - a[1]) / 2.0, (c[1] - a[1]) / 2.0);
        let j = xr * ys - xs * yr;
        if j <= 0.0 {
            return Err(Error::Geometry {
                element: e,
                jacobian: j,
            });
        }
        g.jac[e] = j;
        g.rx[e] = ys / j;
        g.sx[e] = -yr / j;
        g.ry[e] = -xs / j;
        g.sy[e] = xr / j;
        let area = 2.0 * j;
        for f in 0..3 {
            let (p, q) = face_vertices(f);
            let (pa, pb) = (mesh.vertices[t[p]], mesh.vertices[t[q]]);
            let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
            let len = dx.hypot(dy);
            let id = 3 * e + f;
            g.nx[id] = dy / len;
            g.ny[id] = -dx / len;
            g.sj[id] = len / 2.0;
            g.fscale[id] = g.sj[id] / j;
            g.h[id] = area / len;
        }
    }
    let links = mesh.face_neighbors();
    for e in 0..k {
        for f in 0..3 {
            let id = 3 * e + f;
            let h_plus = match links[e][f] {
                FaceLink::Interior { element, face } => g.h[3 * element + face],
                FaceLink::Boundary(_) => g.h[id],
            };
            g.tau[id] = penalty(re.degree, g.h[id], h_plus);
        }
    }
    let (x, y) = physical_nodes(mesh, re);
    g.x = x;
    g.y = y;
    Ok(g)
}
