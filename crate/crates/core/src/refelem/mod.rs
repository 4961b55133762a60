//! Reference-triangle nodes, cubature rules and dense operator tables.
//!
//! The reference element is the bi-unit triangle with vertices (-1,-1), (1,-1),
//! (-1,1) and area 2. Nodal operators are built from the orthonormal triangle
//! basis through the generalised Vandermonde matrix. All tables are stored
//! row-major in [`Table`] and never mutated after construction.

mod cubature;
pub mod jacobi;
mod nodes;

pub use cubature::{build_cubature, face_gauss, CubatureRule, MAX_CUBATURE_ORDER};
pub use nodes::{build_node_set, face_parameter, face_point, np_of, NodeSet, MAX_DEGREE};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use jacobi::{grad_vandermonde_2d, vandermonde_1d, vandermonde_2d};

pub const NUM_FACES: usize = 3;

/// Dense row-major matrix used for the elemental operator tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Table {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let mut t = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                t.data[i * m.ncols() + j] = m[(i, j)];
            }
        }
        t
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn transpose(&self) -> Table {
        let mut t = Table::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }
}

/// All degree-`N` reference operators.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub degree: usize,
    pub np: usize,
    pub nfp: usize,
    pub node_set: NodeSet,
    /// Volume cubature used by the advection and error operators.
    pub cubature: CubatureRule,
    /// Face Gauss points (arc parameter on [-1, 1]) and weights.
    pub face_cub_points: Vec<f64>,
    pub face_cub_weights: Vec<f64>,
    /// Arc parameter of each face node, identical on all three faces.
    pub face_node_params: Vec<f64>,

    pub mass: Table,
    pub inv_mass: Table,
    pub dr: Table,
    pub ds: Table,
    /// 1D face mass matrix in the face arc parameter, `Nfp x Nfp`.
    pub face_mass: Table,
    /// Concatenated lift `M^{-1} [E_0 E_1 E_2]`, `Np x 3 Nfp`.
    pub lift: Table,
    /// Volume cubature interpolation, `Nc x Np`.
    pub interp_cub: Table,
    /// Combined differentiation-projection operators, `Np x Nc`.
    pub proj_r: Table,
    pub proj_s: Table,
    /// Face-node to face-cubature interpolation, `3 Nfc x Nfp` (one block per face).
    pub interp_fcub: Table,
    /// Cubature lift, `Np x 3 Nfc`.
    pub lift_cub: Table,

    vandermonde: DMatrix<f64>,
    inv_vandermonde: DMatrix<f64>,
}

impl ReferenceElement {
    pub fn nc(&self) -> usize {
        self.cubature.len()
    }

    pub fn nfc(&self) -> usize {
        self.face_cub_points.len()
    }

    /// Node indices on face `f`, in counterclockwise order.
    pub fn face_nodes(&self, f: usize) -> &[usize] {
        &self.node_set.face_indices[f]
    }

    pub fn vandermonde(&self) -> &DMatrix<f64> {
        &self.vandermonde
    }

    /// Matrix evaluating the nodal basis at arbitrary reference points, `len(points) x Np`.
    pub fn interpolation_matrix(&self, points: &[(f64, f64)]) -> Table {
        let r: Vec<f64> = points.iter().map(|p| p.0).collect();
        let s: Vec<f64> = points.iter().map(|p| p.1).collect();
        let v = vandermonde_2d(self.degree, &r, &s);
        Table::from_dmatrix(&(v * &self.inv_vandermonde))
    }

    /// Basis derivative matrices `(d/dr, d/ds)` at arbitrary reference points.
    pub fn gradient_matrices(&self, points: &[(f64, f64)]) -> (Table, Table) {
        let r: Vec<f64> = points.iter().map(|p| p.0).collect();
        let s: Vec<f64> = points.iter().map(|p| p.1).collect();
        let (vr, vs) = grad_vandermonde_2d(self.degree, &r, &s);
        (
            Table::from_dmatrix(&(vr * &self.inv_vandermonde)),
            Table::from_dmatrix(&(vs * &self.inv_vandermonde)),
        )
    }
}

/// Default cubature order for the advection operators: the integrand
/// `(u (x) u) . grad(l)` has degree `3N - 1`.
pub fn advection_cubature_order(n: usize) -> usize {
    3 * n
}

/// Builds every reference operator for degree `n` with a volume/face cubature of
/// the given order.
pub fn build_reference_element(n: usize, cubature_order: usize) -> Result<ReferenceElement> {
    let node_set = build_node_set(n)?;
    if cubature_order < 2 * n {
        return Err(Error::Config(format!(
            "cubature order {cubature_order} below 2N = {} required for mass exactness",
            2 * n
        )));
    }
    let cubature = build_cubature(cubature_order)?;
    let np = node_set.len();
    let nfp = n + 1;

    let (r, s) = (node_set.r(), node_set.s());
    let v = vandermonde_2d(n, &r, &s);
    let inv_v = v.clone().try_inverse().ok_or_else(|| {
        let sv = v.singular_values();
        Error::Construction(format!(
            "singular Vandermonde for N={n}: singular values in [{:e}, {:e}]",
            sv.min(),
            sv.max()
        ))
    })?;
    let (vr, vs) = grad_vandermonde_2d(n, &r, &s);
    let dr = &vr * &inv_v;
    let ds = &vs * &inv_v;
    let vvt = &v * v.transpose();
    let mass = vvt
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Construction(format!("singular V V^T for N={n}")))?;
    let mass = (&mass + mass.transpose()) * 0.5;
    let inv_mass = (&vvt + vvt.transpose()) * 0.5;

    // face mass and lift
    let t: Vec<f64> = node_set.face_indices[0]
        .iter()
        .map(|&i| face_parameter(0, node_set.coords[i].0, node_set.coords[i].1))
        .collect();
    for f in 1..NUM_FACES {
        for (j, &i) in node_set.face_indices[f].iter().enumerate() {
            let tf = face_parameter(f, node_set.coords[i].0, node_set.coords[i].1);
            if (tf - t[j]).abs() > 1e-12 {
                return Err(Error::Construction(format!(
                    "face {f} node {j} parameter {tf} differs from face 0 ({})",
                    t[j]
                )));
            }
        }
    }
    let v1 = vandermonde_1d(n, &t);
    let face_mass = (&v1 * v1.transpose())
        .try_inverse()
        .ok_or_else(|| Error::Construction("singular face Vandermonde".into()))?;
    let mut emat = DMatrix::<f64>::zeros(np, NUM_FACES * nfp);
    for f in 0..NUM_FACES {
        for (j, &ij) in node_set.face_indices[f].iter().enumerate() {
            for k in 0..nfp {
                emat[(ij, f * nfp + k)] = face_mass[(j, k)];
            }
        }
    }
    let lift = &inv_mass * &emat;

    // volume cubature operators
    let cr: Vec<f64> = cubature.points.iter().map(|p| p.0).collect();
    let cs: Vec<f64> = cubature.points.iter().map(|p| p.1).collect();
    let interp_cub = vandermonde_2d(n, &cr, &cs) * &inv_v;
    let (vrc, vsc) = grad_vandermonde_2d(n, &cr, &cs);
    let (dr_c, ds_c) = (vrc * &inv_v, vsc * &inv_v);
    let nc = cubature.len();
    let mut proj_r = &inv_mass * dr_c.transpose();
    let mut proj_s = &inv_mass * ds_c.transpose();
    for i in 0..nc {
        let w = cubature.weights[i];
        for m in 0..np {
            proj_r[(m, i)] *= w;
            proj_s[(m, i)] *= w;
        }
    }

    // face cubature operators
    let (gt, gw) = face_gauss(cubature_order);
    let nfc = gt.len();
    let inv_v1 = v1
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Construction("singular face Vandermonde".into()))?;
    let block = vandermonde_1d(n, &gt) * inv_v1;
    let mut interp_fcub = DMatrix::<f64>::zeros(NUM_FACES * nfc, nfp);
    let mut fpts = Vec::with_capacity(NUM_FACES * nfc);
    for f in 0..NUM_FACES {
        for j in 0..nfc {
            for k in 0..nfp {
                interp_fcub[(f * nfc + j, k)] = block[(j, k)];
            }
            fpts.push(face_point(f, gt[j]));
        }
    }
    let fr: Vec<f64> = fpts.iter().map(|p| p.0).collect();
    let fs: Vec<f64> = fpts.iter().map(|p| p.1).collect();
    let basis_at_faces = vandermonde_2d(n, &fr, &fs) * &inv_v;
    let mut lift_cub = &inv_mass * basis_at_faces.transpose();
    for f in 0..NUM_FACES {
        for j in 0..nfc {
            for m in 0..np {
                lift_cub[(m, f * nfc + j)] *= gw[j];
            }
        }
    }

    Ok(ReferenceElement {
        degree: n,
        np,
        nfp,
        node_set,
        cubature,
        face_cub_points: gt,
        face_cub_weights: gw,
        face_node_params: t,
        mass: Table::from_dmatrix(&mass),
        inv_mass: Table::from_dmatrix(&inv_mass),
        dr: Table::from_dmatrix(&dr),
        ds: Table::from_dmatrix(&ds),
        face_mass: Table::from_dmatrix(&face_mass),
        lift: Table::from_dmatrix(&lift),
        interp_cub: Table::from_dmatrix(&interp_cub),
        proj_r: Table::from_dmatrix(&proj_r),
        proj_s: Table::from_dmatrix(&proj_s),
        interp_fcub: Table::from_dmatrix(&interp_fcub),
        lift_cub: Table::from_dmatrix(&lift_cub),
        vandermonde: v,
        inv_vandermonde: inv_v,
    })
}

/// Reference element with the default advection cubature order `max(3N, 2N + 1)`.
pub fn build_default(n: usize) -> Result<ReferenceElement> {
    build_reference_element(n, advection_cubature_order(n).max(2 * n + 1))
}
