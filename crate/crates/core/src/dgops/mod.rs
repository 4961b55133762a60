//! Matrix-free elemental DG operators.

mod advection;
mod divgrad;
mod gradient;
mod scalar;
mod sipdg;

use std::fmt;
use std::sync::Arc;

pub use advection::{
    advection, advection_boundary_data, advection_surface, advection_surface_kernel,
    advection_volume, advection_volume_kernel,
};
pub use divgrad::{dg_divergence, dg_gradient, dg_gradient_with};
pub use gradient::{local_gradient, local_gradient_kernel};
pub use scalar::{counted, flops, reset_flops, Counted, KernelScalar};
pub use sipdg::{
    boundary_lift, elliptic_apply, sipdg_apply, sipdg_apply_with, sipdg_kernel, EllipticData,
};

use crate::error::{Error, Result};
use crate::mesh::{
    build_connectivity, compute_geometry, BoundaryTag, Connectivity, Geometry, Mesh,
};
use crate::refelem::{build_default, build_reference_element, ReferenceElement};

/// Reference element, geometry and connectivity of one mesh at one degree.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub re: ReferenceElement,
    pub geom: Geometry,
    pub conn: Connectivity,
}

impl Discretization {
    /// Uses the default advection cubature order.
    pub fn new(mesh: &Mesh, degree: usize) -> Result<Self> {
        Self::from_reference(mesh, build_default(degree)?)
    }

    pub fn with_cubature(mesh: &Mesh, degree: usize, cubature_order: usize) -> Result<Self> {
        Self::from_reference(mesh, build_reference_element(degree, cubature_order)?)
    }

    pub fn from_reference(mesh: &Mesh, re: ReferenceElement) -> Result<Self> {
        let geom = compute_geometry(mesh, &re)?;
        let conn = build_connectivity(mesh, &re)?;
        Ok(Self { re, geom, conn })
    }

    pub fn degree(&self) -> usize {
        self.re.degree
    }

    /// Number of unknowns of a scalar field.
    pub fn dofs(&self) -> usize {
        self.geom.k * self.re.np
    }

    pub fn zeros(&self) -> ScalarField {
        ScalarField::zeros(self.geom.k, self.re.np)
    }
}

/// Nodal coefficients of a scalar field, element-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub k: usize,
    pub np: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(k: usize, np: usize) -> Self {
        Self {
            k,
            np,
            values: vec![0.0; k * np],
        }
    }

    pub fn from_values(k: usize, np: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != k * np {
            return Err(Error::Shape {
                expected: k * np,
                got: values.len(),
            });
        }
        Ok(Self { k, np, values })
    }

    /// Nodal interpolant of `f(x, y)`.
    pub fn interpolate(geom: &Geometry, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            k: geom.k,
            np: geom.np,
            values: geom.x.iter().zip(&geom.y).map(|(&x, &y)| f(x, y)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn element(&self, e: usize) -> &[f64] {
        &self.values[e * self.np..(e + 1) * self.np]
    }

    pub fn check_matches(&self, k: usize, np: usize) -> Result<()> {
        if self.k != k || self.np != np || self.values.len() != k * np {
            return Err(Error::Shape {
                expected: k * np,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|x| *x *= a);
    }

    pub fn dot(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Two-component velocity-like field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub u: ScalarField,
    pub v: ScalarField,
}

impl VectorField {
    pub fn zeros(k: usize, np: usize) -> Self {
        Self {
            u: ScalarField::zeros(k, np),
            v: ScalarField::zeros(k, np),
        }
    }

    pub fn interpolate(geom: &Geometry, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (u, v) = geom.x.iter().zip(&geom.y).map(|(&x, &y)| f(x, y)).unzip();
        Self {
            u: ScalarField {
                k: geom.k,
                np: geom.np,
                values: u,
            },
            v: ScalarField {
                k: geom.k,
                np: geom.np,
                values: v,
            },
        }
    }

    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        self.u.axpy(a, &other.u);
        self.v.axpy(a, &other.v);
    }

    pub fn scale(&mut self, a: f64) {
        self.u.scale(a);
        self.v.scale(a);
    }

    pub fn check_matches(&self, k: usize, np: usize) -> Result<()> {
        self.u.check_matches(k, np)?;
        self.v.check_matches(k, np)
    }
}

pub type VelocityFn = Arc<dyn Fn(f64, f64, f64) -> (f64, f64) + Send + Sync>;
pub type PressureFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
/// Velocity gradient `((du/dx, du/dy), (dv/dx, dv/dy))`.
pub type GradientFn = Arc<dyn Fn(f64, f64, f64) -> [[f64; 2]; 2] + Send + Sync>;

/// Boundary data for the flow problem.
///
/// Walls are always no-slip. Outflow faces carry a pressure value and, optionally,
/// a velocity gradient whose normal component is the viscous Neumann data.
#[derive(Clone)]
pub struct BcSpec {
    pub inflow: VelocityFn,
    pub outflow_pressure: PressureFn,
    pub outflow_gradient: Option<GradientFn>,
}

impl fmt::Debug for BcSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BcSpec")
            .field("outflow_gradient", &self.outflow_gradient.is_some())
            .finish_non_exhaustive()
    }
}

impl BcSpec {
    /// Zero velocity and pressure data everywhere.
    pub fn homogeneous() -> Self {
        Self {
            inflow: Arc::new(|_, _, _| (0.0, 0.0)),
            outflow_pressure: Arc::new(|_, _, _| 0.0),
            outflow_gradient: None,
        }
    }

    pub fn uniform_inflow(u: f64, v: f64) -> Self {
        Self {
            inflow: Arc::new(move |_, _, _| (u, v)),
            ..Self::homogeneous()
        }
    }

    /// Velocity data on a velocity-Dirichlet face.
    pub fn velocity(&self, tag: BoundaryTag, x: f64, y: f64, t: f64) -> (f64, f64) {
        match tag {
            BoundaryTag::Wall => (0.0, 0.0),
            _ => (self.inflow)(x, y, t),
        }
    }

    pub fn pressure(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.outflow_pressure)(x, y, t)
    }
}

/// Elliptic boundary condition kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllipticKind {
    Dirichlet,
    Neumann,
}

/// Which elliptic condition each boundary tag receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllipticBc {
    pub inflow: EllipticKind,
    pub outflow: EllipticKind,
    pub wall: EllipticKind,
}

impl EllipticBc {
    pub const VELOCITY: Self = Self {
        inflow: EllipticKind::Dirichlet,
        outflow: EllipticKind::Neumann,
        wall: EllipticKind::Dirichlet,
    };
    pub const PRESSURE: Self = Self {
        inflow: EllipticKind::Neumann,
        outflow: EllipticKind::Dirichlet,
        wall: EllipticKind::Neumann,
    };
    pub const ALL_NEUMANN: Self = Self {
        inflow: EllipticKind::Neumann,
        outflow: EllipticKind::Neumann,
        wall: EllipticKind::Neumann,
    };
    pub const ALL_DIRICHLET: Self = Self {
        inflow: EllipticKind::Dirichlet,
        outflow: EllipticKind::Dirichlet,
        wall: EllipticKind::Dirichlet,
    };

    pub fn kind(&self, tag: BoundaryTag) -> EllipticKind {
        match tag {
            BoundaryTag::DirichletInflow => self.inflow,
            BoundaryTag::NeumannOutflow => self.outflow,
            BoundaryTag::Wall => self.wall,
        }
    }

    /// True if some boundary face of the mesh is Dirichlet, i.e. constants are not
    /// in the null space.
    pub fn has_dirichlet(&self, conn: &Connectivity) -> bool {
        conn.bc
            .iter()
            .flatten()
            .any(|&t| self.kind(t) == EllipticKind::Dirichlet)
    }
}

/// Evaluates `f(tag, x, y, nx, ny)` at every boundary trace node; interior traces get 0.
pub fn boundary_trace(
    geom: &Geometry,
    conn: &Connectivity,
    f: impl Fn(BoundaryTag, f64, f64, f64, f64) -> f64,
) -> Vec<f64> {
    let mut out = vec![0.0; conn.id_m.len()];
    for e in 0..conn.k {
        for face in 0..3 {
            if let Some(tag) = conn.bc[3 * e + face] {
                let fid = 3 * e + face;
                for j in 0..conn.nfp {
                    let t = conn.trace(e, face, j);
                    let n = conn.id_m[t];
                    out[t] = f(tag, geom.x[n], geom.y[n], geom.nx[fid], geom.ny[fid]);
                }
            }
        }
    }
    out
}

/// Per element `J M f`.
pub fn mass_apply(f: &ScalarField, geom: &Geometry, re: &ReferenceElement) -> Result<ScalarField> {
    f.check_matches(geom.k, re.np)?;
    let mut out = ScalarField::zeros(geom.k, re.np);
    for e in 0..geom.k {
        let dst = &mut out.values[e * re.np..(e + 1) * re.np];
        re.mass.matvec(f.element(e), dst);
        dst.iter_mut().for_each(|x| *x *= geom.jac[e]);
    }
    Ok(out)
}

/// Per element `M^{-1} f / J`.
pub fn inv_mass_apply(
    f: &ScalarField,
    geom: &Geometry,
    re: &ReferenceElement,
) -> Result<ScalarField> {
    f.check_matches(geom.k, re.np)?;
    let mut out = ScalarField::zeros(geom.k, re.np);
    for e in 0..geom.k {
        let dst = &mut out.values[e * re.np..(e + 1) * re.np];
        re.inv_mass.matvec(f.element(e), dst);
        dst.iter_mut().for_each(|x| *x /= geom.jac[e]);
    }
    Ok(out)
}

/// Lifts per-trace face data into the element: `sum_f (J_f / J) L_f g_f`.
pub(crate) fn lift_faces(
    re: &ReferenceElement,
    geom: &Geometry,
    e: usize,
    g: &[f64],
    out: &mut [f64],
) {
    let nfp = re.nfp;
    for (i, o) in out.iter_mut().enumerate() {
        let row = re.lift.row(i);
        let mut acc = 0.0;
        for f in 0..3 {
            let s = geom.fscale[3 * e + f];
            let mut part = 0.0;
            for j in 0..nfp {
                part += row[f * nfp + j] * g[f * nfp + j];
            }
            acc += s * part;
        }
        *o = acc;
    }
}
