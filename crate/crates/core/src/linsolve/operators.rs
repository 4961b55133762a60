use super::{LinearOperator, Preconditioner};
use crate::dgops::{local_gradient_kernel, sipdg_kernel, EllipticBc};
use crate::mesh::{Connectivity, Geometry};
use crate::refelem::ReferenceElement;

/// Matrix-free screened-Poisson SIPDG operator `A u`.
pub struct SipdgOperator<'a> {
    pub re: &'a ReferenceElement,
    pub geom: &'a Geometry,
    pub conn: &'a Connectivity,
    pub lambda: f64,
    pub bc: EllipticBc,
}

impl<'a> SipdgOperator<'a> {
    pub fn new(
        re: &'a ReferenceElement,
        geom: &'a Geometry,
        conn: &'a Connectivity,
        lambda: f64,
        bc: EllipticBc,
    ) -> Self {
        Self {
            re,
            geom,
            conn,
            lambda,
            bc,
        }
    }
}

impl LinearOperator for SipdgOperator<'_> {
    fn dim(&self) -> usize {
        self.geom.k * self.re.np
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        let (mut ux, mut uy) = (vec![0.0; n], vec![0.0; n]);
        local_gradient_kernel(self.re, self.geom, x, &mut ux, &mut uy);
        sipdg_kernel(
            self.re,
            self.geom,
            self.conn,
            self.bc,
            self.lambda,
            x,
            &ux,
            &uy,
            None,
            y,
        );
    }
}

/// Per-element `(lambda J M)^{-1}`, the mass-dominated approximation of the
/// screened operator.
pub struct BlockJacobi<'a> {
    re: &'a ReferenceElement,
    scale: Vec<f64>,
}

impl<'a> BlockJacobi<'a> {
    pub fn new(re: &'a ReferenceElement, geom: &Geometry, lambda: f64) -> Self {
        Self {
            re,
            scale: geom.jac.iter().map(|j| 1.0 / (lambda * j)).collect(),
        }
    }
}

impl Preconditioner for BlockJacobi<'_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let np = self.re.np;
        for (e, s) in self.scale.iter().enumerate() {
            let dst = &mut z[e * np..(e + 1) * np];
            self.re.inv_mass.matvec(&r[e * np..(e + 1) * np], dst);
            dst.iter_mut().for_each(|v| *v *= s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{pcg, PcgOptions};
    use super::*;
    use crate::dgops::testutil::*;
    use crate::dgops::{elliptic_apply, mass_apply};
    use crate::mesh::BoundaryTag::*;

    #[test]
    fn operator_matches_field_apply() {
        let s = perturbed(3, 2, 2, [DirichletInflow, NeumannOutflow, Wall, Wall], 4);
        let op = SipdgOperator::new(&s.re, &s.geom, &s.conn, 1.5, EllipticBc::VELOCITY);
        let u = random_field(s.geom.k, s.re.np, 1);
        let r = elliptic_apply(&u, 1.5, EllipticBc::VELOCITY, &s.geom, &s.conn, &s.re).unwrap();
        let mut y = vec![0.0; op.dim()];
        op.apply(&u.values, &mut y);
        assert_eq!(y, r.values);
    }

    struct ScaledMass<'a>(&'a Setup, f64);
    impl LinearOperator for ScaledMass<'_> {
        fn dim(&self) -> usize {
            self.0.geom.k * self.0.re.np
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            let f = crate::dgops::ScalarField::from_values(self.0.geom.k, self.0.re.np, x.to_vec())
                .unwrap();
            let m = mass_apply(&f, &self.0.geom, &self.0.re).unwrap();
            for (yi, mi) in y.iter_mut().zip(&m.values) {
                *yi = self.1 * mi;
            }
        }
    }

    #[test]
    fn exact_for_scaled_mass() {
        let s = perturbed(4, 3, 3, [DirichletInflow; 4], 8);
        let a = ScaledMass(&s, 7.0);
        let p = BlockJacobi::new(&s.re, &s.geom, 7.0);
        let b = random_field(s.geom.k, s.re.np, 2).values;
        let mut x = vec![0.0; b.len()];
        let st = pcg(
            &a,
            &p,
            &b,
            &mut x,
            PcgOptions {
                tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(st.iterations, 1);
    }

    #[test]
    fn block_jacobi_symmetric() {
        let s = perturbed(3, 2, 2, [DirichletInflow; 4], 8);
        let p = BlockJacobi::new(&s.re, &s.geom, 3.0);
        let u = random_field(s.geom.k, s.re.np, 3).values;
        let v = random_field(s.geom.k, s.re.np, 4).values;
        let (mut pu, mut pv) = (vec![0.0; u.len()], vec![0.0; u.len()]);
        p.apply(&u, &mut pu);
        p.apply(&v, &mut pv);
        let a: f64 = pu.iter().zip(&v).map(|(x, y)| x * y).sum();
        let b: f64 = u.iter().zip(&pv).map(|(x, y)| x * y).sum();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }
}
