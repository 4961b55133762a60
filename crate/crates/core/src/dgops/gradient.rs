use super::{KernelScalar, ScalarField};
use crate::error::Result;
use crate::mesh::Geometry;
use crate::refelem::ReferenceElement;

/// `ux = rx Dr u + sx Ds u`, `uy = ry Dr u + sy Ds u` on every element.
pub fn local_gradient_kernel<T: KernelScalar>(
    re: &ReferenceElement,
    geom: &Geometry,
    u: &[T],
    ux: &mut [T],
    uy: &mut [T],
) {
    let np = re.np;
    for e in 0..geom.k {
        let ue = &u[e * np..(e + 1) * np];
        let (rx, sx) = (T::lit(geom.rx[e]), T::lit(geom.sx[e]));
        let (ry, sy) = (T::lit(geom.ry[e]), T::lit(geom.sy[e]));
        for i in 0..np {
            let (dr, ds) = (re.dr.row(i), re.ds.row(i));
            let mut ur = T::zero();
            let mut us = T::zero();
            for j in 0..np {
                ur = ur + T::lit(dr[j]) * ue[j];
                us = us + T::lit(ds[j]) * ue[j];
            }
            ux[e * np + i] = rx * ur + sx * us;
            uy[e * np + i] = ry * ur + sy * us;
        }
    }
}

/// Element-local physical gradient of a nodal field.
pub fn local_gradient(
    f: &ScalarField,
    geom: &Geometry,
    re: &ReferenceElement,
) -> Result<(ScalarField, ScalarField)> {
    f.check_matches(geom.k, re.np)?;
    let mut fx = ScalarField::zeros(geom.k, re.np);
    let mut fy = ScalarField::zeros(geom.k, re.np);
    local_gradient_kernel(re, geom, &f.values, &mut fx.values, &mut fy.values);
    Ok((fx, fy))
}
