use crate::dgops::VectorField;
use crate::error::Result;

const RK4A: [f64; 5] = [
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
];
const RK4B: [f64; 5] = [
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
];
const RK4C: [f64; 5] = [
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363183890.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
];

/// One five-stage, fourth-order, two-register low-storage Runge-Kutta step of
/// `y' = rhs(y, t)`.
pub fn lserk_step(
    mut rhs: impl FnMut(&VectorField, f64) -> Result<VectorField>,
    y: &mut VectorField,
    t: f64,
    dt: f64,
) -> Result<()> {
    let mut res = VectorField::zeros(y.u.k, y.u.np);
    for i in 0..5 {
        let k = rhs(y, t + RK4C[i] * dt)?;
        res.scale(RK4A[i]);
        res.axpy(dt, &k);
        y.axpy(RK4B[i], &res);
    }
    Ok(())
}
