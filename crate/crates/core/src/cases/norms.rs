use crate::dgops::{Discretization, ScalarField};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::refelem::build_cubature;

/// L2 error of a nodal field against an exact function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorm {
    pub value: f64,
    /// False when the exact norm vanishes and `value` is the absolute error.
    pub relative: bool,
}

/// `sqrt(sum_e sum_q w_q J_e (f_h - f)^2) / sqrt(int f^2)` with a cubature of order
/// `2N + 2`; the absolute norm when `int f^2` vanishes.
pub fn l2_error(
    field: &ScalarField,
    exact: impl Fn(f64, f64) -> f64,
    disc: &Discretization,
) -> Result<ErrorNorm> {
    let (re, geom) = (&disc.re, &disc.geom);
    field.check_matches(geom.k, re.np)?;
    let rule = build_cubature(2 * re.degree + 2)?;
    let interp = re.interpolation_matrix(&rule.points);
    let nq = rule.len();
    let (mut fh, mut xq, mut yq) = (vec![0.0; nq], vec![0.0; nq], vec![0.0; nq]);
    let (mut err, mut norm) = (0.0, 0.0);
    for e in 0..geom.k {
        let r = e * re.np..(e + 1) * re.np;
        interp.matvec(&field.values[r.clone()], &mut fh);
        interp.matvec(&geom.x[r.clone()], &mut xq);
        interp.matvec(&geom.y[r], &mut yq);
        for q in 0..nq {
            let f = exact(xq[q], yq[q]);
            let w = rule.weights[q] * geom.jac[e];
            err += w * (fh[q] - f).powi(2);
            norm += w * f * f;
        }
    }
    let err = err.sqrt();
    let norm = norm.sqrt();
    Ok(if norm > f64::MIN_POSITIVE.sqrt() {
        ErrorNorm {
            value: err / norm,
            relative: true,
        }
    } else {
        ErrorNorm {
            value: err,
            relative: false,
        }
    })
}

/// Evaluates nodal fields at a fixed physical point.
#[derive(Debug, Clone)]
pub struct Probe {
    pub element: usize,
    pub weights: Vec<f64>,
}

impl Probe {
    /// Locates `(x, y)` in `mesh`; errors if no element contains it.
    pub fn new(mesh: &Mesh, disc: &Discretization, x: f64, y: f64) -> Result<Self> {
        for (e, t) in mesh.triangles.iter().enumerate() {
            let (a, b, c) = (
                mesh.vertices[t[0]],
                mesh.vertices[t[1]],
                mesh.vertices[t[2]],
            );
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            let lb = ((x - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (y - a[1])) / det;
            let lc = ((b[0] - a[0]) * (y - a[1]) - (x - a[0]) * (b[1] - a[1])) / det;
            let la = 1.0 - lb - lc;
            let tol = -1e-12;
            if la >= tol && lb >= tol && lc >= tol {
                let (r, s) = (2.0 * lb - 1.0, 2.0 * lc - 1.0);
                let w = disc.re.interpolation_matrix(&[(r, s)]);
                return Ok(Self {
                    element: e,
                    weights: w.row(0).to_vec(),
                });
            }
        }
        Err(Error::Config(format!(
            "probe point ({x}, {y}) lies outside the mesh"
        )))
    }

    pub fn eval(&self, f: &ScalarField) -> f64 {
        f.element(self.element)
            .iter()
            .zip(&self.weights)
            .map(|(a, b)| a * b)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgops::mass_apply;
    use crate::mesh::BoundaryTag::Wall;
    use rand::{Rng, SeedableRng};

    fn disc(n: usize) -> (Mesh, Discretization) {
        let mesh = Mesh::generate_structured(3, 4, [-0.5, 0.5, -0.5, 0.5], [Wall; 4]).unwrap();
        let d = Discretization::new(&mesh, n).unwrap();
        (mesh, d)
    }

    #[test]
    fn polynomial_interpolant_is_exact() {
        let (_, d) = disc(3);
        let f = |x: f64, y: f64| 1.0 + x * x * y - 2.0 * y * y * y + x;
        let fh = ScalarField::interpolate(&d.geom, f);
        let e = l2_error(&fh, f, &d).unwrap();
        assert!(e.relative && e.value < 1e-12, "{e:?}");
    }

    #[test]
    fn constant_offset() {
        let (_, d) = disc(2);
        let f = |x: f64, y: f64| x + 2.0 * y;
        let c = 0.3;
        let fh = ScalarField::interpolate(&d.geom, |x, y| f(x, y) + c);
        // int_{[-1/2,1/2]^2} (x + 2y)^2 = 1/12 + 4/12
        let expected = c * 1.0 / (5.0f64 / 12.0).sqrt();
        let e = l2_error(&fh, f, &d).unwrap();
        assert!((e.value - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn zero_exact_gives_absolute_norm() {
        let (_, d) = disc(2);
        let fh = ScalarField::interpolate(&d.geom, |_, _| 0.5);
        let e = l2_error(&fh, |_, _| 0.0, &d).unwrap();
        assert!(!e.relative);
        assert!((e.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn recovers_random_perturbation() {
        let (_, d) = disc(3);
        let f = |x: f64, y: f64| 1.0 + x - y * y;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let g = ScalarField {
            k: d.geom.k,
            np: d.re.np,
            values: (0..d.dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let delta = 1e-3;
        let mut fh = ScalarField::interpolate(&d.geom, f);
        fh.axpy(delta, &g);
        // oracle: ||g||^2 = g^T M g and ||f||^2 from the exact polynomial integral
        let g_norm = mass_apply(&g, &d.geom, &d.re).unwrap().dot(&g).sqrt();
        let f_norm = (1.0 + 1.0 / 12.0 - 2.0 / 12.0 + 1.0 / 80.0f64).sqrt();
        let expected = delta * g_norm / f_norm;
        let e = l2_error(&fh, f, &d).unwrap();
        assert!(
            (e.value - expected).abs() < 0.01 * expected,
            "{} vs {expected}",
            e.value
        );
    }

    #[test]
    fn probe_interpolates_polynomials() {
        let (mesh, d) = disc(3);
        let f = ScalarField::interpolate(&d.geom, |x, y| x * x * x - x * y + 0.5);
        for (x, y) in [(0.1, 0.2), (-0.49, 0.33), (0.0, 0.0), (0.5, -0.5)] {
            let p = Probe::new(&mesh, &d, x, y).unwrap();
            assert!((p.eval(&f) - (x * x * x - x * y + 0.5)).abs() < 1e-12);
        }
        assert!(Probe::new(&mesh, &d, 0.7, 0.0).is_err());
    }
}
