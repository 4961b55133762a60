use std::time::Instant;

use crate::error::{Error, Result};

/// Symmetric linear operator on `R^n`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Preconditioner `z = M^{-1} r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);

    /// Fixed linear operators allow the classical CG recurrence; nonlinear ones
    /// (Krylov-accelerated cycles) need the flexible variant.
    fn is_linear(&self) -> bool {
        true
    }
}

/// No preconditioning.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Preconditioner for Identity {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Pointwise diagonal scaling.
#[derive(Debug, Clone)]
pub struct DiagonalScaling {
    pub inv_diag: Vec<f64>,
}

impl DiagonalScaling {
    pub fn new(diag: &[f64]) -> Self {
        Self {
            inv_diag: diag
                .iter()
                .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
                .collect(),
        }
    }
}

impl Preconditioner for DiagonalScaling {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), d) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * d;
        }
    }
}

impl LinearOperator for super::SparseMatrix {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
    pub history: Vec<f64>,
    pub precond_applications: usize,
    pub seconds: f64,
    pub converged: bool,
}

/// Options for [`pcg`].
#[derive(Debug, Clone, Copy)]
pub struct PcgOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Project out constants from the right-hand side and iterates (singular
    /// all-Neumann systems).
    pub project_mean: bool,
}

impl Default for PcgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 1000,
            project_mean: false,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(x: &mut [f64]) {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= m);
}

/// Preconditioned conjugate gradients from the initial guess in `x`.
///
/// Stops when `|b - A x| <= tol |b|` or after `max_iter` iterations (reported via
/// `converged = false`). Uses the Polak-Ribiere update when the preconditioner is
/// not linear.
pub fn pcg(
    a: &dyn LinearOperator,
    m: &dyn Preconditioner,
    b: &[f64],
    x: &mut [f64],
    opts: PcgOptions,
) -> Result<SolveStats> {
    let start = Instant::now();
    let n = a.dim();
    if b.len() != n || x.len() != n {
        return Err(Error::Shape {
            expected: n,
            got: if b.len() != n { b.len() } else { x.len() },
        });
    }
    let mut rhs = b.to_vec();
    if opts.project_mean {
        remove_mean(&mut rhs);
        remove_mean(x);
    }
    let bnorm = dot(&rhs, &rhs).sqrt();
    let mut stats = SolveStats::default();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        stats.converged = true;
        stats.history.push(0.0);
        stats.seconds = start.elapsed().as_secs_f64();
        return Ok(stats);
    }
    let mut ax = vec![0.0; n];
    a.apply(x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
    let mut res = dot(&r, &r).sqrt() / bnorm;
    stats.history.push(res);
    let flexible = !m.is_linear();
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut r_old = vec![0.0; n];
    let mut rz_old = 0.0;
    let mut it = 0;
    while res > opts.tol && it < opts.max_iter {
        m.apply(&r, &mut z);
        if opts.project_mean {
            remove_mean(&mut z);
        }
        stats.precond_applications += 1;
        let rz = dot(&r, &z);
        if it == 0 {
            p.copy_from_slice(&z);
        } else {
            let beta = if flexible {
                (rz - dot(&z, &r_old)) / rz_old
            } else {
                rz / rz_old
            };
            for (pi, zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Breakdown {
                iteration: it,
                curvature: pap,
            });
        }
        let alpha = rz / pap;
        if flexible {
            r_old.copy_from_slice(&r);
        }
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rz_old = rz;
        it += 1;
        res = dot(&r, &r).sqrt() / bnorm;
        stats.history.push(res);
    }
    if opts.project_mean {
        remove_mean(x);
    }
    stats.iterations = it;
    stats.relative_residual = res;
    stats.converged = res <= opts.tol;
    stats.seconds = start.elapsed().as_secs_f64();
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::super::SparseMatrix;
    use super::*;

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = SparseMatrix::from_triplets(3, (0..3).map(|i| (i, i, 1.0)).collect()).unwrap();
        let b = [1.0, -2.0, 0.5];
        let mut x = [0.0; 3];
        let s = pcg(&a, &Identity, &b, &mut x, PcgOptions::default()).unwrap();
        assert_eq!(s.iterations, 1);
        assert_eq!(x, b);
    }

    #[test]
    fn two_by_two() {
        let a = SparseMatrix::from_triplets(
            2,
            vec![(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)],
        )
        .unwrap();
        let mut x = [0.0; 2];
        let opts = PcgOptions {
            tol: 1e-14,
            ..Default::default()
        };
        pcg(&a, &Identity, &[1.0, 2.0], &mut x, opts).unwrap();
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-14);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_matrix_breaks_down() {
        let a = SparseMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        let mut x = [0.0; 2];
        match pcg(&a, &Identity, &[0.0, 1.0], &mut x, PcgOptions::default()) {
            Err(Error::Breakdown { iteration, .. }) => assert_eq!(iteration, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn iteration_cap_is_flagged_not_fatal() {
        let n = 40;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, t).unwrap();
        let b = vec![1.0; n];
        let mut x = vec![0.0; n];
        let opts = PcgOptions {
            tol: 1e-12,
            max_iter: 3,
            project_mean: false,
        };
        let s = pcg(&a, &Identity, &b, &mut x, opts).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 3);
    }
}
