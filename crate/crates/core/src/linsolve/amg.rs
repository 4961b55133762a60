use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LinearOperator, SparseMatrix};
use crate::error::{Error, Result};

/// Aggregation map: `agg[i]` is the coarse index of fine unknown `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregation {
    pub agg: Vec<usize>,
    pub n_coarse: usize,
}

/// Greedy maximal-independent-set aggregation on the strength graph
/// `|a_ij| > theta sqrt(a_ii a_jj)`.
///
/// A node whose strong neighbours are all unaggregated seeds an aggregate with
/// them; remaining nodes join the aggregate of their strongest aggregated
/// neighbour, or form a singleton if they have none.
pub fn aggregate(a: &SparseMatrix, theta: f64) -> Result<Aggregation> {
    if a.n == 0 {
        return Err(Error::Construction(
            "cannot aggregate an empty matrix".into(),
        ));
    }
    let d = a.diagonal();
    let links: Vec<Vec<(usize, f64)>> = (0..a.n)
        .map(|i| {
            let (c, v) = a.row(i);
            c.iter()
                .zip(v)
                .filter(|&(&j, &x)| j != i && x.abs() > theta * (d[i] * d[j]).abs().sqrt())
                .map(|(&j, &x)| (j, x.abs()))
                .collect()
        })
        .collect();
    let strong = |i: usize| links[i].iter().copied();
    const NONE: usize = usize::MAX;
    let mut agg = vec![NONE; a.n];
    let mut nc = 0;
    for i in 0..a.n {
        if agg[i] != NONE || strong(i).next().is_none() {
            continue;
        }
        if strong(i).all(|(j, _)| agg[j] == NONE) {
            agg[i] = nc;
            for (j, _) in strong(i) {
                agg[j] = nc;
            }
            nc += 1;
        }
    }
    let seeded = agg.clone();
    for i in 0..a.n {
        if agg[i] != NONE {
            continue;
        }
        let best = strong(i).filter(|&(j, _)| seeded[j] != NONE).fold(
            None,
            |b: Option<(usize, f64)>, (j, w)| match b {
                Some((_, bw)) if bw >= w => b,
                _ => Some((j, w)),
            },
        );
        agg[i] = match best {
            Some((j, _)) => seeded[j],
            None => {
                nc += 1;
                nc - 1
            }
        };
    }
    Ok(Aggregation { agg, n_coarse: nc })
}

/// Estimate of the largest eigenvalue of `D^{-1} A` from the Rayleigh quotient
/// `v^T A v / v^T D v` after `iters` power iterations from a seeded random start.
pub fn estimate_max_eig(a: &dyn LinearOperator, inv_diag: &[f64], iters: usize, seed: u64) -> f64 {
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut av = vec![0.0; n];
    let mut lam = 0.0;
    for _ in 0..iters.max(1) {
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv == 0.0 {
            break;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        a.apply(&v, &mut av);
        let vav: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
        let vdv: f64 = v.iter().zip(inv_diag).map(|(x, d)| x * x / d).sum();
        lam = vav / vdv;
        for ((x, y), d) in v.iter_mut().zip(&av).zip(inv_diag) {
            *x = y * d;
        }
    }
    lam
}

/// Diagonally scaled Chebyshev smoother on `[eig_hi / 10, 1.1 eig_hi]`:
/// `z = p(D^{-1} A) D^{-1} r` with residual polynomial of the given degree.
#[derive(Debug, Clone)]
pub struct Chebyshev {
    pub degree: usize,
    pub lower: f64,
    pub upper: f64,
    pub inv_diag: Vec<f64>,
}

impl Chebyshev {
    pub fn new(degree: usize, eig_hi: f64, inv_diag: Vec<f64>) -> Result<Self> {
        if !(eig_hi > 0.0) {
            return Err(Error::Construction(format!(
                "Chebyshev smoother needs a positive eigenvalue bound, got {eig_hi}"
            )));
        }
        if degree == 0 {
            return Err(Error::Config("Chebyshev degree must be >= 1".into()));
        }
        Ok(Self {
            degree,
            lower: eig_hi / 10.0,
            upper: 1.1 * eig_hi,
            inv_diag,
        })
    }

    /// `z` approximates `A^{-1} r` from a zero initial guess.
    pub fn apply(&self, a: &dyn LinearOperator, r: &[f64], z: &mut [f64]) {
        let n = r.len();
        let theta = 0.5 * (self.upper + self.lower);
        let delta = 0.5 * (self.upper - self.lower);
        let sigma = theta / delta;
        let mut rho = 1.0 / sigma;
        let mut res = r.to_vec();
        let mut d: Vec<f64> = r
            .iter()
            .zip(&self.inv_diag)
            .map(|(x, di)| x * di / theta)
            .collect();
        z.copy_from_slice(&d);
        let mut ad = vec![0.0; n];
        for _ in 1..self.degree {
            a.apply(&d, &mut ad);
            res.iter_mut().zip(&ad).for_each(|(x, y)| *x -= y);
            let rho_new = 1.0 / (2.0 * sigma - rho);
            for i in 0..n {
                d[i] = rho_new * rho * d[i] + 2.0 * rho_new / delta * self.inv_diag[i] * res[i];
                z[i] += d[i];
            }
            rho = rho_new;
        }
    }
}

pub(crate) fn inverse_diagonal(d: &[f64]) -> Vec<f64> {
    d.iter()
        .map(|&x| if x.abs() > 0.0 { 1.0 / x } else { 1.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};
    use proptest::prelude::*;

    fn path(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, t).unwrap()
    }

    #[test]
    fn diagonal_matrix_gives_singletons() {
        let a = SparseMatrix::from_triplets(5, (0..5).map(|i| (i, i, 1.0 + i as f64)).collect())
            .unwrap();
        let g = aggregate(&a, 0.08).unwrap();
        assert_eq!(g.n_coarse, 5);
        assert_eq!(g.agg, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn path_graph_aggregates() {
        for n in [2, 3, 7, 10, 32, 101] {
            let g = aggregate(&path(n), 0.08).unwrap();
            let mut sizes = vec![0; g.n_coarse];
            g.agg.iter().for_each(|&c| sizes[c] += 1);
            assert!(
                sizes.iter().all(|&s| (2..=3).contains(&s)),
                "{n}: {sizes:?}"
            );
            let (lo, hi) = (n as f64 / 3.0, n as f64 / 2.0);
            assert!(
                g.n_coarse as f64 >= lo.floor() && g.n_coarse as f64 <= hi,
                "{n}"
            );
        }
    }

    #[test]
    fn empty_matrix_rejected() {
        let a = SparseMatrix::from_triplets(0, vec![]).unwrap();
        assert!(aggregate(&a, 0.08).is_err());
    }

    proptest! {
        #[test]
        fn aggregation_is_a_coarsening_partition(
            n in 2usize..60,
            extra in proptest::collection::vec((0usize..60, 0usize..60), 0..40),
        ) {
            let mut t: Vec<_> = (0..n).map(|i| (i, i, 4.0)).collect();
            for i in 0..n - 1 {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
            for (i, j) in extra {
                let (i, j) = (i % n, j % n);
                if i != j {
                    t.push((i, j, -0.5));
                    t.push((j, i, -0.5));
                }
            }
            let a = SparseMatrix::from_triplets(n, t).unwrap();
            let g = aggregate(&a, 0.08).unwrap();
            prop_assert!(g.n_coarse < n);
            prop_assert!(g.agg.iter().all(|&c| c < g.n_coarse));
            let mut hit = vec![false; g.n_coarse];
            g.agg.iter().for_each(|&c| hit[c] = true);
            prop_assert!(hit.iter().all(|&h| h));
            let c = a.galerkin(&g.agg, g.n_coarse);
            prop_assert!(c.symmetry_defect() <= 1e-12);
        }
    }

    #[test]
    fn chebyshev_identity_contracts() {
        let a = SparseMatrix::from_triplets(3, (0..3).map(|i| (i, i, 1.0)).collect()).unwrap();
        let s = Chebyshev::new(2, 1.0, vec![1.0; 3]).unwrap();
        let r = [1.0, -2.0, 3.0];
        let mut z = [0.0; 3];
        s.apply(&a, &r, &mut z);
        // error after smoothing is (I - z) for A = I; residual polynomial at 1
        let (a_, b_) = (0.1, 1.1);
        let (th, de) = ((a_ + b_) / 2.0, (b_ - a_) / 2.0);
        let t2 = |x: f64| 2.0 * x * x - 1.0;
        let factor = t2((th - 1.0) / de) / t2(th / de);
        for i in 0..3 {
            assert!(((r[i] - z[i]) - factor * r[i]).abs() < 1e-14);
        }
        assert!(factor.abs() < 1.0);
    }

    #[test]
    fn chebyshev_damps_high_frequencies() {
        let n = 32;
        let a = path(n);
        let dense = a.to_dense();
        let eig = SymmetricEigen::new(dense.clone());
        let imax = eig.eigenvalues.imax();
        let mode: Vec<f64> = eig.eigenvectors.column(imax).iter().copied().collect();
        let inv_diag = vec![0.5; n];
        let exact = eig.eigenvalues[imax] / 2.0;
        let est = estimate_max_eig(&a, &inv_diag, 20, 7);
        assert!(
            est <= exact + 1e-12 && est >= 0.8 * exact,
            "{est} vs {exact}"
        );
        let s = Chebyshev::new(2, exact, inv_diag).unwrap();
        // one sweep on A e = A mode: new error = mode - S A mode
        let mut am = vec![0.0; n];
        a.matvec(&mode, &mut am);
        let mut z = vec![0.0; n];
        s.apply(&a, &am, &mut z);
        let err: f64 = mode
            .iter()
            .zip(&z)
            .map(|(m, zi)| (m - zi).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(1.0 / err >= 5.0, "damping {}", 1.0 / err);
    }

    #[test]
    fn chebyshev_is_linear_and_symmetric() {
        let n = 20;
        let a = path(n);
        let s = Chebyshev::new(2, estimate_max_eig(&a, &[0.5; 20], 20, 1), vec![0.5; n]).unwrap();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let mut z = vec![0.0; n];
                s.apply(&a, &e, &mut z);
                z
            })
            .collect();
        let m = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
        assert!((&m - m.transpose()).amax() < 1e-14);
    }

    #[test]
    fn nonpositive_bound_rejected() {
        assert!(Chebyshev::new(2, 0.0, vec![1.0]).is_err());
        assert!(Chebyshev::new(2, -1.0, vec![1.0]).is_err());
    }
}
