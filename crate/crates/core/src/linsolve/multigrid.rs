use nalgebra::{DMatrix, SymmetricEigen};

use super::amg::{aggregate, estimate_max_eig, inverse_diagonal, Chebyshev};
use super::assemble::{assemble_sipdg, sipdg_diagonal};
use super::{LinearOperator, Preconditioner, SipdgOperator, SparseMatrix};
use crate::dgops::{Discretization, EllipticBc};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::refelem::{ReferenceElement, Table};

/// Multigrid construction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgConfig {
    /// Strength-of-connection threshold for aggregation.
    pub theta: f64,
    /// Algebraic coarsening stops once a level has at most this many unknowns.
    pub coarse_size: usize,
    pub cheb_degree: usize,
    pub power_iters: usize,
    pub seed: u64,
    /// Number of finest levels whose coarse correction is Krylov-accelerated.
    pub k_cycle_levels: usize,
}

impl Default for MgConfig {
    fn default() -> Self {
        Self {
            theta: 0.08,
            coarse_size: 200,
            cheb_degree: 2,
            power_iters: 20,
            seed: 17,
            k_cycle_levels: 2,
        }
    }
}

/// How a level solves its coarse-grid problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cycle {
    V,
    K,
}

/// Degrees `N, floor(N/2), ..., 1`.
pub fn p_schedule(n: usize) -> Vec<usize> {
    let mut d = vec![n.max(1)];
    while *d.last().unwrap() > 1 {
        let next = (d.last().unwrap() / 2).max(1);
        d.push(next);
    }
    d
}

/// Element-local interpolation from degree-`coarse` to degree-`fine` nodes,
/// `Np_fine x Np_coarse`; restriction is its transpose.
#[derive(Debug, Clone)]
pub struct PTransfer {
    pub prolong: Table,
    pub restrict: Table,
}

pub fn build_p_transfers(fine: &ReferenceElement, coarse: &ReferenceElement) -> Result<PTransfer> {
    if coarse.degree >= fine.degree {
        return Err(Error::Config(format!(
            "coarse degree {} must be below fine degree {}",
            coarse.degree, fine.degree
        )));
    }
    let prolong = coarse.interpolation_matrix(&fine.node_set.coords);
    let restrict = prolong.transpose();
    Ok(PTransfer { prolong, restrict })
}

impl PTransfer {
    fn apply_blocks(t: &Table, x: &[f64], y: &mut [f64]) {
        let k = x.len() / t.cols;
        for e in 0..k {
            t.matvec(
                &x[e * t.cols..(e + 1) * t.cols],
                &mut y[e * t.rows..(e + 1) * t.rows],
            );
        }
    }

    pub fn prolongate(&self, xc: &[f64], xf: &mut [f64]) {
        Self::apply_blocks(&self.prolong, xc, xf)
    }

    pub fn restrict(&self, rf: &[f64], rc: &mut [f64]) {
        Self::apply_blocks(&self.restrict, rf, rc)
    }
}

enum LevelOp {
    MatrixFree { disc: Box<Discretization> },
    Sparse(SparseMatrix),
}

enum Transfer {
    P(PTransfer),
    Aggregates { agg: Vec<usize> },
}

struct Level {
    op: LevelOp,
    lambda: f64,
    bc: EllipticBc,
    smoother: Chebyshev,
    transfer: Option<Transfer>,
    cycle: Cycle,
}

impl Level {
    fn dim(&self) -> usize {
        match &self.op {
            LevelOp::MatrixFree { disc } => disc.dofs(),
            LevelOp::Sparse(a) => a.n,
        }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        match &self.op {
            LevelOp::MatrixFree { disc } => {
                SipdgOperator::new(&disc.re, &disc.geom, &disc.conn, self.lambda, self.bc)
                    .apply(x, y)
            }
            LevelOp::Sparse(a) => a.matvec(x, y),
        }
    }
}

struct LevelAsOp<'a>(&'a Level);

impl LinearOperator for LevelAsOp<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply(x, y)
    }
}

enum CoarseSolver {
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    PseudoInverse(DMatrix<f64>),
}

impl CoarseSolver {
    fn new(a: &SparseMatrix, singular: bool) -> Self {
        let dense = a.to_dense();
        if !singular {
            if let Some(c) = dense.clone().cholesky() {
                return CoarseSolver::Cholesky(c);
            }
        }
        let eig = SymmetricEigen::new(dense);
        let cut = eig.eigenvalues.amax() * 1e-10;
        let n = a.n;
        let mut pinv = DMatrix::zeros(n, n);
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l.abs() > cut {
                let v = eig.eigenvectors.column(k);
                pinv += (v * v.transpose()) / l;
            }
        }
        CoarseSolver::PseudoInverse(pinv)
    }

    fn solve(&self, b: &[f64], x: &mut [f64]) {
        let b = nalgebra::DVector::from_column_slice(b);
        let sol = match self {
            CoarseSolver::Cholesky(c) => c.solve(&b),
            CoarseSolver::PseudoInverse(p) => p * b,
        };
        x.copy_from_slice(sol.as_slice());
    }

    fn memory_bytes(&self, n: usize) -> usize {
        8 * n * n
    }
}

/// Level summary for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelInfo {
    /// Polynomial degree for matrix-free levels, `None` for algebraic levels.
    pub degree: Option<usize>,
    pub dofs: usize,
    pub nnz: usize,
    pub cycle: Cycle,
    pub eig_hi: f64,
}

/// Ordered multigrid levels (matrix-free p-levels, then algebraic levels) with a
/// dense coarsest solve.
pub struct MultigridHierarchy {
    levels: Vec<Level>,
    coarse: CoarseSolver,
    elements: usize,
}

fn sparse_level(a: SparseMatrix, lambda: f64, bc: EllipticBc, cfg: &MgConfig) -> Result<Level> {
    let inv_diag = inverse_diagonal(&a.diagonal());
    let eig = estimate_max_eig(&a, &inv_diag, cfg.power_iters, cfg.seed);
    Ok(Level {
        smoother: Chebyshev::new(cfg.cheb_degree, eig, inv_diag)?,
        op: LevelOp::Sparse(a),
        lambda,
        bc,
        transfer: None,
        cycle: Cycle::V,
    })
}

impl MultigridHierarchy {
    /// Hybrid hierarchy: matrix-free p-levels from degree `degree` down to 1,
    /// then aggregation AMG on the assembled degree-1 matrix.
    pub fn pmg_amg(
        mesh: &Mesh,
        degree: usize,
        lambda: f64,
        bc: EllipticBc,
        cfg: MgConfig,
    ) -> Result<Self> {
        let degrees = p_schedule(degree);
        let discs = degrees
            .iter()
            .map(|&d| Discretization::with_cubature(mesh, d, 2 * d + 1))
            .collect::<Result<Vec<_>>>()?;
        let singular = lambda == 0.0 && !bc.has_dirichlet(&discs[0].conn);
        let mut levels = Vec::new();
        let mut discs = discs.into_iter().peekable();
        while let Some(disc) = discs.next() {
            if disc.degree() == 1 {
                let a = assemble_sipdg(&disc.re, &disc.geom, &disc.conn, lambda, bc)?;
                return Self::finish(levels, a, lambda, bc, cfg, singular, mesh.num_elements());
            }
            let coarse = discs.peek().expect("schedule ends at degree 1");
            let transfer = build_p_transfers(&disc.re, &coarse.re)?;
            let inv_diag = inverse_diagonal(&sipdg_diagonal(
                &disc.re, &disc.geom, &disc.conn, lambda, bc,
            ));
            let op = SipdgOperator::new(&disc.re, &disc.geom, &disc.conn, lambda, bc);
            let eig = estimate_max_eig(&op, &inv_diag, cfg.power_iters, cfg.seed);
            levels.push(Level {
                smoother: Chebyshev::new(cfg.cheb_degree, eig, inv_diag)?,
                op: LevelOp::MatrixFree {
                    disc: Box::new(disc),
                },
                lambda,
                bc,
                transfer: Some(Transfer::P(transfer)),
                cycle: Cycle::V,
            });
        }
        unreachable!("schedule ends at degree 1")
    }

    /// Aggregation AMG on an assembled matrix.
    pub fn amg(a: SparseMatrix, singular: bool, cfg: MgConfig, elements: usize) -> Result<Self> {
        Self::finish(
            Vec::new(),
            a,
            0.0,
            EllipticBc::ALL_NEUMANN,
            cfg,
            singular,
            elements,
        )
    }

    fn finish(
        mut levels: Vec<Level>,
        mut a: SparseMatrix,
        lambda: f64,
        bc: EllipticBc,
        cfg: MgConfig,
        singular: bool,
        elements: usize,
    ) -> Result<Self> {
        if cfg.coarse_size == 0 {
            return Err(Error::Config("coarse size must be positive".into()));
        }
        while a.n > cfg.coarse_size {
            let g = aggregate(&a, cfg.theta)?;
            if g.n_coarse >= a.n {
                break;
            }
            let coarse = a.galerkin(&g.agg, g.n_coarse);
            let mut level = sparse_level(a, lambda, bc, &cfg)?;
            level.transfer = Some(Transfer::Aggregates { agg: g.agg });
            levels.push(level);
            a = coarse;
        }
        let coarse = CoarseSolver::new(&a, singular);
        levels.push(sparse_level(a, lambda, bc, &cfg)?);
        let n = levels.len();
        for (l, level) in levels.iter_mut().enumerate() {
            if l < cfg.k_cycle_levels && l + 2 < n {
                level.cycle = Cycle::K;
            }
        }
        Ok(Self {
            levels,
            coarse,
            elements,
        })
    }

    /// Replaces the cycle plan by V-cycles everywhere, making the preconditioner
    /// a fixed linear operator.
    pub fn with_v_cycles(mut self) -> Self {
        self.levels.iter_mut().for_each(|l| l.cycle = Cycle::V);
        self
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn dim(&self) -> usize {
        self.levels[0].dim()
    }

    pub fn levels(&self) -> Vec<LevelInfo> {
        self.levels
            .iter()
            .map(|l| LevelInfo {
                degree: match &l.op {
                    LevelOp::MatrixFree { disc } => Some(disc.degree()),
                    LevelOp::Sparse(_) => None,
                },
                dofs: l.dim(),
                nnz: match &l.op {
                    LevelOp::MatrixFree { .. } => 0,
                    LevelOp::Sparse(a) => a.nnz(),
                },
                cycle: l.cycle,
                eig_hi: l.smoother.upper / 1.1,
            })
            .collect()
    }

    /// Stored bytes: sparse matrices, transfers, smoother diagonals and the
    /// dense coarse factor. Matrix-free operators are not counted (they reuse
    /// the geometric data of the discretization).
    pub fn memory_bytes(&self) -> usize {
        let mut b = 0;
        for l in &self.levels {
            b += 8 * l.smoother.inv_diag.len();
            if let LevelOp::Sparse(a) = &l.op {
                b += a.memory_bytes();
            }
            b += match &l.transfer {
                Some(Transfer::P(t)) => 16 * t.prolong.data.len(),
                Some(Transfer::Aggregates { agg }) => 8 * agg.len(),
                None => 0,
            };
        }
        b + self.coarse.memory_bytes(self.levels.last().unwrap().dim())
    }

    pub fn memory_bytes_per_element(&self) -> f64 {
        self.memory_bytes() as f64 / self.elements.max(1) as f64
    }

    fn restrict(&self, l: usize, r: &[f64], rc: &mut [f64]) {
        match self.levels[l].transfer.as_ref().unwrap() {
            Transfer::P(t) => t.restrict(r, rc),
            Transfer::Aggregates { agg } => {
                rc.iter_mut().for_each(|v| *v = 0.0);
                for (i, &c) in agg.iter().enumerate() {
                    rc[c] += r[i];
                }
            }
        }
    }

    fn prolongate_add(&self, l: usize, xc: &[f64], x: &mut [f64]) {
        match self.levels[l].transfer.as_ref().unwrap() {
            Transfer::P(t) => {
                let mut tmp = vec![0.0; x.len()];
                t.prolongate(xc, &mut tmp);
                x.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);
            }
            Transfer::Aggregates { agg } => {
                for (i, &c) in agg.iter().enumerate() {
                    x[i] += xc[c];
                }
            }
        }
    }

    fn n_coarse(&self, l: usize) -> usize {
        self.levels[l + 1].dim()
    }

    /// One cycle at level `l` for `A_l x = b` from a zero initial guess.
    fn cycle(&self, l: usize, b: &[f64], x: &mut [f64]) {
        if l + 1 == self.levels.len() {
            self.coarse.solve(b, x);
            return;
        }
        let level = &self.levels[l];
        let op = LevelAsOp(level);
        let n = b.len();
        level.smoother.apply(&op, b, x);
        let mut r = vec![0.0; n];
        level.apply(x, &mut r);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
        let nc = self.n_coarse(l);
        let mut rc = vec![0.0; nc];
        self.restrict(l, &r, &mut rc);
        let mut xc = vec![0.0; nc];
        match level.cycle {
            Cycle::V => self.cycle(l + 1, &rc, &mut xc),
            Cycle::K => self.k_correction(l + 1, &rc, &mut xc),
        }
        self.prolongate_add(l, &xc, x);
        level.apply(x, &mut r);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
        let mut dz = vec![0.0; n];
        level.smoother.apply(&op, &r, &mut dz);
        x.iter_mut().zip(&dz).for_each(|(a, d)| *a += d);
    }

    /// Two coarse cycles combined by a 2-dimensional A-orthogonal projection.
    fn k_correction(&self, l: usize, r: &[f64], x: &mut [f64]) {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let n = r.len();
        let level = &self.levels[l];
        let mut c1 = vec![0.0; n];
        self.cycle(l, r, &mut c1);
        let mut v1 = vec![0.0; n];
        level.apply(&c1, &mut v1);
        let rho1 = dot(&c1, &v1);
        let a1 = dot(&c1, r);
        if !(rho1 > 0.0) {
            x.copy_from_slice(&c1);
            return;
        }
        let r2: Vec<f64> = r
            .iter()
            .zip(&v1)
            .map(|(ri, vi)| ri - a1 / rho1 * vi)
            .collect();
        let mut c2 = vec![0.0; n];
        self.cycle(l, &r2, &mut c2);
        let mut v2 = vec![0.0; n];
        level.apply(&c2, &mut v2);
        let gamma = dot(&c2, &v1);
        let beta = dot(&c2, &v2);
        let a2 = dot(&c2, &r2);
        let rho2 = beta - gamma * gamma / rho1;
        if !(rho2 > 1e-14 * beta.abs()) {
            x.iter_mut()
                .zip(&c1)
                .for_each(|(xi, ci)| *xi = a1 / rho1 * ci);
            return;
        }
        let w1 = a1 / rho1 - gamma * a2 / (rho1 * rho2);
        let w2 = a2 / rho2;
        for i in 0..n {
            x[i] = w1 * c1[i] + w2 * c2[i];
        }
    }

    /// `z = B r` for one cycle from the finest level.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        let n = self.dim();
        if r.len() != n || z.len() != n {
            return Err(Error::Shape {
                expected: n,
                got: if r.len() != n { r.len() } else { z.len() },
            });
        }
        self.cycle(0, r, z);
        Ok(())
    }
}

impl Preconditioner for MultigridHierarchy {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.cycle(0, r, z)
    }

    fn is_linear(&self) -> bool {
        self.levels.iter().all(|l| l.cycle == Cycle::V)
    }
}
