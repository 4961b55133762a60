//! Preconditioned conjugate gradients for the SIPDG systems, with identity,
//! block-Jacobi, aggregation AMG and hybrid pMG-AMG preconditioners.

mod amg;
mod assemble;
mod multigrid;
mod operators;
mod pcg;
mod sparse;

use std::fmt;
use std::str::FromStr;

pub use amg::{aggregate, estimate_max_eig, Aggregation, Chebyshev};
pub use assemble::{assemble_sipdg, sipdg_diagonal};
pub use multigrid::{
    build_p_transfers, p_schedule, Cycle, LevelInfo, MgConfig, MultigridHierarchy, PTransfer,
};
pub use operators::{BlockJacobi, SipdgOperator};
pub use pcg::{
    pcg, DiagonalScaling, Identity, LinearOperator, PcgOptions, Preconditioner, SolveStats,
};
pub use sparse::SparseMatrix;

use crate::dgops::{Discretization, EllipticBc};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecondKind {
    None,
    Jacobi,
    Amg,
    PmgAmg,
}

impl PrecondKind {
    pub const ALL: [PrecondKind; 4] = [Self::None, Self::Jacobi, Self::Amg, Self::PmgAmg];
}

impl fmt::Display for PrecondKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Jacobi => "jacobi",
            Self::Amg => "amg",
            Self::PmgAmg => "pmg-amg",
        })
    }
}

impl FromStr for PrecondKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "jacobi" => Ok(Self::Jacobi),
            "amg" => Ok(Self::Amg),
            "pmg-amg" => Ok(Self::PmgAmg),
            _ => Err(Error::Config(format!(
                "unknown preconditioner '{s}' (expected none, jacobi, amg or pmg-amg)"
            ))),
        }
    }
}

/// True if the operator has constants in its null space.
pub fn is_singular(disc: &Discretization, lambda: f64, bc: EllipticBc) -> bool {
    lambda == 0.0 && !bc.has_dirichlet(&disc.conn)
}

/// Builds a preconditioner for the SIPDG operator of `disc`.
///
/// `Jacobi` is the per-element scaled inverse mass for `lambda > 0` and the
/// point diagonal of the operator for `lambda = 0`.
pub fn build_preconditioner<'a>(
    kind: PrecondKind,
    mesh: &Mesh,
    disc: &'a Discretization,
    lambda: f64,
    bc: EllipticBc,
    cfg: MgConfig,
) -> Result<Box<dyn Preconditioner + Send + Sync + 'a>> {
    Ok(match kind {
        PrecondKind::None => Box::new(Identity),
        PrecondKind::Jacobi if lambda > 0.0 => {
            Box::new(BlockJacobi::new(&disc.re, &disc.geom, lambda))
        }
        PrecondKind::Jacobi => Box::new(DiagonalScaling::new(&sipdg_diagonal(
            &disc.re, &disc.geom, &disc.conn, lambda, bc,
        ))),
        PrecondKind::Amg => {
            let a = assemble_sipdg(&disc.re, &disc.geom, &disc.conn, lambda, bc)?;
            Box::new(MultigridHierarchy::amg(
                a,
                is_singular(disc, lambda, bc),
                cfg,
                disc.geom.k,
            )?)
        }
        PrecondKind::PmgAmg => Box::new(MultigridHierarchy::pmg_amg(
            mesh,
            disc.degree(),
            lambda,
            bc,
            cfg,
        )?),
    })
}
