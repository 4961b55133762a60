//! High-order nodal discontinuous Galerkin solver for the two-dimensional
//! incompressible Navier-Stokes equations.
//!
//! The crate is organised bottom-up:
//!
//! - [`refelem`]: reference-triangle nodes, cubature rules and dense operator tables.
//! - [`mesh`]: triangular meshes, face connectivity, geometric factors and penalties.
//! - [`dgops`]: matrix-free elemental operators (gradient, SIPDG, divergence, advection).
//! - [`linsolve`]: conjugate gradients with block-Jacobi, AMG and hybrid pMG-AMG preconditioners.
//! - [`splitting`]: the BDF/EXT algebraic splitting stepper with semi-Lagrangian subcycling.
//! - [`perfmodel`]: empirical roofline model and kernel cost inventories.
//! - [`cases`]: Taylor vortex and square-cylinder drivers, error norms and CSV output.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod config;
pub mod dgops;
pub mod error;
pub mod linsolve;
pub mod mesh;
pub mod perfmodel;
pub mod refelem;
pub mod splitting;

pub use dgops::{ScalarField, VectorField};
pub use error::{Error, Result};
pub use mesh::{BoundaryTag, Connectivity, Geometry, Mesh};
pub use refelem::{CubatureRule, NodeSet, ReferenceElement};
