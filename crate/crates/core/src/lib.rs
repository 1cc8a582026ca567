//! Generalized Skyrme model on a periodic cubic lattice.
//!
//! Group-valued fields live in the compact Lie groups of [`lie`], their
//! energies and log derivatives in [`lattice`], the sector invariants in
//! [`invariants`], flat-connection holonomy in [`holonomy`] and the gradient
//! flow in [`minimizer`]. Everything is generic over the scalar type; the
//! `f64` aliases below are what the binary uses.

pub mod error;
pub mod holonomy;
pub mod invariants;
pub mod lattice;
pub mod lie;
pub mod linalg;
pub mod minimizer;
pub mod scalar;

pub use error::{Error, Result};
pub use lie::{AlgebraSpec, LieAlgebra};
pub use scalar::Real;

pub type Algebra = LieAlgebra<f64>;
pub type Matrix = linalg::CMat<f64>;
pub type Lattice = lattice::TorusLattice<f64>;
pub type Field = lattice::GroupField<f64>;
pub type OneForm = lattice::AlgebraOneForm<f64>;
