//! Persistence of equilibria and relative equilibria of Hamiltonian systems
//! whose symmetry group `G` is broken to a subgroup `H` by a perturbation.
//!
//! The crate is organised bottom-up:
//! - [`lie`] fixed-basis Lie algebras, coadjoint actions and condition (R);
//! - [`models`] phase spaces, Hamiltonian families and momentum maps;
//! - [`solver`] Newton-based search for (relative) equilibria, nondegeneracy
//!   checks, orbit clustering and continuation in the parameter;
//! - [`reduction`] Lie-Poisson dynamics on `se(2)*`;
//! - [`catbound`] equivariant category lower bounds;
//! - [`pendulum`] closed-form spherical pendulum analysis.

pub mod catbound;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod models;
pub mod pendulum;
pub mod reduction;
pub mod solver;

pub use error::{Error, Result};
pub use lie::{AlgebraVector, CoalgebraVector, GroupElement, GroupId};
pub use models::{HamiltonianFamily, PhasePoint, Velocity};
