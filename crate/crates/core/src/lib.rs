//! Discretization of the nonlocal p-Laplacian with a fractional-type kernel on
//! box domains, its principal eigenvalue, the associated Dirichlet problem,
//! and optimization of both over rearrangement classes of the weight.
//!
//! The domain is split into equal cells; fields are piecewise constant and
//! vanish outside the domain. All pair and exterior interactions are computed
//! once by [`kernel::assemble`], after which energies, gradients and solvers
//! work on the resulting [`KernelAssembly`].

pub mod config;
pub mod dirichlet;
pub mod eigen;
pub mod energy;
pub mod error;
pub mod field;
pub mod grid;
pub mod kernel;
pub mod optimize;
pub mod quad;
pub mod rearrange;
pub mod runner;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::Grid;
pub use kernel::{assemble, KernelAssembly, KernelSpec};
pub use rearrange::RearrangementClass;
