//! Finite element core for elliptic interface problems whose singular
//! interface forcing is replaced by a convolution with an approximate Dirac
//! kernel.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, the command line and wall-clock
//! timing live in the `regfem` companion crate.
//!
//! Module map:
//!
//! * [`kernels`]: mollifier profiles, the scaled family `δ_ε`, moment and
//!   L¹-growth diagnostics.
//! * [`mesh`]: structured quad/hex volume meshes, global refinement and the
//!   polygonal/polyhedral interface meshes with closest-point lifting.
//! * [`fem`]: the Q1 space, stiffness assembly, Dirichlet elimination and
//!   Jacobi-preconditioned CG.
//! * [`spatial`]: the bin-grid index used for neighbour search and point
//!   location.
//! * [`coupling`]: interface right-hand sides, regularized and direct.
//! * [`analysis`]: exact solutions, error norms, rates and the convergence
//!   driver.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod coupling;
mod error;
pub mod exec;
pub mod fem;
pub mod geometry;
pub mod kernels;
pub mod mesh;
pub mod quadrature;
pub mod spatial;

pub use error::{Error, Result};
