//! Stabilizer-free weak Galerkin discretization of steady
//! convection-diffusion-reaction problems on rectangular meshes, together
//! with the equivalent finite difference schemes and the tools used to check
//! convergence and the discrete maximum principle.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod fd;
pub mod kernels;
pub mod mesh;
pub mod problems;
pub mod report;
pub mod solver;
pub mod sparse;

pub use error::{Result, SwgError};
