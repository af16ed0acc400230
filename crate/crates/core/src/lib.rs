//! Stabilized discretizations for singularly perturbed convection-diffusion
//! problems `-ε Δu + b·∇u = f`.
//!
//! The crate covers the classical toolbox for these problems together with the
//! exact-solution oracles needed to check it:
//!
//! - [`mesh`]: uniform, Shishkin and Bakhvalov meshes in 1D, tensor-product
//!   meshes in 2D and their triangulations.
//! - [`problems`]: the 1D model problem with its closed-form solution, a 2D
//!   manufactured problem with boundary layers, and inflow/outflow
//!   classification of the unit square.
//! - [`linalg`]: tridiagonal and row-compressed systems, direct and Krylov
//!   solvers, M-matrix diagnostics.
//! - [`fd1d`], [`fd2d`]: central, upwind and exponentially fitted (Il'in)
//!   difference schemes.
//! - [`fem2d`]: piecewise-linear Galerkin and streamline-diffusion FEM.
//! - [`harness`]: error norms, convergence rates and the sweep runner behind
//!   the `convdiff` CLI.
//!
//! With the default `parallel` feature, sweeps and assembly loops run on the
//! rayon thread pool; without it everything runs sequentially. Results are
//! identical either way.

pub mod error;
pub mod fd1d;
pub mod fd2d;
pub mod fem2d;
pub mod harness;
pub mod linalg;
pub mod mesh;
mod par;
pub mod problems;

pub use error::{Error, Result};
pub use par::Execution;
