//! Linear systems produced by the discretizations, their solvers, and
//! M-matrix structure checks.

mod banded;
mod krylov;
mod mmatrix;
mod sparse;
mod tridiag;

pub use mmatrix::{is_m_matrix, MMatrixReport, RowAccess, Violation};
pub use sparse::{
    solve_sparse, solve_sparse_with, CsrMatrix, SolveMethod, SolveStrategy, SparseSolve, SparseSystem,
    DEFAULT_TOLERANCE,
};
pub use tridiag::{solve_tridiagonal, TridiagonalSystem};

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
