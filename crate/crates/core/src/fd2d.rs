//! Upwind finite differences for `-ε Δu + b·∇u = f` on tensor-product meshes
//! of the unit square.
//!
//! Each axis uses the nonuniform second difference of [`crate::fd1d`] and a
//! backward difference for convection, so for `b1, b2 >= 0` the assembled
//! matrix is an M-matrix on any tensor mesh. Interior unknowns are numbered
//! lexicographically, `x` fastest.

use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{solve_sparse, CsrMatrix, SparseSystem, DEFAULT_TOLERANCE};
use crate::mesh::TensorMesh2D;
use crate::par::{map_range, Execution};
use crate::problems::ProblemSpec2D;

/// Nodal values on the full `(Nx+1) x (Ny+1)` grid, lexicographic storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2DSolution {
    pub mesh: TensorMesh2D,
    pub values: Vec<f64>,
}

impl Grid2DSolution {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.mesh.index(i, j)]
    }

    /// Values along the grid line `y = y_j`.
    pub fn row(&self, j: usize) -> &[f64] {
        let start = self.mesh.index(0, j);
        &self.values[start..start + self.mesh.nx() + 1]
    }

    /// Values along the grid line `x = x_i`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..=self.mesh.ny()).map(|j| self.at(i, j)).collect()
    }

    pub fn max_error(&self, exact: &dyn Fn(f64, f64) -> f64) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..=self.mesh.ny() {
            for i in 0..=self.mesh.nx() {
                let [x, y] = self.mesh.point(i, j);
                worst = worst.max((self.at(i, j) - exact(x, y)).abs());
            }
        }
        worst
    }

    /// `x y value` triples, one per line, with a blank line between grid rows.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for j in 0..=self.mesh.ny() {
            if j > 0 {
                writeln!(out)?;
            }
            for i in 0..=self.mesh.nx() {
                let [x, y] = self.mesh.point(i, j);
                writeln!(out, "{x:.17e} {y:.17e} {:.17e}", self.at(i, j))?;
            }
        }
        Ok(())
    }
}

pub fn assemble_upwind_2d(p: &ProblemSpec2D, m: &TensorMesh2D) -> Result<SparseSystem> {
    assemble_upwind_2d_with(p, m, Execution::default())
}

/// Rows are independent, so they are built with `exec` and concatenated in order.
pub fn assemble_upwind_2d_with(p: &ProblemSpec2D, m: &TensorMesh2D, exec: Execution) -> Result<SparseSystem> {
    let [b1, b2] = p.beta();
    if b1 < 0.0 || b2 < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "upwind differences need nonnegative convection components, got ({b1}, {b2})"
        )));
    }
    let (nx, ny) = (m.nx(), m.ny());
    if nx < 2 || ny < 2 {
        return SparseSystem::new(CsrMatrix::from_sorted_rows(Vec::new()), Vec::new());
    }
    let (ix, iy) = (nx - 1, ny - 1);
    let xs = m.x_mesh.nodes();
    let ys = m.y_mesh.nodes();
    let eps = p.eps();
    let unknown = |i: usize, j: usize| (j - 1) * ix + (i - 1);

    let rows = map_range(ix * iy, exec, |r| {
        let (i, j) = (r % ix + 1, r / ix + 1);
        let (h_w, h_e) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
        let (k_s, k_n) = (ys[j] - ys[j - 1], ys[j + 1] - ys[j]);
        let h_mean = 0.5 * (h_w + h_e);
        let k_mean = 0.5 * (k_s + k_n);

        let west = -eps / (h_w * h_mean) - b1 / h_w;
        let east = -eps / (h_e * h_mean);
        let south = -eps / (k_s * k_mean) - b2 / k_s;
        let north = -eps / (k_n * k_mean);
        let centre = -(west + east + south + north);

        let mut rhs = p.f(xs[i], ys[j]);
        let mut entries = Vec::with_capacity(5);
        // Column order of the lexicographic numbering: S, W, C, E, N.
        for (ii, jj, coeff) in [(i, j - 1, south), (i - 1, j, west), (i, j, centre), (i + 1, j, east), (i, j + 1, north)] {
            if m.is_boundary(ii, jj) {
                rhs -= coeff * p.g(xs[ii], ys[jj]);
            } else {
                entries.push((unknown(ii, jj), coeff));
            }
        }
        (entries, rhs)
    });
    let (entries, rhs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    SparseSystem::new(CsrMatrix::from_sorted_rows(entries), rhs)
}

pub fn solve_2d(p: &ProblemSpec2D, m: &TensorMesh2D) -> Result<Grid2DSolution> {
    solve_2d_with(p, m, Execution::default())
}

pub fn solve_2d_with(p: &ProblemSpec2D, m: &TensorMesh2D, exec: Execution) -> Result<Grid2DSolution> {
    let sys = assemble_upwind_2d_with(p, m, exec)?;
    let solved = solve_sparse(&sys, DEFAULT_TOLERANCE)?;
    let (nx, ny) = (m.nx(), m.ny());
    let mut values = vec![0.0; m.point_count()];
    let mut next = solved.values.into_iter();
    for j in 0..=ny {
        for i in 0..=nx {
            let [x, y] = m.point(i, j);
            values[m.index(i, j)] = if m.is_boundary(i, j) {
                p.g(x, y)
            } else {
                next.next().expect("one unknown per interior point")
            };
        }
    }
    Ok(Grid2DSolution { mesh: m.clone(), values })
}
