//! One-dimensional meshes on `[0, 1]` and their tensor products.
//!
//! Layer-adapted meshes always place the boundary layer at `x = 1`, the outflow
//! end for positive convection. Meshes are immutable once built.

mod bakhvalov;
mod tensor;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

pub use bakhvalov::{bakhvalov_mesh_1d, bakhvalov_tangency, BakhvalovParams, Tangency};
pub use tensor::{signed_area, tensor_shishkin_2d, triangulate, TensorMesh2D, Triangulation, VertexKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Uniform,
    Shishkin,
    Bakhvalov,
}

impl std::fmt::Display for MeshKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MeshKind::Uniform => "uniform",
            MeshKind::Shishkin => "shishkin",
            MeshKind::Bakhvalov => "bakhvalov",
        })
    }
}

impl std::str::FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MeshKind::Uniform),
            "shishkin" => Ok(MeshKind::Shishkin),
            "bakhvalov" => Ok(MeshKind::Bakhvalov),
            other => Err(Error::InvalidArgument(format!("unknown mesh kind '{other}'"))),
        }
    }
}

/// Strictly increasing nodes `0 = x_0 < ... < x_N = 1`.
///
/// `lambda` is the width of the fine region next to `x = 1` for Shishkin
/// meshes and `0` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    kind: MeshKind,
    lambda: f64,
}

impl Mesh1D {
    /// Fails if rounding makes neighbouring nodes coincide, which happens
    /// once the layer width falls below the spacing of doubles near `x = 1`.
    pub(crate) fn from_parts(nodes: Vec<f64>, kind: MeshKind, lambda: f64) -> Result<Self> {
        debug_assert!(nodes.len() >= 2);
        if let Some(i) = nodes.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(format!(
                "{kind} mesh nodes {i} and {} are not strictly increasing ({} vs {}); the layer is too thin to resolve in double precision",
                i + 1,
                nodes[i],
                nodes[i + 1]
            )));
        }
        Ok(Mesh1D { nodes, kind, lambda })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Width of interval `i`, i.e. `x_{i+1} - x_i`.
    pub fn width(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|w| w[1] - w[0])
    }

    pub fn min_width(&self) -> f64 {
        self.widths().fold(f64::INFINITY, f64::min)
    }

    /// True when all widths agree to a relative tolerance of `1e-10`.
    ///
    /// A Shishkin mesh whose transition point is capped at 1/2 is uniform in
    /// this sense even though its kind stays `Shishkin`.
    pub fn is_uniform(&self) -> bool {
        let h = 1.0 / self.intervals() as f64;
        self.widths().all(|w| (w - h).abs() <= 1e-10 * h)
    }

    /// Write one coordinate per line.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for x in &self.nodes {
            writeln!(out, "{x:.17e}")?;
        }
        Ok(())
    }
}

pub fn uniform_mesh_1d(n: usize) -> Result<Mesh1D> {
    if n == 0 {
        return Err(Error::InvalidArgument("a mesh needs at least one interval".into()));
    }
    let mut nodes: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    nodes[n] = 1.0;
    Mesh1D::from_parts(nodes, MeshKind::Uniform, 0.0)
}

/// Transition width `min(1/2, (4 eps / b) ln N)`.
pub fn shishkin_transition(n: usize, eps: f64, b: f64) -> f64 {
    (4.0 * eps / b * (n as f64).ln()).min(0.5)
}

/// Piecewise-uniform mesh with `N/2` intervals on `[0, 1 - λ]` and `N/2` on
/// `[1 - λ, 1]`, `λ = min(1/2, (4ε/b) ln N)`.
pub fn shishkin_mesh_1d(n: usize, eps: f64, b: f64) -> Result<Mesh1D> {
    ensure_positive("eps", eps)?;
    ensure_positive("b", b)?;
    check_even(n)?;
    shishkin_with_transition(n, shishkin_transition(n, eps, b))
}

/// Shishkin-type mesh with a prescribed transition width.
///
/// Used for double-mesh comparisons, where the refined mesh must keep the
/// coarse mesh's `λ` so that the node sets nest.
pub fn shishkin_with_transition(n: usize, lambda: f64) -> Result<Mesh1D> {
    check_even(n)?;
    if !(lambda > 0.0 && lambda <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "transition width must lie in (0, 1/2], got {lambda}"
        )));
    }
    let half = n / 2;
    let coarse_end = 1.0 - lambda;
    let mut nodes = Vec::with_capacity(n + 1);
    for i in 0..=half {
        nodes.push(coarse_end * (i as f64 / half as f64));
    }
    for i in half + 1..=n {
        nodes.push(1.0 - lambda * ((n - i) as f64 / half as f64));
    }
    Mesh1D::from_parts(nodes, MeshKind::Shishkin, lambda)
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        Err(Error::OddIntervalCount(n))
    } else {
        Ok(())
    }
}
