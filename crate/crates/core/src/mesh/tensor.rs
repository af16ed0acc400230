use std::collections::HashSet;
use std::io::Write;

use super::{shishkin_mesh_1d, uniform_mesh_1d, Mesh1D};
use crate::error::Result;

/// Cartesian product of two 1D meshes on the unit square.
///
/// Grid point `(i, j)` sits at `(x_i, y_j)` and is stored at lexicographic
/// index `j * (Nx + 1) + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorMesh2D {
    pub x_mesh: Mesh1D,
    pub y_mesh: Mesh1D,
}

impl TensorMesh2D {
    pub fn new(x_mesh: Mesh1D, y_mesh: Mesh1D) -> Self {
        TensorMesh2D { x_mesh, y_mesh }
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Ok(Self::new(uniform_mesh_1d(n)?, uniform_mesh_1d(n)?))
    }

    pub fn nx(&self) -> usize {
        self.x_mesh.intervals()
    }

    pub fn ny(&self) -> usize {
        self.y_mesh.intervals()
    }

    pub fn point_count(&self) -> usize {
        (self.nx() + 1) * (self.ny() + 1)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx() + 1) + i
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x_mesh.nodes()[i], self.y_mesh.nodes()[j]]
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx() || j == self.ny()
    }
}

/// Tensor-product Shishkin mesh with layers at `x = 1` and `y = 1`.
pub fn tensor_shishkin_2d(n: usize, eps: f64, b1: f64, b2: f64) -> Result<TensorMesh2D> {
    Ok(TensorMesh2D::new(shishkin_mesh_1d(n, eps, b1)?, shishkin_mesh_1d(n, eps, b2)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Interior,
    Boundary,
}

/// Counterclockwise triangles over a vertex list.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_flags: Vec<VertexKind>,
}

impl Triangulation {
    pub fn corners(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        signed_area(&self.corners(t))
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary_flags[v] == VertexKind::Boundary
    }

    /// Unique undirected edges, each as `(min, max)` vertex indices.
    pub fn edges(&self) -> HashSet<(usize, usize)> {
        let mut edges = HashSet::with_capacity(3 * self.triangles.len());
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges
    }

    /// One `v x y` line per vertex, then one `t i j k` line per triangle (0-based).
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for [x, y] in &self.vertices {
            writeln!(out, "v {x:.17e} {y:.17e}")?;
        }
        for [a, b, c] in &self.triangles {
            writeln!(out, "t {a} {b} {c}")?;
        }
        Ok(())
    }
}

/// Half the cross product of the edge vectors; positive for counterclockwise order.
pub fn signed_area(p: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

/// Split every mesh rectangle along its top-left to bottom-right diagonal.
///
/// Vertices keep the tensor mesh's lexicographic numbering. Each rectangle
/// with corners BL, BR, TR, TL yields the triangles (BL, BR, TL) and
/// (BR, TR, TL), both counterclockwise.
pub fn triangulate(mesh: &TensorMesh2D) -> Triangulation {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let mut vertices = Vec::with_capacity(mesh.point_count());
    let mut boundary_flags = Vec::with_capacity(mesh.point_count());
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(mesh.point(i, j));
            boundary_flags.push(if mesh.is_boundary(i, j) {
                VertexKind::Boundary
            } else {
                VertexKind::Interior
            });
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let bl = mesh.index(i, j);
            let br = mesh.index(i + 1, j);
            let tr = mesh.index(i + 1, j + 1);
            let tl = mesh.index(i, j + 1);
            triangles.push([bl, br, tl]);
            triangles.push([br, tr, tl]);
        }
    }
    Triangulation { vertices, triangles, boundary_flags }
}
