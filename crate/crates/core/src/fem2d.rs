//! Piecewise-linear Galerkin and streamline-diffusion (SDFEM) discretizations
//! of `-ε Δu + b·∇u = f` on triangulations of the unit square.
//!
//! The bilinear form is assembled for the equation divided by `|b|`, so the
//! convection direction `β = b/|b|` has unit length and the diffusion is
//! `ε/|b|`. Streamline diffusion tests with `v + δ_K β·∇v` on each element;
//! for linear elements the second-order part of the residual vanishes, which
//! leaves the extra term `δ_K (β·∇u, β·∇v)_K`.
//!
//! All integrals of `f` use the vertex quadrature rule. Nonzero Dirichlet data
//! are lifted: boundary vertices carry the nodal value of `g` and their
//! couplings move to the right-hand side.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_sparse, CsrMatrix, SparseSystem, DEFAULT_TOLERANCE};
use crate::mesh::Triangulation;
use crate::par::{map_range, Execution};
use crate::problems::ProblemSpec2D;

/// Geometry of one triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    /// Constant gradients of the three barycentric basis functions.
    pub gradients: [[f64; 2]; 3],
    /// Longest edge.
    pub diameter: f64,
}

impl ElementGeometry {
    pub fn new(corners: &[[f64; 2]; 3], index: usize) -> Result<Self> {
        let area = crate::mesh::signed_area(corners);
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::DegenerateTriangle { index, area });
        }
        let [p0, p1, p2] = *corners;
        let s = 0.5 / area;
        let gradients = [
            [(p1[1] - p2[1]) * s, (p2[0] - p1[0]) * s],
            [(p2[1] - p0[1]) * s, (p0[0] - p2[0]) * s],
            [(p0[1] - p1[1]) * s, (p1[0] - p0[0]) * s],
        ];
        Ok(ElementGeometry { area, gradients, diameter: triangle_diameter(corners) })
    }
}

pub fn triangle_diameter(corners: &[[f64; 2]; 3]) -> f64 {
    let d = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    d(corners[0], corners[1]).max(d(corners[1], corners[2])).max(d(corners[2], corners[0]))
}

/// Continuous piecewise-linear functions on a triangulation that vanish on
/// the boundary. Unknowns are the interior vertices in vertex order.
#[derive(Clone, Debug)]
pub struct FemSpace<'a> {
    pub triangulation: &'a Triangulation,
    free_vertices: Vec<usize>,
    unknown_of: Vec<Option<usize>>,
    geometry: Vec<ElementGeometry>,
}

impl<'a> FemSpace<'a> {
    pub fn new(triangulation: &'a Triangulation) -> Result<Self> {
        let mut free_vertices = Vec::new();
        let mut unknown_of = vec![None; triangulation.vertices.len()];
        for (v, slot) in unknown_of.iter_mut().enumerate() {
            if !triangulation.is_boundary(v) {
                *slot = Some(free_vertices.len());
                free_vertices.push(v);
            }
        }
        let geometry = (0..triangulation.triangles.len())
            .map(|t| ElementGeometry::new(&triangulation.corners(t), t))
            .collect::<Result<_>>()?;
        Ok(FemSpace { triangulation, free_vertices, unknown_of, geometry })
    }

    pub fn free_vertices(&self) -> &[usize] {
        &self.free_vertices
    }

    pub fn unknown(&self, vertex: usize) -> Option<usize> {
        self.unknown_of[vertex]
    }

    pub fn geometry(&self, t: usize) -> &ElementGeometry {
        &self.geometry[t]
    }

    pub fn dim(&self) -> usize {
        self.free_vertices.len()
    }
}

/// How the streamline-diffusion parameter is chosen per element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DeltaStrategy {
    /// `δ_K = 0`: plain Galerkin.
    GalerkinZero,
    /// `δ_K = h_K/2` where the element Péclet number `|b| h_K / (2ε)` exceeds 1,
    /// zero elsewhere.
    #[default]
    CoarseHalfH,
    /// The same nonnegative `δ` on every element.
    UserConstant(f64),
}

impl DeltaStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DeltaStrategy::UserConstant(c) if !(c >= 0.0 && c.is_finite()) => {
                Err(Error::InvalidArgument(format!("delta must be a nonnegative number, got {c}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DeltaStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaStrategy::GalerkinZero => f.write_str("galerkin_zero"),
            DeltaStrategy::CoarseHalfH => f.write_str("coarse_half_h"),
            DeltaStrategy::UserConstant(c) => write!(f, "user_constant={c}"),
        }
    }
}

/// Accepts `galerkin_zero`, `coarse_half_h`, `user_constant=<value>` or a bare number.
impl FromStr for DeltaStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_constant = |v: &str| {
            let c: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse delta constant '{v}'")))?;
            let strategy = DeltaStrategy::UserConstant(c);
            strategy.validate()?;
            Ok(strategy)
        };
        match s.trim() {
            "galerkin_zero" => Ok(DeltaStrategy::GalerkinZero),
            "coarse_half_h" => Ok(DeltaStrategy::CoarseHalfH),
            other => match other.strip_prefix("user_constant") {
                Some(rest) => parse_constant(rest.trim_start_matches(['=', ':'])),
                None => parse_constant(other).map_err(|_| {
                    Error::InvalidArgument(format!(
                        "unknown delta strategy '{other}' (expected galerkin_zero, coarse_half_h or user_constant=<value>)"
                    ))
                }),
            },
        }
    }
}

/// Element parameter `δ_K` for triangle `k`.
pub fn choose_delta(k: &[[f64; 2]; 3], eps: f64, b: [f64; 2], s: DeltaStrategy) -> Result<f64> {
    s.validate()?;
    Ok(delta_for_diameter(triangle_diameter(k), eps, b[0].hypot(b[1]), s))
}

fn delta_for_diameter(h: f64, eps: f64, speed: f64, s: DeltaStrategy) -> f64 {
    match s {
        DeltaStrategy::GalerkinZero => 0.0,
        DeltaStrategy::CoarseHalfH => {
            if speed * h / (2.0 * eps) > 1.0 {
                0.5 * h
            } else {
                0.0
            }
        }
        DeltaStrategy::UserConstant(c) => c,
    }
}

/// Element matrix and load vector, indexed by local vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalSystem {
    pub matrix: [[f64; 3]; 3],
    pub load: [f64; 3],
}

/// Streamline-diffusion element contributions on triangle `k`.
///
/// `A_ij = ε|K| ∇φ_i·∇φ_j + |K|/3 b·∇φ_j + δ|K| (b·∇φ_i)(b·∇φ_j)` and
/// `F_i = |K|/3 f(v_i) + δ (b·∇φ_i) |K|/3 Σ_j f(v_j)`. `b` is used as given;
/// the assembly passes the unit direction.
pub fn local_sdfem(
    k: &[[f64; 2]; 3],
    eps: f64,
    b: [f64; 2],
    delta: f64,
    f: &dyn Fn(f64, f64) -> f64,
) -> Result<LocalSystem> {
    let geometry = ElementGeometry::new(k, 0)?;
    let f_values = [f(k[0][0], k[0][1]), f(k[1][0], k[1][1]), f(k[2][0], k[2][1])];
    Ok(element_system(&geometry, eps, b, delta, f_values))
}

fn element_system(g: &ElementGeometry, eps: f64, b: [f64; 2], delta: f64, f_values: [f64; 3]) -> LocalSystem {
    let area = g.area;
    let grad = &g.gradients;
    let streamline: [f64; 3] = std::array::from_fn(|i| b[0] * grad[i][0] + b[1] * grad[i][1]);
    let mut matrix = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let diffusion = eps * area * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
            let convection = area / 3.0 * streamline[j];
            let stabilization = delta * area * streamline[i] * streamline[j];
            matrix[i][j] = diffusion + convection + stabilization;
        }
    }
    let integral_f = area / 3.0 * (f_values[0] + f_values[1] + f_values[2]);
    let load = std::array::from_fn(|i| area / 3.0 * f_values[i] + delta * streamline[i] * integral_f);
    LocalSystem { matrix, load }
}

pub fn assemble_fem(p: &ProblemSpec2D, t: &Triangulation, s: DeltaStrategy) -> Result<SparseSystem> {
    assemble_fem_with(p, t, s, Execution::default())
}

/// Element systems are computed with `exec` and accumulated serially in
/// element order, so the result does not depend on scheduling.
pub fn assemble_fem_with(p: &ProblemSpec2D, t: &Triangulation, s: DeltaStrategy, exec: Execution) -> Result<SparseSystem> {
    let space = FemSpace::new(t)?;
    assemble_on_space(p, &space, s, exec)
}

fn assemble_on_space(p: &ProblemSpec2D, space: &FemSpace<'_>, s: DeltaStrategy, exec: Execution) -> Result<SparseSystem> {
    s.validate()?;
    let t = space.triangulation;
    let eps = p.scaled_eps();
    let beta = p.unit_beta();

    let locals = map_range(t.triangles.len(), exec, |e| {
        let geometry = space.geometry(e);
        let delta = delta_for_diameter(geometry.diameter, eps, 1.0, s);
        let f_values = t.triangles[e].map(|v| {
            let [x, y] = t.vertices[v];
            p.scaled_source(x, y)
        });
        element_system(geometry, eps, beta, delta, f_values)
    });

    let mut triplets = Vec::with_capacity(9 * t.triangles.len());
    let mut rhs = vec![0.0; space.dim()];
    for (tri, local) in t.triangles.iter().zip(&locals) {
        for (a, &vi) in tri.iter().enumerate() {
            let Some(row) = space.unknown(vi) else { continue };
            rhs[row] += local.load[a];
            for (c, &vj) in tri.iter().enumerate() {
                match space.unknown(vj) {
                    Some(col) => triplets.push((row, col, local.matrix[a][c])),
                    None => {
                        let [x, y] = t.vertices[vj];
                        rhs[row] -= local.matrix[a][c] * p.g(x, y);
                    }
                }
            }
        }
    }
    SparseSystem::new(CsrMatrix::from_triplets_structural(space.dim(), triplets), rhs)
}

/// Nodal values over all vertices; boundary vertices carry `g`.
pub fn solve_fem(p: &ProblemSpec2D, t: &Triangulation, s: DeltaStrategy) -> Result<Vec<f64>> {
    solve_fem_with(p, t, s, Execution::default())
}

pub fn solve_fem_with(p: &ProblemSpec2D, t: &Triangulation, s: DeltaStrategy, exec: Execution) -> Result<Vec<f64>> {
    let space = FemSpace::new(t)?;
    let sys = assemble_on_space(p, &space, s, exec)?;
    let solved = solve_sparse(&sys, DEFAULT_TOLERANCE)?;
    Ok(t
        .vertices
        .iter()
        .enumerate()
        .map(|(v, &[x, y])| match space.unknown(v) {
            Some(k) => solved.values[k],
            None => p.g(x, y),
        })
        .collect())
}

/// `x y value` per vertex, with a blank line whenever `y` changes, which
/// matches the finite-difference grid export for tensor triangulations.
pub fn write_nodal_text<W: Write>(t: &Triangulation, values: &[f64], mut out: W) -> Result<()> {
    if values.len() != t.vertices.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {} vertices",
            values.len(),
            t.vertices.len()
        )));
    }
    let mut previous_y = None;
    for (&[x, y], u) in t.vertices.iter().zip(values) {
        if previous_y.is_some_and(|py| py != y) {
            writeln!(out)?;
        }
        previous_y = Some(y);
        writeln!(out, "{x:.17e} {y:.17e} {u:.17e}")?;
    }
    Ok(())
}
