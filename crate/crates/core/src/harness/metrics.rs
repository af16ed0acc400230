//! Error measures, rate estimates and oscillation diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd1d::DiscreteSolution1D;
use crate::fd2d::Grid2DSolution;
use crate::mesh::{Mesh1D, TensorMesh2D};

/// Tolerance for matching coarse nodes inside a refined mesh.
pub const NESTING_TOLERANCE: f64 = 1e-12;

/// `max_i |computed_i - exact_i|`.
pub fn nodal_max_error(computed: &[f64], exact: &[f64]) -> f64 {
    assert_eq!(computed.len(), exact.len(), "value arrays differ in length");
    computed.iter().zip(exact).map(|(c, e)| (c - e).abs()).fold(0.0, f64::max)
}

/// Nodal max error against an optional exact solution.
pub fn exact_error_1d(sol: &DiscreteSolution1D, exact: Option<&dyn Fn(f64) -> f64>) -> Result<f64> {
    let exact = exact.ok_or(Error::MissingExactSolution)?;
    let reference: Vec<f64> = sol.mesh.nodes().iter().map(|&x| exact(x)).collect();
    Ok(nodal_max_error(&sol.values, &reference))
}

/// Nodal max error over the grid points accepted by `region`.
pub fn exact_error_2d(
    sol: &Grid2DSolution,
    exact: Option<&dyn Fn(f64, f64) -> f64>,
    region: impl Fn(f64, f64) -> bool,
) -> Result<f64> {
    let exact = exact.ok_or(Error::MissingExactSolution)?;
    let mut worst: f64 = 0.0;
    for j in 0..=sol.mesh.ny() {
        for i in 0..=sol.mesh.nx() {
            let [x, y] = sol.mesh.point(i, j);
            if region(x, y) {
                worst = worst.max((sol.at(i, j) - exact(x, y)).abs());
            }
        }
    }
    Ok(worst)
}

/// Position of every coarse node in the fine node list.
fn embed(coarse: &[f64], fine: &[f64]) -> Result<Vec<usize>> {
    let mut positions = Vec::with_capacity(coarse.len());
    let mut start = 0;
    for &x in coarse {
        let offset = fine[start..]
            .iter()
            .position(|&y| (y - x).abs() <= NESTING_TOLERANCE)
            .ok_or_else(|| Error::NonNestedMeshes(format!("coarse node {x} is not a node of the refined mesh")))?;
        start += offset;
        positions.push(start);
        start += 1;
    }
    Ok(positions)
}

/// `fine - coarse` at the coarse mesh nodes, which must all be nodes of the fine mesh.
pub fn two_mesh_difference_1d(coarse: &DiscreteSolution1D, fine: &DiscreteSolution1D) -> Result<Vec<f64>> {
    let positions = embed(coarse.mesh.nodes(), fine.mesh.nodes())?;
    Ok(positions.iter().zip(&coarse.values).map(|(&k, c)| fine.values[k] - c).collect())
}

/// Max difference between two solutions over the coarse mesh nodes.
pub fn two_mesh_error_1d(coarse: &DiscreteSolution1D, fine: &DiscreteSolution1D) -> Result<f64> {
    Ok(two_mesh_difference_1d(coarse, fine)?.iter().map(|d| d.abs()).fold(0.0, f64::max))
}

/// `fine - coarse` at the coarse grid points, in the coarse grid's numbering.
pub fn two_mesh_difference_2d(coarse: &Grid2DSolution, fine: &Grid2DSolution) -> Result<Vec<f64>> {
    let px = embed(coarse.mesh.x_mesh.nodes(), fine.mesh.x_mesh.nodes())?;
    let py = embed(coarse.mesh.y_mesh.nodes(), fine.mesh.y_mesh.nodes())?;
    let mut d = Vec::with_capacity(coarse.values.len());
    for (j, &fj) in py.iter().enumerate() {
        for (i, &fi) in px.iter().enumerate() {
            d.push(fine.at(fi, fj) - coarse.at(i, j));
        }
    }
    Ok(d)
}

/// Two-mesh difference on tensor grids, optionally restricted to a region.
pub fn two_mesh_error_2d(
    coarse: &Grid2DSolution,
    fine: &Grid2DSolution,
    region: impl Fn(f64, f64) -> bool,
) -> Result<f64> {
    let px = embed(coarse.mesh.x_mesh.nodes(), fine.mesh.x_mesh.nodes())?;
    let py = embed(coarse.mesh.y_mesh.nodes(), fine.mesh.y_mesh.nodes())?;
    let mut worst: f64 = 0.0;
    for (j, &fj) in py.iter().enumerate() {
        for (i, &fi) in px.iter().enumerate() {
            let [x, y] = coarse.mesh.point(i, j);
            if region(x, y) {
                worst = worst.max((coarse.at(i, j) - fine.at(fi, fj)).abs());
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    /// `e ≈ C N^{-p}`.
    Plain,
    /// `e ≈ C (N^{-1} ln N)^p`.
    LogAdjusted,
}

/// Exponent `p` between meshes with `n` and `2n` intervals.
pub fn convergence_rate(e_n: f64, e_2n: f64, n: usize, model: RateModel) -> Option<f64> {
    convergence_rate_between(e_n, e_2n, n, 2 * n, model)
}

/// Exponent `p` between arbitrary interval counts `n1 < n2`; absent when
/// either error is not a positive finite number.
pub fn convergence_rate_between(e1: f64, e2: f64, n1: usize, n2: usize, model: RateModel) -> Option<f64> {
    if !(e1 > 0.0 && e2 > 0.0 && e1.is_finite() && e2.is_finite()) || n1 < 2 || n2 <= n1 {
        return None;
    }
    let (n1, n2) = (n1 as f64, n2 as f64);
    let denominator = match model {
        RateModel::Plain => (n2 / n1).ln(),
        RateModel::LogAdjusted => ((n1.ln() / n1) / (n2.ln() / n2)).ln(),
    };
    Some((e1 / e2).ln() / denominator)
}

/// Trapezoidal (mass-lumped) weights of a 1D mesh.
pub fn lumped_weights(mesh: &Mesh1D) -> Vec<f64> {
    let n = mesh.intervals();
    let mut w = vec![0.0; n + 1];
    for i in 0..n {
        let h = mesh.width(i);
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Mass-lumped discrete L2 norm of nodal values on a 1D mesh.
pub fn discrete_l2_1d(mesh: &Mesh1D, values: &[f64]) -> f64 {
    lumped_weights(mesh).iter().zip(values).map(|(w, v)| w * v * v).sum::<f64>().sqrt()
}

/// Mass-lumped discrete L2 norm with tensor-product trapezoidal weights.
pub fn discrete_l2_2d(mesh: &TensorMesh2D, values: &[f64]) -> f64 {
    let wx = lumped_weights(&mesh.x_mesh);
    let wy = lumped_weights(&mesh.y_mesh);
    let mut sum = 0.0;
    for (j, wyj) in wy.iter().enumerate() {
        for (i, wxi) in wx.iter().enumerate() {
            let v = values[mesh.index(i, j)];
            sum += wxi * wyj * v * v;
        }
    }
    sum.sqrt()
}

pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Half the total variation in excess of the reference profile's, never negative.
///
/// A monotone computed profile scores zero against a monotone reference with
/// the same end values; every spurious overshoot-and-return adds twice its
/// height to the variation, so the score is the summed height of the wiggles.
pub fn oscillation_amplitude(computed: &[f64], reference: &[f64]) -> f64 {
    (0.5 * (total_variation(computed) - total_variation(reference))).max(0.0)
}
