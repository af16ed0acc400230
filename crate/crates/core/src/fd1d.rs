//! Central, upwind and exponentially fitted (Il'in) difference schemes for
//! `-ε u'' + b(x) u' = f(x)` on arbitrary 1D meshes.
//!
//! At an interior node `x_i` with neighbouring widths `h_i = x_i - x_{i-1}`,
//! `h_{i+1} = x_{i+1} - x_i` and `ĥ_i = (h_i + h_{i+1}) / 2`, every scheme
//! uses the weighted second difference
//!
//! ```text
//! -ε σ_i [ (u_{i+1} - u_i) / h_{i+1} - (u_i - u_{i-1}) / h_i ] / ĥ_i
//! ```
//!
//! with `σ_i = 1` for central and upwind and `σ_i = ρ coth ρ`,
//! `ρ = b(x_i) h / (2ε)`, for Il'in. The convective term is the centred
//! difference `b (u_{i+1} - u_{i-1}) / (h_i + h_{i+1})` for central and Il'in
//! and the backward difference `b (u_i - u_{i-1}) / h_i` for upwind.
//! Coefficients are frozen at the node.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_tridiagonal, TridiagonalSystem};
use crate::mesh::Mesh1D;
use crate::problems::ProblemSpec1D;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Central,
    Upwind,
    /// Exponentially fitted central scheme; uniform meshes only.
    Ilin,
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SchemeKind::Central => "central",
            SchemeKind::Upwind => "upwind",
            SchemeKind::Ilin => "ilin",
        })
    }
}

/// `ρ coth ρ`, the diffusion multiplier that makes the centred scheme
/// nodally exact for constant-coefficient problems.
pub fn fitting_factor(rho: f64) -> f64 {
    if rho < 1e-4 {
        1.0 + rho * rho / 3.0
    } else {
        // ρ coth ρ = ρ (1 + e^{-2ρ}) / (1 - e^{-2ρ}); no overflow for large ρ.
        let e = (-2.0 * rho).exp();
        rho * (1.0 + e) / -(-2.0 * rho).exp_m1()
    }
}

/// Diffusion coefficient for which central differencing reproduces upwinding
/// of `-ε u'' + u'` on a uniform mesh of width `h`: `ε + h/2`.
///
/// The identity assumes unit convection; for a constant `b` the extra
/// diffusion is `b h / 2`.
pub fn equivalent_diffusion(eps: f64, h: f64) -> f64 {
    eps + h / 2.0
}

/// Assemble the interior system; boundary values are moved to the right-hand side.
pub fn assemble_1d(p: &ProblemSpec1D, m: &Mesh1D, scheme: SchemeKind) -> Result<TridiagonalSystem> {
    if scheme == SchemeKind::Ilin && !m.is_uniform() {
        return Err(Error::IlinOnNonUniformMesh);
    }
    let n = m.intervals();
    let unknowns = n.saturating_sub(1);
    let x = m.nodes();
    let eps = p.eps();
    let mut lower = vec![0.0; unknowns.saturating_sub(1)];
    let mut diag = vec![0.0; unknowns];
    let mut upper = vec![0.0; unknowns.saturating_sub(1)];
    let mut rhs = vec![0.0; unknowns];

    for k in 0..unknowns {
        let i = k + 1;
        let h_left = x[i] - x[i - 1];
        let h_right = x[i + 1] - x[i];
        let h_mean = 0.5 * (h_left + h_right);
        let b = p.b(x[i]);
        let sigma = match scheme {
            SchemeKind::Ilin => fitting_factor(b * h_left / (2.0 * eps)),
            _ => 1.0,
        };
        let d_left = eps * sigma / (h_left * h_mean);
        let d_right = eps * sigma / (h_right * h_mean);
        let (c_left, c_mid, c_right) = match scheme {
            SchemeKind::Central | SchemeKind::Ilin => {
                let c = b / (h_left + h_right);
                (-c, 0.0, c)
            }
            SchemeKind::Upwind => (-b / h_left, b / h_left, 0.0),
        };
        let a_left = -d_left + c_left;
        let a_mid = d_left + d_right + c_mid;
        let a_right = -d_right + c_right;

        diag[k] = a_mid;
        rhs[k] = p.f(x[i]);
        if k > 0 {
            lower[k - 1] = a_left;
        } else {
            rhs[k] -= a_left * p.u_left();
        }
        if k + 1 < unknowns {
            upper[k] = a_right;
        } else {
            rhs[k] -= a_right * p.u_right();
        }
    }
    TridiagonalSystem::new(lower, diag, upper, rhs)
}

/// Nodal values on a 1D mesh, boundary values included.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSolution1D {
    pub mesh: Mesh1D,
    pub values: Vec<f64>,
}

impl DiscreteSolution1D {
    /// Sign changes among the differences of the computed (interior) values.
    ///
    /// Boundary values are imposed rather than computed, and the jump across an
    /// unresolved outflow layer into the boundary value is the physical layer,
    /// not an oscillation, so only `values[1..N]` are scanned.
    pub fn oscillation_index(&self) -> usize {
        let n = self.values.len();
        if n < 3 {
            return 0;
        }
        oscillation_index(&self.values[1..n - 1])
    }

    pub fn max_error(&self, exact: &dyn Fn(f64) -> f64) -> f64 {
        self.mesh
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&x, &u)| (u - exact(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Two-column `x value` text for plotting.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for (x, u) in self.mesh.nodes().iter().zip(&self.values) {
            writeln!(out, "{x:.17e} {u:.17e}")?;
        }
        Ok(())
    }
}

/// Number of sign changes in the sequence of consecutive differences,
/// ignoring differences smaller than `1e-13` in magnitude.
pub fn oscillation_index(values: &[f64]) -> usize {
    let mut changes = 0;
    let mut previous_sign = 0i8;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d.abs() < 1e-13 {
            continue;
        }
        let sign = if d > 0.0 { 1 } else { -1 };
        if previous_sign != 0 && sign != previous_sign {
            changes += 1;
        }
        previous_sign = sign;
    }
    changes
}

pub fn solve_1d(p: &ProblemSpec1D, m: &Mesh1D, scheme: SchemeKind) -> Result<DiscreteSolution1D> {
    let sys = assemble_1d(p, m, scheme)?;
    let interior = solve_tridiagonal(&sys)?;
    let mut values = Vec::with_capacity(m.intervals() + 1);
    values.push(p.u_left());
    values.extend(interior);
    values.push(p.u_right());
    Ok(DiscreteSolution1D { mesh: m.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_m_matrix, Violation};
    use crate::mesh::{shishkin_mesh_1d, uniform_mesh_1d};
    use crate::problems::model_problem_p1;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn central_stencil() {
        let p = ProblemSpec1D::constant(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let sys = assemble_1d(&p, &uniform_mesh_1d(4).unwrap(), SchemeKind::Central).unwrap();
        let (l, d, u) = sys.row(1);
        assert!(close(l.unwrap(), -18.0, 1e-14));
        assert!(close(d, 32.0, 1e-14));
        assert!(close(u.unwrap(), -14.0, 1e-14));
    }

    #[test]
    fn upwind_stencil() {
        let p = ProblemSpec1D::constant(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let sys = assemble_1d(&p, &uniform_mesh_1d(4).unwrap(), SchemeKind::Upwind).unwrap();
        let (l, d, u) = sys.row(1);
        assert!(close(l.unwrap(), -20.0, 1e-14));
        assert!(close(d, 36.0, 1e-14));
        assert!(close(u.unwrap(), -16.0, 1e-14));
    }

    #[test]
    fn ilin_reduces_to_central_for_large_eps() {
        let p = ProblemSpec1D::constant(1e6, 1.0, 1.0, 0.0, 0.0).unwrap();
        let m = uniform_mesh_1d(8).unwrap();
        let a = assemble_1d(&p, &m, SchemeKind::Ilin).unwrap();
        let b = assemble_1d(&p, &m, SchemeKind::Central).unwrap();
        for k in 0..a.len() {
            assert!(close(a.diag[k], b.diag[k], 1e-10));
        }
        for k in 0..a.lower.len() {
            assert!(close(a.lower[k], b.lower[k], 1e-10));
            assert!(close(a.upper[k], b.upper[k], 1e-10));
        }
    }

    #[test]
    fn ilin_rejects_graded_mesh() {
        let p = model_problem_p1(1e-3).unwrap();
        let m = shishkin_mesh_1d(16, 1e-3, 1.0).unwrap();
        assert!(matches!(assemble_1d(&p, &m, SchemeKind::Ilin), Err(Error::IlinOnNonUniformMesh)));
    }

    #[test]
    fn fitting_factor_values() {
        assert!((fitting_factor(1e-8) - 1.0).abs() < 1e-15);
        let coth1 = 1.0f64.cosh() / 1.0f64.sinh();
        assert!((fitting_factor(1.0) - coth1).abs() < 1e-15);
        assert!((fitting_factor(1.0) - 1.313_035_3).abs() < 1e-7);
        assert!(((fitting_factor(50.0) - 50.0) / 50.0).abs() < 1e-15);
        assert!(fitting_factor(1e6).is_finite());
        // Both branches agree at the switch point.
        let r: f64 = 1e-4;
        let direct = r * (1.0 + (-2.0 * r).exp()) / -(-2.0 * r).exp_m1();
        assert!((fitting_factor(r * 0.999_999) - direct).abs() < 1e-12);
    }

    #[test]
    fn equivalent_diffusion_values() {
        assert!((equivalent_diffusion(1e-6, 0.1) - 0.050_001).abs() < 1e-16);
        assert_eq!(equivalent_diffusion(0.3, 0.0), 0.3);
    }

    #[test]
    fn m_matrix_examples() {
        let m = uniform_mesh_1d(10).unwrap();
        let p = ProblemSpec1D::constant(1e-3, 1.0, 0.0, 0.0, 0.0).unwrap();
        let upwind = assemble_1d(&p, &m, SchemeKind::Upwind).unwrap();
        assert!(close(upwind.row(1).2.unwrap(), -0.1, 1e-12));
        assert!(is_m_matrix(&upwind).is_candidate);

        let central = assemble_1d(&p, &m, SchemeKind::Central).unwrap();
        let report = is_m_matrix(&central);
        assert!(!report.is_candidate);
        let positive: Vec<f64> = report
            .violations
            .iter()
            .filter_map(|v| match v {
                Violation::PositiveOffDiagonal { value, .. } => Some(*value),
                _ => None,
            })
            .collect();
        assert!(!positive.is_empty());
        assert!(positive.iter().all(|v| close(*v, 4.9, 1e-12)));

        let p = ProblemSpec1D::constant(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(is_m_matrix(&assemble_1d(&p, &m, SchemeKind::Central).unwrap()).is_candidate);
    }

    #[test]
    fn homogeneous_problem_gives_zero() {
        let p = model_problem_p1(1e-2).unwrap().with_source(|_| 0.0);
        let sol = solve_1d(&p, &uniform_mesh_1d(16).unwrap(), SchemeKind::Upwind).unwrap();
        assert!(sol.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ilin_is_nodally_exact() {
        let p = model_problem_p1(0.01).unwrap();
        let sol = solve_1d(&p, &uniform_mesh_1d(16).unwrap(), SchemeKind::Ilin).unwrap();
        assert!(sol.max_error(p.exact().unwrap()) < 1e-10);
    }

    #[test]
    fn upwind_monotone_central_oscillates() {
        let p = model_problem_p1(1e-6).unwrap();
        let m = uniform_mesh_1d(16).unwrap();
        let up = solve_1d(&p, &m, SchemeKind::Upwind).unwrap();
        assert_eq!(up.oscillation_index(), 0);
        assert!(up.values[1..16].windows(2).all(|w| w[1] >= w[0]));
        let central = solve_1d(&p, &m, SchemeKind::Central).unwrap();
        assert!(central.oscillation_index() >= 1);
    }

    #[test]
    fn upwind_smears_layer() {
        let p = model_problem_p1(1e-6).unwrap();
        let m = uniform_mesh_1d(16).unwrap();
        let up = solve_1d(&p, &m, SchemeKind::Upwind).unwrap();
        let fitted = solve_1d(&p, &m, SchemeKind::Ilin).unwrap();
        assert!(up.values[15] < fitted.values[15]);
    }

    #[test]
    fn oscillation_index_sequences() {
        assert_eq!(oscillation_index(&[0.0, 0.1, 0.5, 2.0]), 0);
        let n = 9;
        let alternating: Vec<f64> = (0..=n).map(|i| (i % 2) as f64).collect();
        assert_eq!(oscillation_index(&alternating), n - 1);
        assert_eq!(oscillation_index(&[1.0, 1.0 + 1e-15, 1.0]), 0);
    }

    #[test]
    fn single_interval_mesh() {
        let p = ProblemSpec1D::constant(0.1, 1.0, 1.0, 0.5, 2.0).unwrap();
        let sol = solve_1d(&p, &uniform_mesh_1d(1).unwrap(), SchemeKind::Upwind).unwrap();
        assert_eq!(sol.values, vec![0.5, 2.0]);
    }

    #[test]
    fn plot_export() {
        let p = model_problem_p1(0.1).unwrap();
        let sol = solve_1d(&p, &uniform_mesh_1d(4).unwrap(), SchemeKind::Upwind).unwrap();
        let mut buf = Vec::new();
        sol.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().next().unwrap().split_whitespace().count(), 2);
    }
}
