//! Solving single cases and running sweeps.

use super::config::{CompareConfig, ErrorEstimator, ExperimentConfig, NormKind, Scheme};
use super::metrics::{discrete_l2_1d, discrete_l2_2d, exact_error_1d, exact_error_2d, two_mesh_difference_1d, two_mesh_difference_2d};
use super::table::{Comparison, ConvergenceTable};
use crate::error::{Error, Result};
use crate::fd1d::{solve_1d, DiscreteSolution1D};
use crate::fd2d::{solve_2d_with, Grid2DSolution};
use crate::fem2d::{solve_fem_with, DeltaStrategy};
use crate::mesh::{
    bakhvalov_mesh_1d, shishkin_mesh_1d, shishkin_with_transition, triangulate, uniform_mesh_1d, BakhvalovParams, Mesh1D,
    MeshKind, TensorMesh2D,
};
use crate::par::{map_range, Execution};
use crate::problems::{BuiltinProblem, Problem};

/// One mesh of the requested family. `lambda` pins the Shishkin transition
/// point instead of deriving it from `n`.
pub fn axis_mesh(kind: MeshKind, n: usize, eps: f64, speed: f64, lambda: Option<f64>) -> Result<Mesh1D> {
    match kind {
        MeshKind::Uniform => uniform_mesh_1d(n),
        MeshKind::Shishkin => match lambda {
            Some(l) => shishkin_with_transition(n, l),
            None => shishkin_mesh_1d(n, eps, speed),
        },
        MeshKind::Bakhvalov => bakhvalov_mesh_1d(n, eps, speed, BakhvalovParams::default()),
    }
}

/// The same family with twice as many intervals, containing every node of
/// `mesh`. Shishkin meshes keep their transition point.
pub fn refine_axis(mesh: &Mesh1D, eps: f64, speed: f64) -> Result<Mesh1D> {
    let lambda = (mesh.kind() == MeshKind::Shishkin).then(|| mesh.lambda());
    axis_mesh(mesh.kind(), 2 * mesh.intervals(), eps, speed, lambda)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Meshes {
    OneD(Mesh1D),
    TwoD(TensorMesh2D),
}

impl Meshes {
    pub fn build(problem: &BuiltinProblem, kind: MeshKind, n: usize, eps: f64) -> Result<Self> {
        let [b1, b2] = problem.layer_speeds();
        Ok(if problem.is_2d() {
            Meshes::TwoD(TensorMesh2D::new(axis_mesh(kind, n, eps, b1, None)?, axis_mesh(kind, n, eps, b2, None)?))
        } else {
            Meshes::OneD(axis_mesh(kind, n, eps, b1, None)?)
        })
    }

    pub fn refined(&self, problem: &BuiltinProblem, eps: f64) -> Result<Self> {
        let [b1, b2] = problem.layer_speeds();
        Ok(match self {
            Meshes::OneD(m) => Meshes::OneD(refine_axis(m, eps, b1)?),
            Meshes::TwoD(m) => Meshes::TwoD(TensorMesh2D::new(refine_axis(&m.x_mesh, eps, b1)?, refine_axis(&m.y_mesh, eps, b2)?)),
        })
    }
}

/// A discrete solution with its nodes. FEM solutions on triangulated tensor
/// meshes share the grid's vertex numbering and are stored as grids.
#[derive(Clone, Debug, PartialEq)]
pub enum Computed {
    OneD(DiscreteSolution1D),
    TwoD(Grid2DSolution),
}

impl Computed {
    pub fn values(&self) -> &[f64] {
        match self {
            Computed::OneD(s) => &s.values,
            Computed::TwoD(s) => &s.values,
        }
    }

    /// Error against the closed-form solution in the requested norm.
    pub fn exact_error(&self, problem: &Problem, norm: NormKind) -> Result<f64> {
        match (self, problem, norm) {
            (Computed::OneD(s), Problem::OneD(p), NormKind::Max) => exact_error_1d(s, p.exact().map(|u| u as &dyn Fn(f64) -> f64)),
            (Computed::TwoD(s), Problem::TwoD(p), NormKind::Max) => exact_error_2d(s, p.exact().map(|u| u as &dyn Fn(f64, f64) -> f64), |_, _| true),
            (Computed::OneD(s), Problem::OneD(p), NormKind::L2) => {
                let u = p.exact().ok_or(Error::MissingExactSolution)?;
                let e: Vec<f64> = s.mesh.nodes().iter().zip(&s.values).map(|(&x, v)| v - u(x)).collect();
                Ok(discrete_l2_1d(&s.mesh, &e))
            }
            (Computed::TwoD(s), Problem::TwoD(p), NormKind::L2) => {
                let u = p.exact().ok_or(Error::MissingExactSolution)?;
                let m = &s.mesh;
                let mut e = vec![0.0; m.point_count()];
                for j in 0..=m.ny() {
                    for i in 0..=m.nx() {
                        let [x, y] = m.point(i, j);
                        e[m.index(i, j)] = s.at(i, j) - u(x, y);
                    }
                }
                Ok(discrete_l2_2d(m, &e))
            }
            _ => Err(Error::DimensionMismatch("solution and problem dimensions differ".into())),
        }
    }

    /// Difference to the solution on the refined mesh, at this mesh's nodes.
    pub fn two_mesh_error(&self, fine: &Computed, norm: NormKind) -> Result<f64> {
        match (self, fine) {
            (Computed::OneD(c), Computed::OneD(f)) => {
                let d = two_mesh_difference_1d(c, f)?;
                Ok(match norm {
                    NormKind::Max => d.iter().map(|v| v.abs()).fold(0.0, f64::max),
                    NormKind::L2 => discrete_l2_1d(&c.mesh, &d),
                })
            }
            (Computed::TwoD(c), Computed::TwoD(f)) => {
                let d = two_mesh_difference_2d(c, f)?;
                Ok(match norm {
                    NormKind::Max => d.iter().map(|v| v.abs()).fold(0.0, f64::max),
                    NormKind::L2 => discrete_l2_2d(&c.mesh, &d),
                })
            }
            _ => Err(Error::DimensionMismatch("cannot compare 1D and 2D solutions".into())),
        }
    }

    /// Plot data: `x value` lines in 1D, `x y value` triples in 2D.
    pub fn write_text<W: std::io::Write>(&self, out: W) -> Result<()> {
        match self {
            Computed::OneD(s) => s.write_text(out),
            Computed::TwoD(s) => s.write_text(out),
        }
    }
}

/// Solve `problem` with `scheme` on `meshes`.
pub fn solve_on(
    problem: &Problem,
    scheme: Scheme,
    delta: Option<DeltaStrategy>,
    meshes: &Meshes,
    exec: Execution,
) -> Result<Computed> {
    match (problem, meshes) {
        (Problem::OneD(p), Meshes::OneD(m)) => {
            let kind = scheme
                .fd1d_kind()
                .ok_or_else(|| Error::DimensionMismatch(format!("scheme {scheme} needs a 2D problem")))?;
            Ok(Computed::OneD(solve_1d(p, m, kind)?))
        }
        (Problem::TwoD(p), Meshes::TwoD(m)) => match scheme {
            Scheme::Fd2dUpwind => Ok(Computed::TwoD(solve_2d_with(p, m, exec)?)),
            Scheme::FemGalerkin | Scheme::FemSdfem => {
                let strategy = scheme.delta(delta).expect("FEM scheme has a delta strategy");
                let values = solve_fem_with(p, &triangulate(m), strategy, exec)?;
                Ok(Computed::TwoD(Grid2DSolution { mesh: m.clone(), values }))
            }
            _ => Err(Error::DimensionMismatch(format!("scheme {scheme} needs a 1D problem"))),
        },
        _ => Err(Error::DimensionMismatch("problem and mesh dimensions differ".into())),
    }
}

/// A single `(problem, scheme, mesh, N, eps)` solve, as run by the `solve` command.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub problem: BuiltinProblem,
    pub scheme: Scheme,
    pub mesh: MeshKind,
    pub n: usize,
    pub eps: f64,
    pub delta: Option<DeltaStrategy>,
}

/// Outcome of [`Case::solve`].
pub struct Solved {
    pub problem: Problem,
    pub meshes: Meshes,
    pub solution: Computed,
}

impl Solved {
    pub fn max_error(&self) -> Result<f64> {
        self.solution.exact_error(&self.problem, NormKind::Max)
    }
}

impl Case {
    pub fn solve(&self) -> Result<Solved> {
        self.solve_with(Execution::default())
    }

    pub fn solve_with(&self, exec: Execution) -> Result<Solved> {
        if self.scheme.is_2d() != self.problem.is_2d() {
            return Err(Error::InvalidArgument(format!(
                "scheme {} cannot be applied to problem {}",
                self.scheme,
                self.problem.name()
            )));
        }
        if let Some(d) = self.delta {
            if self.scheme != Scheme::FemSdfem {
                return Err(Error::InvalidArgument(format!("delta strategy {d} only applies to fem-sdfem")));
            }
            d.validate()?;
        }
        let problem = self.problem.instantiate(self.eps)?;
        let meshes = Meshes::build(&self.problem, self.mesh, self.n, self.eps)?;
        let solution = solve_on(&problem, self.scheme, self.delta, &meshes, exec)?;
        Ok(Solved { problem, meshes, solution })
    }
}

pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    run_convergence_with(cfg, Execution::default())
}

/// Run every `(eps, N)` of the sweep. Rows are independent and run with
/// `exec`; a failing row is recorded in the table and the sweep continues.
pub fn run_convergence_with(cfg: &ExperimentConfig, exec: Execution) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let jobs: Vec<(f64, usize)> = cfg.eps.iter().flat_map(|&e| cfg.ns.iter().map(move |&n| (e, n))).collect();
    // Parallelism goes to the rows when there is more than one.
    let inner = if jobs.len() > 1 { Execution::Sequential } else { exec };
    let outcomes = map_range(jobs.len(), exec, |k| {
        let (eps, n) = jobs[k];
        (eps, n, evaluate(cfg, eps, n, inner))
    });
    Ok(ConvergenceTable::from_outcomes(
        cfg.problem.name().to_string(),
        cfg.scheme,
        cfg.mesh,
        cfg.norm,
        cfg.estimator,
        outcomes,
    ))
}

fn evaluate(cfg: &ExperimentConfig, eps: f64, n: usize, exec: Execution) -> Result<f64> {
    let problem = cfg.problem.instantiate(eps)?;
    let meshes = Meshes::build(&cfg.problem, cfg.mesh, n, eps)?;
    let delta = cfg.delta_strategy();
    let coarse = solve_on(&problem, cfg.scheme, delta, &meshes, exec)?;
    match cfg.estimator {
        ErrorEstimator::Exact => coarse.exact_error(&problem, cfg.norm),
        ErrorEstimator::TwoMesh => {
            let fine_meshes = meshes.refined(&cfg.problem, eps)?;
            let fine = solve_on(&problem, cfg.scheme, delta, &fine_meshes, exec)?;
            coarse.two_mesh_error(&fine, cfg.norm)
        }
    }
}

pub fn compare(cfg: &CompareConfig) -> Result<Comparison> {
    compare_with(cfg, Execution::default())
}

pub fn compare_with(cfg: &CompareConfig, exec: Execution) -> Result<Comparison> {
    cfg.validate()?;
    let first = run_convergence_with(&cfg.experiment(0), exec)?;
    let second = run_convergence_with(&cfg.experiment(1), exec)?;
    Ok(Comparison { tables: [first, second] })
}
