//! Continuous problems `-ε Δu + b·∇u = f` with Dirichlet data, plus the exact
//! solutions used as oracles.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

pub type ScalarFn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ScalarFn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `-ε u'' + b(x) u' = f(x)` on `(0, 1)` with `u(0) = u_left`, `u(1) = u_right`.
#[derive(Clone)]
pub struct ProblemSpec1D {
    eps: f64,
    convection: ScalarFn1,
    beta: f64,
    source: ScalarFn1,
    u_left: f64,
    u_right: f64,
    exact: Option<ScalarFn1>,
}

impl fmt::Debug for ProblemSpec1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec1D")
            .field("eps", &self.eps)
            .field("beta", &self.beta)
            .field("u_left", &self.u_left)
            .field("u_right", &self.u_right)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

const COEFFICIENT_SAMPLES: usize = 1000;

impl ProblemSpec1D {
    /// `beta` is the claimed positive lower bound of `b` on `[0, 1]`; it is
    /// checked on a uniform sample of the interval.
    pub fn new(
        eps: f64,
        convection: impl Fn(f64) -> f64 + Send + Sync + 'static,
        beta: f64,
        source: impl Fn(f64) -> f64 + Send + Sync + 'static,
        u_left: f64,
        u_right: f64,
    ) -> Result<Self> {
        ensure_positive("eps", eps)?;
        ensure_positive("beta", beta)?;
        for k in 0..=COEFFICIENT_SAMPLES {
            let x = k as f64 / COEFFICIENT_SAMPLES as f64;
            let bx = convection(x);
            if !(bx >= beta) {
                return Err(Error::InvalidArgument(format!(
                    "convection b({x}) = {bx} is below the lower bound {beta}"
                )));
            }
        }
        Ok(ProblemSpec1D {
            eps,
            convection: Arc::new(convection),
            beta,
            source: Arc::new(source),
            u_left,
            u_right,
            exact: None,
        })
    }

    pub fn constant(eps: f64, b: f64, f: f64, u_left: f64, u_right: f64) -> Result<Self> {
        Self::new(eps, move |_| b, b, move |_| f, u_left, u_right)
    }

    /// Attach an exact solution; it must reproduce the boundary data to 1e-12.
    pub fn with_exact(mut self, exact: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let (l, r) = (exact(0.0), exact(1.0));
        if (l - self.u_left).abs() > 1e-12 || (r - self.u_right).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "exact solution boundary values ({l}, {r}) do not match ({}, {})",
                self.u_left, self.u_right
            )));
        }
        self.exact = Some(Arc::new(exact));
        Ok(self)
    }

    /// Replace the source term. Any attached exact solution is dropped.
    pub fn with_source(mut self, source: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Arc::new(source);
        self.exact = None;
        self
    }

    /// Replace the boundary data. Any attached exact solution is dropped.
    pub fn with_boundary(mut self, u_left: f64, u_right: f64) -> Self {
        self.u_left = u_left;
        self.u_right = u_right;
        self.exact = None;
        self
    }

    /// Same problem with a different diffusion coefficient. Drops the exact solution.
    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        ensure_positive("eps", eps)?;
        self.eps = eps;
        self.exact = None;
        Ok(self)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn b(&self, x: f64) -> f64 {
        (self.convection)(x)
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.source)(x)
    }

    pub fn u_left(&self) -> f64 {
        self.u_left
    }

    pub fn u_right(&self) -> f64 {
        self.u_right
    }

    pub fn exact(&self) -> Option<&(dyn Fn(f64) -> f64 + Send + Sync)> {
        self.exact.as_deref()
    }
}

/// `u(x) = 2x + 2 (e^{-1/ε} - e^{-(1-x)/ε}) / (1 - e^{-1/ε})`, evaluated
/// without forming any positive exponent.
pub fn p1_exact(eps: f64, x: f64) -> f64 {
    // e^{-1/ε} - e^{-(1-x)/ε} = e^{-(1-x)/ε} (e^{-x/ε} - 1)
    let numerator = (-(1.0 - x) / eps).exp() * (-x / eps).exp_m1();
    let denominator = -(-1.0 / eps).exp_m1();
    2.0 * x + 2.0 * numerator / denominator
}

/// `-ε u'' + u' = 2`, `u(0) = u(1) = 0`, with its closed-form solution attached.
pub fn model_problem_p1(eps: f64) -> Result<ProblemSpec1D> {
    ProblemSpec1D::constant(eps, 1.0, 2.0, 0.0, 0.0)?.with_exact(move |x| p1_exact(eps, x))
}

/// Split of the model-problem solution into reduced solution, outflow layer,
/// and a bound on the rest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerDecomposition {
    pub smooth_part: f64,
    pub layer_part: f64,
    pub remainder_bound: f64,
}

pub fn evaluate_layer_decomposition(eps: f64, x: f64) -> LayerDecomposition {
    LayerDecomposition {
        smooth_part: 2.0 * x,
        layer_part: -2.0 * (-(1.0 - x) / eps).exp(),
        remainder_bound: (-1.0 / eps).exp(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Left,
    Right,
    Bottom,
    Top,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Left, Edge::Right, Edge::Bottom, Edge::Top];

    pub fn outward_normal(self) -> [f64; 2] {
        match self {
            Edge::Left => [-1.0, 0.0],
            Edge::Right => [1.0, 0.0],
            Edge::Bottom => [0.0, -1.0],
            Edge::Top => [0.0, 1.0],
        }
    }
}

/// Partition of the open edges of the unit square by the sign of `b·n`.
/// Corners belong to no set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundaryPartition {
    pub inflow: Vec<Edge>,
    pub outflow: Vec<Edge>,
    pub tangential: Vec<Edge>,
}

pub fn classify_boundary(b: [f64; 2]) -> Result<BoundaryPartition> {
    let norm = b[0].hypot(b[1]);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidArgument("convection vector must be nonzero".into()));
    }
    let mut partition = BoundaryPartition::default();
    for edge in Edge::ALL {
        let n = edge.outward_normal();
        let flux = (b[0] * n[0] + b[1] * n[1]) / norm;
        if flux.abs() <= 1e-14 {
            partition.tangential.push(edge);
        } else if flux < 0.0 {
            partition.inflow.push(edge);
        } else {
            partition.outflow.push(edge);
        }
    }
    Ok(partition)
}

/// `-ε Δu + b·∇u = f` on the unit square with `u = g` on the boundary and a
/// constant convection vector `b`.
///
/// `b` is kept as given; [`unit_beta`](Self::unit_beta),
/// [`scaled_eps`](Self::scaled_eps) and [`scaled_source`](Self::scaled_source)
/// give the equivalent equation divided by `|b|`, which has unit convection
/// and the same solution.
#[derive(Clone)]
pub struct ProblemSpec2D {
    eps: f64,
    beta: [f64; 2],
    speed: f64,
    source: ScalarFn2,
    dirichlet: ScalarFn2,
    exact: Option<ScalarFn2>,
}

impl fmt::Debug for ProblemSpec2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec2D")
            .field("eps", &self.eps)
            .field("beta", &self.beta)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec2D {
    pub fn new(
        eps: f64,
        beta: [f64; 2],
        source: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dirichlet: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        ensure_positive("eps", eps)?;
        let speed = beta[0].hypot(beta[1]);
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::InvalidArgument("convection vector must be nonzero and finite".into()));
        }
        Ok(ProblemSpec2D {
            eps,
            beta,
            speed,
            source: Arc::new(source),
            dirichlet: Arc::new(dirichlet),
            exact: None,
        })
    }

    pub fn with_exact(mut self, exact: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn beta(&self) -> [f64; 2] {
        self.beta
    }

    /// `|b|`.
    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn unit_beta(&self) -> [f64; 2] {
        [self.beta[0] / self.speed, self.beta[1] / self.speed]
    }

    pub fn scaled_eps(&self) -> f64 {
        self.eps / self.speed
    }

    pub fn f(&self, x: f64, y: f64) -> f64 {
        (self.source)(x, y)
    }

    pub fn scaled_source(&self, x: f64, y: f64) -> f64 {
        (self.source)(x, y) / self.speed
    }

    pub fn g(&self, x: f64, y: f64) -> f64 {
        (self.dirichlet)(x, y)
    }

    pub fn exact(&self) -> Option<&(dyn Fn(f64, f64) -> f64 + Send + Sync)> {
        self.exact.as_deref()
    }

    pub fn boundary_partition(&self) -> BoundaryPartition {
        classify_boundary(self.beta).expect("beta validated on construction")
    }
}

/// One-dimensional layer profile `g(s; c) = s - (e^{-c(1-s)/ε} - e^{-c/ε}) / (1 - e^{-c/ε})`.
///
/// It satisfies `-ε g'' + c g' = c` with `g(0) = g(1) = 0`.
pub fn layer_profile(eps: f64, c: f64, s: f64) -> f64 {
    let numerator = -(-c * (1.0 - s) / eps).exp() * (-c * s / eps).exp_m1();
    let denominator = -(-c / eps).exp_m1();
    s - numerator / denominator
}

/// Manufactured problem with exact solution `u = g(x; b1) g(y; b2)`.
///
/// Because each factor satisfies `-ε g'' + c g' = c`, the product rule gives
/// the smooth source `f = b1 g(y; b2) + b2 g(x; b1)`.
pub fn manufactured_2d(eps: f64, b: [f64; 2]) -> Result<ProblemSpec2D> {
    ensure_positive("eps", eps)?;
    ensure_positive("b1", b[0])?;
    ensure_positive("b2", b[1])?;
    let [b1, b2] = b;
    let source = move |x: f64, y: f64| b1 * layer_profile(eps, b2, y) + b2 * layer_profile(eps, b1, x);
    let exact = move |x: f64, y: f64| layer_profile(eps, b1, x) * layer_profile(eps, b2, y);
    Ok(ProblemSpec2D::new(eps, b, source, |_, _| 0.0)?.with_exact(exact))
}

/// Built-in problems addressable by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum BuiltinProblem {
    /// `-ε u'' + u' = 2`, homogeneous Dirichlet data.
    P1,
    /// Manufactured 2D problem with layers at `x = 1` and `y = 1`.
    Mms2d {
        #[serde(default = "default_mms_beta")]
        b: [f64; 2],
    },
}

fn default_mms_beta() -> [f64; 2] {
    [1.0, 1.0]
}

pub enum Problem {
    OneD(ProblemSpec1D),
    TwoD(ProblemSpec2D),
}

impl BuiltinProblem {
    /// Look up a problem by name with default parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "p1" => Ok(BuiltinProblem::P1),
            "mms2d" => Ok(BuiltinProblem::Mms2d { b: default_mms_beta() }),
            other => Err(Error::InvalidArgument(format!(
                "unknown problem '{other}' (expected p1 or mms2d)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinProblem::P1 => "p1",
            BuiltinProblem::Mms2d { .. } => "mms2d",
        }
    }

    pub fn is_2d(&self) -> bool {
        matches!(self, BuiltinProblem::Mms2d { .. })
    }

    /// Convection magnitudes along x and y that layer-adapted meshes use.
    pub fn layer_speeds(&self) -> [f64; 2] {
        match self {
            BuiltinProblem::P1 => [1.0, 1.0],
            BuiltinProblem::Mms2d { b } => *b,
        }
    }

    pub fn instantiate(&self, eps: f64) -> Result<Problem> {
        match self {
            BuiltinProblem::P1 => Ok(Problem::OneD(model_problem_p1(eps)?)),
            BuiltinProblem::Mms2d { b } => Ok(Problem::TwoD(manufactured_2d(eps, *b)?)),
        }
    }
}
