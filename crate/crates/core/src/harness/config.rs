//! JSON experiment descriptions.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::fd1d::SchemeKind;
use crate::fem2d::DeltaStrategy;
use crate::mesh::MeshKind;
use crate::problems::BuiltinProblem;

/// Discretization selected by name on the command line and in configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Central,
    Upwind,
    Ilin,
    Fd2dUpwind,
    FemGalerkin,
    FemSdfem,
}

impl Scheme {
    pub const ALL: [Scheme; 6] =
        [Scheme::Central, Scheme::Upwind, Scheme::Ilin, Scheme::Fd2dUpwind, Scheme::FemGalerkin, Scheme::FemSdfem];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Central => "central",
            Scheme::Upwind => "upwind",
            Scheme::Ilin => "ilin",
            Scheme::Fd2dUpwind => "fd2d-upwind",
            Scheme::FemGalerkin => "fem-galerkin",
            Scheme::FemSdfem => "fem-sdfem",
        }
    }

    pub fn is_2d(self) -> bool {
        matches!(self, Scheme::Fd2dUpwind | Scheme::FemGalerkin | Scheme::FemSdfem)
    }

    pub fn is_fem(self) -> bool {
        matches!(self, Scheme::FemGalerkin | Scheme::FemSdfem)
    }

    pub fn fd1d_kind(self) -> Option<SchemeKind> {
        match self {
            Scheme::Central => Some(SchemeKind::Central),
            Scheme::Upwind => Some(SchemeKind::Upwind),
            Scheme::Ilin => Some(SchemeKind::Ilin),
            _ => None,
        }
    }

    /// Effective δ strategy for FEM schemes: Galerkin ignores streamline
    /// diffusion, SDFEM uses the requested strategy or the default.
    pub fn delta(self, requested: Option<DeltaStrategy>) -> Option<DeltaStrategy> {
        match self {
            Scheme::FemGalerkin => Some(DeltaStrategy::GalerkinZero),
            Scheme::FemSdfem => Some(requested.unwrap_or_default()),
            _ => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = Scheme::ALL.iter().map(|k| k.name()).collect();
            Error::InvalidArgument(format!("unknown scheme '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Maximum over mesh nodes.
    #[default]
    Max,
    /// Mass-lumped discrete L2.
    L2,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorEstimator {
    /// Compare with the problem's closed-form solution.
    #[default]
    Exact,
    /// Compare with the solution on the mesh refined once, at the coarse nodes.
    TwoMesh,
}

/// A sweep over interval counts and diffusion coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(deserialize_with = "problem_by_name_or_object")]
    pub problem: BuiltinProblem,
    pub scheme: Scheme,
    pub mesh: MeshKind,
    #[serde(rename = "N", alias = "ns")]
    pub ns: Vec<usize>,
    pub eps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaStrategy>,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default)]
    pub estimator: ErrorEstimator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Two schemes run on the same sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(deserialize_with = "problem_by_name_or_object")]
    pub problem: BuiltinProblem,
    pub schemes: [Scheme; 2],
    pub mesh: MeshKind,
    #[serde(rename = "N", alias = "ns")]
    pub ns: Vec<usize>,
    pub eps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaStrategy>,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default)]
    pub estimator: ErrorEstimator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn problem_by_name_or_object<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BuiltinProblem, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        Name(String),
        Full(BuiltinProblem),
    }
    match Either::deserialize(d)? {
        Either::Name(name) => BuiltinProblem::from_name(&name).map_err(serde::de::Error::custom),
        Either::Full(p) => Ok(p),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(&self.problem, self.scheme, self.mesh, &self.ns, &self.eps, self.delta)
    }

    /// Effective δ strategy (FEM schemes only).
    pub fn delta_strategy(&self) -> Option<DeltaStrategy> {
        self.scheme.delta(self.delta)
    }
}

impl CompareConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CompareConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes[0] == self.schemes[1] && !self.schemes[0].is_fem() {
            return Err(Error::Config("compare needs two different schemes".into()));
        }
        for scheme in self.schemes {
            validate_common(&self.problem, scheme, self.mesh, &self.ns, &self.eps, self.delta.filter(|_| scheme == Scheme::FemSdfem))?;
        }
        Ok(())
    }

    /// The single-scheme sweep for `schemes[k]`.
    pub fn experiment(&self, k: usize) -> ExperimentConfig {
        let scheme = self.schemes[k];
        ExperimentConfig {
            problem: self.problem.clone(),
            scheme,
            mesh: self.mesh,
            ns: self.ns.clone(),
            eps: self.eps.clone(),
            delta: self.delta.filter(|_| scheme == Scheme::FemSdfem),
            norm: self.norm,
            estimator: self.estimator,
            output: None,
        }
    }
}

fn validate_common(
    problem: &BuiltinProblem,
    scheme: Scheme,
    mesh: MeshKind,
    ns: &[usize],
    eps: &[f64],
    delta: Option<DeltaStrategy>,
) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::Config("the list of N values is empty".into()));
    }
    if eps.is_empty() {
        return Err(Error::Config("the list of eps values is empty".into()));
    }
    if let Some(&e) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::Config(format!("eps values must be positive, got {e}")));
    }
    if ns.iter().any(|&n| n < 2) {
        return Err(Error::Config("N values must be at least 2".into()));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("N values must be strictly increasing, got {ns:?}")));
    }
    if mesh == MeshKind::Shishkin {
        if let Some(&n) = ns.iter().find(|&&n| n % 2 != 0) {
            return Err(Error::Config(format!("Shishkin meshes need even N, got {n}")));
        }
    }
    if scheme == Scheme::Ilin && mesh != MeshKind::Uniform {
        return Err(Error::Config("the ilin scheme requires the uniform mesh".into()));
    }
    if scheme.is_2d() != problem.is_2d() {
        return Err(Error::Config(format!(
            "scheme {scheme} is {}D but problem {} is {}D",
            if scheme.is_2d() { 2 } else { 1 },
            problem.name(),
            if problem.is_2d() { 2 } else { 1 },
        )));
    }
    match (scheme, delta) {
        (_, None) => {}
        (Scheme::FemSdfem, Some(d)) => d.validate()?,
        (Scheme::FemGalerkin, Some(DeltaStrategy::GalerkinZero)) => {}
        (s, Some(d)) => return Err(Error::Config(format!("delta strategy {d} does not apply to scheme {s}"))),
    }
    Ok(())
}
