use std::io::Write;

use super::{max_abs, CsrMatrix, SparseSystem};
use crate::error::{Error, Result};

/// Tridiagonal system over the interior unknowns.
///
/// Row `k` reads `lower[k-1] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k]`,
/// so `lower[k]` is the entry `(k+1, k)` and `upper[k]` the entry `(k, k+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        let off = n.saturating_sub(1);
        if lower.len() != off || upper.len() != off || rhs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "diag {n}, lower {}, upper {}, rhs {}",
                lower.len(),
                upper.len(),
                rhs.len()
            )));
        }
        let all = lower.iter().chain(&diag).chain(&upper).chain(&rhs);
        if let Some(bad) = all.copied().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coefficient {bad}")));
        }
        Ok(TridiagonalSystem { lower, diag, upper, rhs })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `(lower, diag, upper)` coefficients of row `k`; missing neighbours are `None`.
    pub fn row(&self, k: usize) -> (Option<f64>, f64, Option<f64>) {
        let lower = if k > 0 { Some(self.lower[k - 1]) } else { None };
        let upper = self.upper.get(k).copied();
        (lower, self.diag[k], upper)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let mut s = self.diag[k] * x[k];
                if k > 0 {
                    s += self.lower[k - 1] * x[k - 1];
                }
                if k + 1 < self.len() {
                    s += self.upper[k] * x[k + 1];
                }
                s
            })
            .collect()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|k| {
                let (l, d, u) = self.row(k);
                d.abs() + l.map_or(0.0, f64::abs) + u.map_or(0.0, f64::abs)
            })
            .fold(0.0, f64::max)
    }

    /// `max |A x - rhs|`.
    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        let ax = self.matvec(x);
        max_abs(&ax.iter().zip(&self.rhs).map(|(a, b)| a - b).collect::<Vec<_>>())
    }

    pub fn to_sparse(&self) -> SparseSystem {
        let n = self.len();
        let mut triplets = Vec::with_capacity(3 * n);
        for k in 0..n {
            if k > 0 {
                triplets.push((k, k - 1, self.lower[k - 1]));
            }
            triplets.push((k, k, self.diag[k]));
            if k + 1 < n {
                triplets.push((k, k + 1, self.upper[k]));
            }
        }
        SparseSystem::new(CsrMatrix::from_triplets(n, triplets), self.rhs.clone())
            .expect("dimensions agree by construction")
    }

    /// Coordinate text dump, see [`SparseSystem::write_coordinate`].
    pub fn write_coordinate<W: Write>(&self, out: W) -> Result<()> {
        self.to_sparse().write_coordinate(out)
    }
}

/// Thomas elimination without pivoting.
///
/// Pivots stay nonzero for the M-matrices the stable schemes produce; a zero
/// (or non-finite) pivot is reported with its row index.
pub fn solve_tridiagonal(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let n = sys.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];

    let mut pivot = sys.diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::ZeroPivot { index: 0 });
    }
    if n > 1 {
        c[0] = sys.upper[0] / pivot;
    }
    d[0] = sys.rhs[0] / pivot;
    for k in 1..n {
        pivot = sys.diag[k] - sys.lower[k - 1] * c[k - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::ZeroPivot { index: k });
        }
        if k + 1 < n {
            c[k] = sys.upper[k] / pivot;
        }
        d[k] = (sys.rhs[k] - sys.lower[k - 1] * d[k - 1]) / pivot;
    }

    let mut x = d;
    for k in (0..n - 1).rev() {
        x[k] -= c[k] * x[k + 1];
    }
    Ok(x)
}
