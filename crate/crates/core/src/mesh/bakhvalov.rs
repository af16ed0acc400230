//! Bakhvalov graded mesh.
//!
//! In the distance-from-layer coordinate `s = 1 - t` the generating function is
//!
//! ```text
//! χ(s) = -a ln(1 - s/q)              for 0 <= s <= τ,   a = σ ε / b
//! χ(s) = χ(τ) + χ'(τ) (s - τ)        for τ <= s <= 1
//! ```
//!
//! where `τ` is chosen so that the straight line is tangent to the logarithmic
//! part and passes through `χ(1) = 1`. Mesh nodes are `x_i = 1 - χ(1 - i/N)`,
//! so the fine, logarithmically graded part sits at `x = 1`.

use super::{check_even, uniform_mesh_1d, Mesh1D, MeshKind};
use crate::error::{ensure_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BakhvalovParams {
    /// Grading strength, at least 2.
    pub sigma: f64,
    /// Fraction of the parameter range mapped into the layer region, in (0, 1).
    pub q: f64,
}

impl Default for BakhvalovParams {
    fn default() -> Self {
        BakhvalovParams { sigma: 2.0, q: 0.5 }
    }
}

impl BakhvalovParams {
    fn validate(&self) -> Result<()> {
        if !(self.sigma >= 2.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma must be >= 2, got {}", self.sigma)));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::InvalidArgument(format!("q must lie in (0, 1), got {}", self.q)));
        }
        Ok(())
    }
}

/// Solution of the tangency equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tangency {
    /// Tangency point in the distance coordinate.
    pub tau: f64,
    /// `q - τ`, carried separately because it is far smaller than `τ` for small ε.
    pub gap: f64,
    /// `a = σ ε / b`.
    pub scale: f64,
    /// Value of the root equation at the returned point.
    pub residual: f64,
}

impl Tangency {
    /// Evaluate `χ(s)` for `s` in `[0, 1]`.
    pub fn generator(&self, q: f64, s: f64) -> f64 {
        if s <= self.tau {
            -self.scale * ((q - s) / q).ln()
        } else {
            let at_tau = -self.scale * (self.gap / q).ln();
            at_tau + self.scale / self.gap * (s - self.tau)
        }
    }
}

fn tangency_residual(gap: f64, scale: f64, q: f64) -> f64 {
    -scale * (gap / q).ln() + scale * (1.0 - q + gap) / gap - 1.0
}

/// Find the tangency point by bisection on `q - τ`.
///
/// Returns `None` when `σε/b >= q`: then even the line from the origin is
/// steeper than the graded part and no tangency point exists in `(0, q)`.
pub fn bakhvalov_tangency(eps: f64, b: f64, params: BakhvalovParams) -> Result<Option<Tangency>> {
    ensure_positive("eps", eps)?;
    ensure_positive("b", b)?;
    params.validate()?;
    let q = params.q;
    let scale = params.sigma * eps / b;
    if scale >= q {
        return Ok(None);
    }
    // The residual is decreasing in the gap; it is >= 1 at the lower bracket
    // and < 0 at gap = q.
    let mut lo = 0.5 * scale * (1.0 - q);
    let mut hi = q;
    let mut gap = 0.5 * (lo + hi);
    let mut residual = tangency_residual(gap, scale, q);
    for _ in 0..2000 {
        if residual.abs() < 1e-13 {
            break;
        }
        if residual > 0.0 {
            lo = gap;
        } else {
            hi = gap;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        gap = mid;
        residual = tangency_residual(gap, scale, q);
    }
    Ok(Some(Tangency { tau: q - gap, gap, scale, residual }))
}

/// Graded mesh with its fine part at `x = 1`.
///
/// Falls back to a uniform mesh (tagged `Uniform`) when ε is too large for a
/// tangency point to exist.
pub fn bakhvalov_mesh_1d(n: usize, eps: f64, b: f64, params: BakhvalovParams) -> Result<Mesh1D> {
    check_even(n)?;
    let Some(tangency) = bakhvalov_tangency(eps, b, params)? else {
        return uniform_mesh_1d(n);
    };
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(0.0);
    for i in 1..n {
        let s = (n - i) as f64 / n as f64;
        nodes.push(1.0 - tangency.generator(params.q, s));
    }
    nodes.push(1.0);
    Mesh1D::from_parts(nodes, MeshKind::Bakhvalov, 0.0)
}
