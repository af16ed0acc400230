use super::{max_abs, SparseSystem};
use crate::error::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Right-preconditioned BiCGSTAB with a diagonal (Jacobi) preconditioner.
///
/// Stops once the normwise backward error of the iterate is below `tol`.
/// Breakdowns restart the recurrence from the true residual.
pub(crate) fn bicgstab_jacobi(sys: &SparseSystem, tol: f64, max_iterations: usize) -> Result<(Vec<f64>, usize)> {
    let a = &sys.matrix;
    let b = &sys.rhs;
    let n = b.len();
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let norm_a = a.norm_inf();
    let norm_b = max_abs(b);
    let backward_error = |r: &[f64], x: &[f64]| {
        let scale = norm_a * max_abs(x) + norm_b;
        if scale == 0.0 {
            0.0
        } else {
            max_abs(r) / scale
        }
    };

    let mut x = vec![0.0; n];
    let mut r = b.clone();
    if backward_error(&r, &x) <= tol {
        return Ok((x, 0));
    }
    let mut r_hat = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut last = backward_error(&r, &x);

    for iteration in 1..=max_iterations {
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < f64::MIN_POSITIVE || omega == 0.0 {
            restart(sys, &mut x, &mut r, &mut r_hat, &mut p, &mut v);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = inv_diag[i] * p[i];
        }
        a.matvec_into(&y, &mut v);
        let denom = dot(&r_hat, &v);
        if denom.abs() < f64::MIN_POSITIVE {
            restart(sys, &mut x, &mut r, &mut r_hat, &mut p, &mut v);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            continue;
        }
        alpha = rho / denom;
        // r now holds s = r - α v
        for i in 0..n {
            r[i] -= alpha * v[i];
        }
        let half_step: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| xi + alpha * yi).collect();
        if backward_error(&r, &half_step) <= tol {
            x = half_step;
            if let Some(done) = accept(sys, &x, tol, iteration, &backward_error) {
                return Ok(done);
            }
            restart(sys, &mut x, &mut r, &mut r_hat, &mut p, &mut v);
            continue;
        }
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
        }
        a.matvec_into(&z, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &r) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] -= omega * t[i];
        }
        last = backward_error(&r, &x);
        if last <= tol {
            if let Some(done) = accept(sys, &x, tol, iteration, &backward_error) {
                return Ok(done);
            }
            restart(sys, &mut x, &mut r, &mut r_hat, &mut p, &mut v);
        }
    }
    Err(Error::NotConverged { iterations: max_iterations, residual: last })
}

fn true_residual(sys: &SparseSystem, x: &[f64]) -> Vec<f64> {
    let ax = sys.matrix.matvec(x);
    sys.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect()
}

fn accept(
    sys: &SparseSystem,
    x: &[f64],
    tol: f64,
    iteration: usize,
    backward_error: &dyn Fn(&[f64], &[f64]) -> f64,
) -> Option<(Vec<f64>, usize)> {
    let r = true_residual(sys, x);
    (backward_error(&r, x) <= tol).then(|| (x.to_vec(), iteration))
}

fn restart(sys: &SparseSystem, x: &mut [f64], r: &mut Vec<f64>, r_hat: &mut Vec<f64>, p: &mut [f64], v: &mut [f64]) {
    *r = true_residual(sys, x);
    *r_hat = r.clone();
    p.fill(0.0);
    v.fill(0.0);
}
