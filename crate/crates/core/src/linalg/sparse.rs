use std::io::Write;

use super::banded::BandLu;
use super::krylov::bicgstab_jacobi;
use super::max_abs;
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Square row-compressed matrix. Column indices are strictly increasing within
/// each row. Explicit zeros are only stored when built with
/// [`from_triplets_structural`](Self::from_triplets_structural).
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from `(row, col, value)` triplets. Duplicates are summed in input
    /// order, so the result is deterministic for a fixed triplet sequence.
    pub fn from_triplets(n: usize, triplets: Vec<(usize, usize, f64)>) -> Self {
        Self::build(n, triplets, true)
    }

    /// Like [`from_triplets`](Self::from_triplets), but every position that
    /// appears in a triplet is stored even if its entries cancel, so the
    /// pattern reflects the connectivity that produced it.
    pub fn from_triplets_structural(n: usize, triplets: Vec<(usize, usize, f64)>) -> Self {
        Self::build(n, triplets, false)
    }

    fn build(n: usize, mut triplets: Vec<(usize, usize, f64)>, drop_zeros: bool) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        let mut kept_cols = Vec::with_capacity(col_idx.len());
        let mut kept_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != 0.0 || !drop_zeros {
                row_ptr[r + 1] += 1;
                kept_cols.push(c);
                kept_vals.push(v);
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n, row_ptr, col_idx: kept_cols, values: kept_vals }
    }

    /// Build from rows already in CSR order (columns strictly increasing).
    pub(crate) fn from_sorted_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for row in rows {
            let mut prev = None;
            for (c, v) in row {
                debug_assert!(prev.is_none_or(|p| p < c));
                prev = Some(c);
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub(crate) fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `(lower, upper)` bandwidths: the largest `i - j` and `j - i` over stored entries.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                if j < i {
                    lower = lower.max(i - j);
                } else {
                    upper = upper.max(j - i);
                }
            }
        }
        (lower, upper)
    }

    /// Whether position `(i, j)` is stored.
    pub fn is_stored(&self, i: usize, j: usize) -> bool {
        self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]].binary_search(&j).is_ok()
    }

    /// True if `(i, j)` is stored whenever `(j, i)` is.
    pub fn has_symmetric_pattern(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, _)| self.is_stored(j, i)))
    }
}

/// `A x = rhs` with `A` in row-compressed form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != matrix.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {0}x{0}, rhs has {1} entries",
                matrix.dim(),
                rhs.len()
            )));
        }
        Ok(SparseSystem { matrix, rhs })
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// Normwise backward error `|A x - b| / (|A| |x| + |b|)` in the max norm.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let ax = self.matrix.matvec(x);
        let r = max_abs(&ax.iter().zip(&self.rhs).map(|(a, b)| a - b).collect::<Vec<_>>());
        let scale = self.matrix.norm_inf() * max_abs(x) + max_abs(&self.rhs);
        if scale == 0.0 {
            r
        } else {
            r / scale
        }
    }

    /// One `i j value` line per stored entry, then one `rhs i value` line per row.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.matrix.dim() {
            for (j, v) in self.matrix.row(i) {
                writeln!(out, "{i} {j} {v:.17e}")?;
            }
        }
        for (i, v) in self.rhs.iter().enumerate() {
            writeln!(out, "rhs {i} {v:.17e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStrategy {
    /// Banded elimination when the bandwidth is small enough, Krylov otherwise.
    Auto,
    Direct,
    Iterative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    BandedLu,
    BiCgStab { iterations: usize },
}

#[derive(Clone, Debug)]
pub struct SparseSolve {
    pub values: Vec<f64>,
    /// Normwise backward error of `values`, see [`SparseSystem::relative_residual`].
    pub relative_residual: f64,
    pub method: SolveMethod,
}

/// Bandwidth up to which [`SolveStrategy::Auto`] factorizes directly.
///
/// For the `(N-1)^2` interior unknowns of an `N x N` grid this is `2(N+1)`.
pub fn direct_bandwidth_limit(unknowns: usize) -> usize {
    let side = (unknowns as f64).sqrt().ceil() as usize;
    2 * (side + 2)
}

pub fn solve_sparse(sys: &SparseSystem, tol: f64) -> Result<SparseSolve> {
    solve_sparse_with(sys, tol, SolveStrategy::Auto)
}

pub fn solve_sparse_with(sys: &SparseSystem, tol: f64, strategy: SolveStrategy) -> Result<SparseSolve> {
    let n = sys.len();
    if n == 0 {
        return Ok(SparseSolve { values: Vec::new(), relative_residual: 0.0, method: SolveMethod::BandedLu });
    }
    let direct = match strategy {
        SolveStrategy::Direct => true,
        SolveStrategy::Iterative => false,
        SolveStrategy::Auto => {
            let (lower, upper) = sys.matrix.bandwidths();
            lower.max(upper) <= direct_bandwidth_limit(n)
        }
    };
    if direct {
        solve_banded(sys, tol)
    } else {
        let (values, iterations) = bicgstab_jacobi(sys, tol, 20 * n)?;
        let relative_residual = sys.relative_residual(&values);
        Ok(SparseSolve { values, relative_residual, method: SolveMethod::BiCgStab { iterations } })
    }
}

fn solve_banded(sys: &SparseSystem, tol: f64) -> Result<SparseSolve> {
    let lu = BandLu::factor(&sys.matrix)?;
    let mut x = lu.solve(&sys.rhs);
    let mut residual = sys.relative_residual(&x);
    // A couple of refinement steps recover accuracy on badly scaled layer meshes.
    for _ in 0..3 {
        if residual <= tol {
            break;
        }
        let ax = sys.matrix.matvec(&x);
        let r: Vec<f64> = sys.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = lu.solve(&r);
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let candidate_residual = sys.relative_residual(&candidate);
        if candidate_residual >= residual {
            break;
        }
        x = candidate;
        residual = candidate_residual;
    }
    if residual > tol {
        return Err(Error::NotConverged { iterations: 0, residual });
    }
    Ok(SparseSolve { values: x, relative_residual: residual, method: SolveMethod::BandedLu })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_and_drop_zeros() {
        let m = CsrMatrix::from_triplets(2, vec![(1, 0, 2.0), (0, 0, 1.0), (0, 1, 3.0), (0, 1, -3.0), (1, 0, 1.0)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 0), 3.0);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.row(0).collect::<Vec<_>>(), vec![(0, 1.0)]);
    }

    #[test]
    fn one_by_one() {
        let sys = SparseSystem::new(CsrMatrix::from_triplets(1, vec![(0, 0, 4.0)]), vec![2.0]).unwrap();
        for strategy in [SolveStrategy::Direct, SolveStrategy::Iterative] {
            let x = solve_sparse_with(&sys, 1e-12, strategy).unwrap();
            assert!((x.values[0] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn bandwidth_limit_matches_grid() {
        for n in [4usize, 16, 64, 128] {
            assert_eq!(direct_bandwidth_limit((n - 1) * (n - 1)), 2 * (n + 1));
        }
    }

    #[test]
    fn coordinate_dump() {
        let sys = SparseSystem::new(
            CsrMatrix::from_triplets(2, vec![(0, 0, 2.0), (0, 1, -1.0), (1, 1, 2.0)]),
            vec![1.0, 0.5],
        )
        .unwrap();
        let mut buf = Vec::new();
        sys.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0 1 -1"));
        assert!(lines[4].starts_with("rhs 1 5"));
    }

    #[test]
    fn rhs_length_checked() {
        assert!(SparseSystem::new(CsrMatrix::from_triplets(2, vec![]), vec![1.0]).is_err());
    }
}
