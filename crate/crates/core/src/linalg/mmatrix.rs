use super::{SparseSystem, TridiagonalSystem};

/// Row-wise view of a square matrix.
pub trait RowAccess {
    fn dim(&self) -> usize;
    /// Off-diagonal `(column, value)` pairs and the diagonal value of row `i`.
    fn split_row(&self, i: usize) -> (f64, Vec<(usize, f64)>);
}

impl RowAccess for TridiagonalSystem {
    fn dim(&self) -> usize {
        self.len()
    }

    fn split_row(&self, i: usize) -> (f64, Vec<(usize, f64)>) {
        let (lower, diag, upper) = self.row(i);
        let mut off = Vec::with_capacity(2);
        if let Some(l) = lower {
            off.push((i - 1, l));
        }
        if let Some(u) = upper {
            off.push((i + 1, u));
        }
        (diag, off)
    }
}

impl RowAccess for SparseSystem {
    fn dim(&self) -> usize {
        self.len()
    }

    fn split_row(&self, i: usize) -> (f64, Vec<(usize, f64)>) {
        let mut diag = 0.0;
        let mut off = Vec::new();
        for (j, v) in self.matrix.row(i) {
            if j == i {
                diag = v;
            } else {
                off.push((j, v));
            }
        }
        (diag, off)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonPositiveDiagonal { row: usize, value: f64 },
    PositiveOffDiagonal { row: usize, col: usize, value: f64 },
    NotDiagonallyDominant { row: usize, diagonal: f64, off_diagonal_sum: f64 },
    NoStrictlyDominantRow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MMatrixReport {
    pub is_candidate: bool,
    pub violations: Vec<Violation>,
}

/// Check the sufficient M-matrix conditions: positive diagonal, non-positive
/// off-diagonals, weak row diagonal dominance, strict dominance in at least
/// one row.
///
/// Comparisons allow a relative slack of `64 ε_mach |a_ii|`, so rounding noise
/// in entries that vanish analytically (e.g. fitted stencils at large mesh
/// Péclet numbers) is not reported.
pub fn is_m_matrix<S: RowAccess + ?Sized>(sys: &S) -> MMatrixReport {
    let mut violations = Vec::new();
    let mut any_strict = false;
    for i in 0..sys.dim() {
        let (diag, off) = sys.split_row(i);
        let slack = 64.0 * f64::EPSILON * diag.abs();
        if !(diag > 0.0) {
            violations.push(Violation::NonPositiveDiagonal { row: i, value: diag });
        }
        for &(col, value) in &off {
            if value > slack {
                violations.push(Violation::PositiveOffDiagonal { row: i, col, value });
            }
        }
        let off_sum: f64 = off.iter().map(|(_, v)| v.abs()).sum();
        if diag + slack < off_sum {
            violations.push(Violation::NotDiagonallyDominant { row: i, diagonal: diag, off_diagonal_sum: off_sum });
        } else if diag > off_sum + slack {
            any_strict = true;
        }
    }
    if sys.dim() > 0 && !any_strict {
        violations.push(Violation::NoStrictlyDominantRow);
    }
    MMatrixReport { is_candidate: violations.is_empty(), violations }
}
