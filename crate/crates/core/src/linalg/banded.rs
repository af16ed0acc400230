use super::CsrMatrix;
use crate::error::{Error, Result};

/// LU factorization with partial pivoting of a banded matrix.
///
/// Row `i` stores columns `i - kl ..= i + kl + ku`; the extra `kl` columns
/// hold the fill produced by row interchanges. The factorization is kept as a
/// sequence of Gauss transforms, so each interchange only touches columns
/// `>= k`.
pub(crate) struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub(crate) fn factor(matrix: &CsrMatrix) -> Result<Self> {
        let n = matrix.dim();
        let (kl, ku) = matrix.bandwidths();
        let width = 2 * kl + ku + 1;
        let mut lu = BandLu { n, kl, ku, width, data: vec![0.0; n * width], pivots: vec![0; n] };
        for i in 0..n {
            for (j, v) in matrix.row(i) {
                let idx = lu.at(i, j);
                lu.data[idx] = v;
            }
        }

        let reach = kl + ku;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + reach).min(n - 1);

            let mut p = k;
            let mut best = lu.data[lu.at(k, k)].abs();
            for i in k + 1..=last_row {
                let v = lu.data[lu.at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::ZeroPivot { index: k });
            }
            lu.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (lu.at(k, j), lu.at(p, j));
                    lu.data.swap(a, b);
                }
            }

            let pivot = lu.data[lu.at(k, k)];
            for i in k + 1..=last_row {
                let lik_idx = lu.at(i, k);
                let lik = lu.data[lik_idx] / pivot;
                lu.data[lik_idx] = lik;
                if lik == 0.0 {
                    continue;
                }
                let row_k = lu.at(k, k + 1);
                let row_i = lu.at(i, k + 1);
                let len = last_col - k;
                for t in 0..len {
                    let ukj = lu.data[row_k + t];
                    lu.data[row_i + t] -= lik * ukj;
                }
            }
        }
        Ok(lu)
    }

    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = rhs.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..=(k + self.kl).min(n - 1) {
                    x[i] -= self.data[self.at(i, k)] * xk;
                }
            }
        }
        let reach = self.kl + self.ku;
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                s -= self.data[self.at(i, j)] * x[j];
            }
            x[i] = s / self.data[self.at(i, i)];
        }
        x
    }
}
