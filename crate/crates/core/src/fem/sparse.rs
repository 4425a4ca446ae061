use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMat, Triplet};
use faer::{MatMut, Side};

use crate::error::{Error, Result};

/// Compressed sparse row matrix with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub(crate) fn from_parts(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(row_ptr.len(), n + 1);
        debug_assert_eq!(col_idx.len(), values.len());
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        self.row(i).map(|(j, a)| a * x[j]).sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row_dot(i, x)).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Largest absolute difference between `A` and `Aᵀ`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, a) in self.row(i) {
                worst = worst.max((a - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Principal submatrix on the given (strictly increasing) index set.
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        self.submatrix_with_map(keep, &map)
    }

    fn submatrix_with_map(&self, keep: &[usize], map: &[usize]) -> Self {
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for &old in keep {
            for (j, a) in self.row(old) {
                let nj = map[j];
                if nj != usize::MAX {
                    col_idx.push(nj);
                    values.push(a);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_parts(keep.len(), row_ptr, col_idx, values)
    }

    /// Block `A[rows, cols]` as a dense column-major matrix with `rows.len()` rows.
    pub fn dense_block(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut map = vec![usize::MAX; self.n];
        for (k, &c) in cols.iter().enumerate() {
            map[c] = k;
        }
        let m = rows.len();
        let mut out = vec![0.0; m * cols.len()];
        for (r, &i) in rows.iter().enumerate() {
            for (j, a) in self.row(i) {
                let k = map[j];
                if k != usize::MAX {
                    out[k * m + r] = a;
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, a) in self.row(i) {
                row[j] = a;
            }
        }
        out
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let triplets: Vec<_> = (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, a)| Triplet::new(i, j, a)))
            .collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| Error::Factorization(format!("{e:?}")))
    }
}

/// Sparse Cholesky factor of a symmetric positive definite matrix.
///
/// Solves only borrow the factor, so one factorization can serve concurrent
/// right-hand sides.
#[derive(Clone, Debug)]
pub struct SparseCholesky {
    n: usize,
    llt: Llt<usize, f64>,
}

impl SparseCholesky {
    pub fn factorize(matrix: &CsrMatrix) -> Result<Self> {
        let csc = matrix.to_faer()?;
        let llt = csc
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization(format!("matrix is not positive definite ({e})")))?;
        Ok(Self { n: matrix.dim(), llt })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        self.llt.solve_in_place(MatMut::from_column_major_slice_mut(rhs, n, 1));
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves for several right-hand sides stored column-major.
    pub fn solve_many_in_place(&self, rhs: &mut [f64], ncols: usize) {
        assert_eq!(rhs.len(), self.n * ncols);
        let n = self.n;
        self.llt
            .solve_in_place(MatMut::from_column_major_slice_mut(rhs, n, ncols));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in 0..n {
            if i > 0 {
                col_idx.push(i - 1);
                values.push(-1.0);
            }
            col_idx.push(i);
            values.push(2.0);
            if i + 1 < n {
                col_idx.push(i + 1);
                values.push(-1.0);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix::from_parts(n, row_ptr, col_idx, values)
    }

    #[test]
    fn cholesky_solves_tridiagonal() {
        let a = tridiag(20);
        let x: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let b = a.matvec(&x);
        let f = SparseCholesky::factorize(&a).unwrap();
        let y = f.solve(&b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = tridiag(5).scaled(-1.0);
        assert!(SparseCholesky::factorize(&a).is_err());
    }

    #[test]
    fn submatrix_and_blocks() {
        let a = tridiag(6);
        let s = a.principal_submatrix(&[1, 2, 4]);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.get(0, 1), -1.0);
        assert_eq!(s.get(1, 2), 0.0);
        assert_eq!(s.get(2, 2), 2.0);
        let blk = a.dense_block(&[0, 1], &[1, 2]);
        assert_eq!(blk, vec![-1.0, 2.0, 0.0, -1.0]);
        assert_eq!(a.asymmetry(), 0.0);
    }
}
