//! Small dense symmetric kernels on column-major buffers.

use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, MatMut, MatRef, Par, Side};

#[derive(Debug, Clone, PartialEq)]
pub enum EigenFailure {
    /// The right-hand matrix is not positive definite.
    IndefiniteMass,
    Convergence(String),
}

/// `Bᵀ C` for column-major `B` (`n × p`) and `C` (`n × q`), returned
/// column-major `p × q`.
pub fn gram(b: &[f64], c: &[f64], n: usize) -> Vec<f64> {
    let p = b.len() / n;
    let q = c.len() / n;
    let bm = MatRef::from_column_major_slice(b, n, p);
    let cm = MatRef::from_column_major_slice(c, n, q);
    let prod: Mat<f64> = bm.transpose() * cm;
    let mut out = vec![0.0; p * q];
    for j in 0..q {
        for i in 0..p {
            out[j * p + i] = prod[(i, j)];
        }
    }
    out
}

pub fn symmetrize(a: &mut [f64], n: usize) {
    for j in 0..n {
        for i in j + 1..n {
            let v = 0.5 * (a[j * n + i] + a[i * n + j]);
            a[j * n + i] = v;
            a[i * n + j] = v;
        }
    }
}

/// Solves `A v = λ M v` for symmetric `A` and symmetric positive definite
/// `M` (both `n × n`, column-major). Eigenvalues come back ascending and the
/// eigenvectors (column-major) are `M`-orthonormal, each with its
/// largest-magnitude component positive.
pub fn generalized_eigen(a: &[f64], m: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>), EigenFailure> {
    let mm = MatRef::from_column_major_slice(m, n, n);
    let llt = mm.llt(Side::Lower).map_err(|_| EigenFailure::IndefiniteMass)?;
    let l = llt.L();

    let mut c = MatRef::from_column_major_slice(a, n, n).to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    let mut c = c.transpose().to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    for j in 0..n {
        for i in j + 1..n {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    let eig = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| EigenFailure::Convergence(format!("{e:?}")))?;
    let values: Vec<f64> = eig.S().column_vector().iter().copied().collect();
    let mut v = eig.U().to_owned();
    solve_upper_triangular_in_place(l.transpose(), v.as_mut(), Par::Seq);

    let mut vectors = vec![0.0; n * n];
    let mut out = MatMut::from_column_major_slice_mut(&mut vectors, n, n);
    for j in 0..n {
        let mut pivot = 0;
        for i in 0..n {
            if v[(i, j)].abs() > v[(pivot, j)].abs() {
                pivot = i;
            }
        }
        let sign = if v[(pivot, j)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            out[(i, j)] = sign * v[(i, j)];
        }
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pencil() {
        let a = [6.0, 0.0, 0.0, 2.0];
        let m = [2.0, 0.0, 0.0, 4.0];
        let (vals, vecs) = generalized_eigen(&a, &m, 2).unwrap();
        assert!((vals[0] - 0.5).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        assert!((vecs[1] - 0.5).abs() < 1e-14 && vecs[0].abs() < 1e-14);
        assert!((vecs[2] - 1.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_indefinite_mass() {
        let a = [1.0, 0.0, 0.0, 1.0];
        let m = [1.0, 0.0, 0.0, -1.0];
        assert_eq!(generalized_eigen(&a, &m, 2).unwrap_err(), EigenFailure::IndefiniteMass);
    }

    #[test]
    fn gram_small() {
        let b = [1.0, 2.0, 3.0, 4.0];
        let g = gram(&b, &b, 2);
        assert_eq!(g, vec![5.0, 11.0, 11.0, 25.0]);
    }
}
