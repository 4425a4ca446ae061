use std::ops::{Deref, DerefMut};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use super::sparse::{CsrMatrix, SparseCholesky};
use crate::error::{Error, Result};
use crate::grid::{GridPair, Neighborhood};

/// Coefficients over the free fine-grid DOFs (functions in `V`, zero on `∂Ω`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodalVector(Vec<f64>);

impl NodalVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn norm(&self) -> f64 {
        self.dot(&self.0).sqrt()
    }

    pub fn sub(&self, other: &[f64]) -> NodalVector {
        NodalVector(self.0.iter().zip(other).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, c: f64) -> NodalVector {
        NodalVector(self.0.iter().map(|a| a * c).collect())
    }
}

impl From<Vec<f64>> for NodalVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl Deref for NodalVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for NodalVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sparse symmetric fine-grid operator with a lazily computed, cached
/// Cholesky factor.
#[derive(Debug)]
pub struct FineOperator {
    grid: GridPair,
    matrix: CsrMatrix,
    eliminated: bool,
    factor: OnceLock<Result<SparseCholesky, String>>,
    factorizations: AtomicUsize,
}

impl FineOperator {
    pub(crate) fn new(grid: GridPair, matrix: CsrMatrix, eliminated: bool) -> Self {
        Self {
            grid,
            matrix,
            eliminated,
            factor: OnceLock::new(),
            factorizations: AtomicUsize::new(0),
        }
    }

    pub fn grid(&self) -> &GridPair {
        &self.grid
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Whether homogeneous Dirichlet rows/columns have been removed.
    pub fn is_eliminated(&self) -> bool {
        self.eliminated
    }

    pub fn apply(&self, v: &[f64]) -> NodalVector {
        NodalVector(self.matrix.matvec(v))
    }

    /// Number of numeric factorizations performed so far (0 or 1).
    pub fn factorization_count(&self) -> usize {
        self.factorizations.load(Ordering::Relaxed)
    }

    pub fn factorization(&self) -> Result<&SparseCholesky> {
        let cached = self.factor.get_or_init(|| {
            self.factorizations.fetch_add(1, Ordering::Relaxed);
            SparseCholesky::factorize(&self.matrix).map_err(|e| e.to_string())
        });
        cached.as_ref().map_err(|msg| Error::Factorization(msg.clone()))
    }
}

/// Solves `A x = rhs` on the free DOFs, reusing the operator's cached factor.
pub fn solve_dirichlet(op: &FineOperator, rhs: &[f64]) -> Result<NodalVector> {
    if !op.is_eliminated() {
        return Err(Error::Factorization(
            "operator still carries Dirichlet rows; eliminate before solving".into(),
        ));
    }
    if rhs.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            what: "right-hand side",
            expected: op.dim(),
            got: rhs.len(),
        });
    }
    Ok(NodalVector(op.factorization()?.solve(rhs)))
}

/// Energy norm `sqrt(vᵀ A v)`.
pub fn energy_norm(op: &FineOperator, v: &[f64]) -> f64 {
    assert_eq!(v.len(), op.dim(), "energy_norm dimension mismatch");
    dot(v, &op.matrix.matvec(v)).max(0.0).sqrt()
}

/// Stiffness restricted to `V_i = H¹₀(ω_i) ∩ V`, factorized once.
#[derive(Debug)]
pub struct LocalOperator {
    neighborhood: usize,
    matrix: CsrMatrix,
    factor: SparseCholesky,
}

impl LocalOperator {
    pub fn neighborhood(&self) -> usize {
        self.neighborhood
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.factor.solve(rhs)
    }

    pub fn solve_many_in_place(&self, rhs: &mut [f64], ncols: usize) {
        self.factor.solve_many_in_place(rhs, ncols)
    }

    pub fn energy(&self, v: &[f64]) -> f64 {
        dot(v, &self.matrix.matvec(v))
    }
}

/// Principal submatrix of the global stiffness on the interior DOFs of `ω_i`.
pub fn restrict_local(op: &FineOperator, neigh: &Neighborhood) -> Result<LocalOperator> {
    if !op.is_eliminated() {
        return Err(Error::Factorization(
            "local restriction needs the eliminated global operator".into(),
        ));
    }
    if neigh.interior_dofs.is_empty() {
        return Err(Error::DegenerateNeighborhood(neigh.index));
    }
    if let Some(&bad) = neigh.interior_dofs.iter().find(|&&d| d >= op.dim()) {
        return Err(Error::DimensionMismatch {
            what: "neighborhood DOF index",
            expected: op.dim(),
            got: bad,
        });
    }
    let matrix = op.matrix.principal_submatrix(&neigh.interior_dofs);
    let factor = SparseCholesky::factorize(&matrix)?;
    Ok(LocalOperator {
        neighborhood: neigh.index,
        matrix,
        factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_functional, assemble_stiffness, PermeabilityField};
    use std::f64::consts::PI;

    fn unit_problem(n: usize) -> (GridPair, FineOperator) {
        let g = GridPair::new(n, n, 1).unwrap();
        let f = PermeabilityField::constant(n, n, 1.0).unwrap();
        let a = assemble_stiffness(&g, &f).unwrap();
        (g, a)
    }

    fn interpolate(g: &GridPair, u: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..g.num_free())
            .map(|d| {
                let (ix, iy) = g.free_coords(d);
                let (x, y) = g.node_position(ix, iy);
                u(x, y)
            })
            .collect()
    }

    /// `‖u_h − u‖_{L²}` by 3×3 Gauss quadrature on every fine cell.
    fn l2_error(g: &GridPair, uh: &[f64], u: impl Fn(f64, f64) -> f64) -> f64 {
        let nodes = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
        let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let val = |ix: usize, iy: usize| g.free_index(ix, iy).map_or(0.0, |d| uh[d]);
        let (hx, hy) = (g.hx(), g.hy());
        let mut total = 0.0;
        for cy in 0..g.fine_ny() {
            for cx in 0..g.fine_nx() {
                let c = [val(cx, cy), val(cx + 1, cy), val(cx, cy + 1), val(cx + 1, cy + 1)];
                for (a, wa) in nodes.iter().zip(weights) {
                    for (b, wb) in nodes.iter().zip(weights) {
                        let (s, t) = ((a + 1.0) / 2.0, (b + 1.0) / 2.0);
                        let uhq =
                            c[0] * (1.0 - s) * (1.0 - t) + c[1] * s * (1.0 - t) + c[2] * (1.0 - s) * t + c[3] * s * t;
                        let (x, y) = ((cx as f64 + s) * hx, (cy as f64 + t) * hy);
                        total += wa * wb * 0.25 * hx * hy * (uhq - u(x, y)).powi(2);
                    }
                }
            }
        }
        total.sqrt()
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let (_, a) = unit_problem(8);
        let x = solve_dirichlet(&a, &vec![0.0; a.dim()]).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn factorization_is_cached() {
        let (_, a) = unit_problem(8);
        assert_eq!(a.factorization_count(), 0);
        let b = vec![1.0; a.dim()];
        solve_dirichlet(&a, &b).unwrap();
        solve_dirichlet(&a, &b).unwrap();
        assert_eq!(a.factorization_count(), 1);
    }

    #[test]
    fn concurrent_solves_agree() {
        use rayon::prelude::*;
        let (_, a) = unit_problem(16);
        let rhs: Vec<Vec<f64>> = (0..8)
            .map(|k| (0..a.dim()).map(|i| ((i * (k + 1)) as f64).cos()).collect())
            .collect();
        let serial: Vec<_> = rhs.iter().map(|b| solve_dirichlet(&a, b).unwrap()).collect();
        let parallel: Vec<_> = rhs.par_iter().map(|b| solve_dirichlet(&a, b).unwrap()).collect();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn energy_norm_of_sine_interpolant() {
        let (g, a) = unit_problem(64);
        let v = interpolate(&g, |x, y| (PI * x).sin() * (PI * y).sin());
        let e = energy_norm(&a, &v);
        let exact = PI / 2f64.sqrt();
        assert!((e - exact).abs() < 2.0 * g.h() * g.h() * PI.powi(3), "{e} vs {exact}");
        assert_eq!(energy_norm(&a, &vec![0.0; a.dim()]), 0.0);
        let twice: Vec<f64> = v.iter().map(|x| 2.0 * x).collect();
        assert!((energy_norm(&a, &twice) - 2.0 * e).abs() < 1e-12);
    }

    #[test]
    fn reproduces_bilinear_harmonic_function() {
        // u = xy is harmonic and bilinear: lift its boundary trace and solve.
        let n = 6;
        let g = GridPair::new(n, n, 2).unwrap();
        let f = PermeabilityField::constant(g.fine_nx(), g.fine_ny(), 1.0).unwrap();
        let full = crate::fem::assemble_stiffness_full(&g, &f).unwrap();
        let a = assemble_stiffness(&g, &f).unwrap();
        let mut lift = vec![0.0; g.num_nodes()];
        for iy in 0..=g.fine_ny() {
            for ix in 0..=g.fine_nx() {
                if g.free_index(ix, iy).is_none() {
                    let (x, y) = g.node_position(ix, iy);
                    lift[g.node_index(ix, iy)] = x * y;
                }
            }
        }
        let a_lift = full.matrix().matvec(&lift);
        let rhs: Vec<f64> = (0..g.num_free())
            .map(|d| {
                let (ix, iy) = g.free_coords(d);
                -a_lift[g.node_index(ix, iy)]
            })
            .collect();
        let u = solve_dirichlet(&a, &rhs).unwrap();
        let exact = interpolate(&g, |x, y| x * y);
        for (p, q) in u.iter().zip(&exact) {
            assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn manufactured_solution_converges_quadratically() {
        let l2_err = |n: usize| {
            let (g, a) = unit_problem(n);
            let dens: Vec<f64> = (0..g.num_cells())
                .map(|c| {
                    let (cx, cy) = (c % n, c / n);
                    let (x, y) = ((cx as f64 + 0.5) / n as f64, (cy as f64 + 0.5) / n as f64);
                    2.0 * PI * PI * (PI * x).sin() * (PI * y).sin()
                })
                .collect();
            let b = assemble_functional(&g, &dens, 1.0).unwrap();
            let u = solve_dirichlet(&a, &b).unwrap();
            l2_error(&g, &u, |x, y| (PI * x).sin() * (PI * y).sin())
        };
        let ratio = l2_err(16) / l2_err(32);
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn local_operator_is_principal_submatrix() {
        let g = GridPair::new(3, 3, 4).unwrap();
        let f = PermeabilityField::constant(g.fine_nx(), g.fine_ny(), 2.0).unwrap();
        let a = assemble_stiffness(&g, &f).unwrap();
        let n = g.neighborhood(3).unwrap();
        let loc = restrict_local(&a, &n).unwrap();
        assert_eq!(loc.dim(), 49);
        for (li, &gi) in n.interior_dofs.iter().enumerate() {
            for (lj, &gj) in n.interior_dofs.iter().enumerate() {
                assert_eq!(loc.matrix().get(li, lj), a.matrix().get(gi, gj));
            }
        }
    }

    #[test]
    fn local_solve_matches_global_on_single_neighborhood() {
        let g = GridPair::new(2, 2, 5).unwrap();
        let f = PermeabilityField::new(
            g.fine_nx(),
            g.fine_ny(),
            (0..g.num_cells()).map(|c| 1.0 + (c % 3) as f64).collect(),
        )
        .unwrap();
        let a = assemble_stiffness(&g, &f).unwrap();
        let n = g.neighborhood(0).unwrap();
        let loc = restrict_local(&a, &n).unwrap();
        let b: Vec<f64> = (0..a.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let global = solve_dirichlet(&a, &b).unwrap();
        let rhs: Vec<f64> = n.interior_dofs.iter().map(|&d| b[d]).collect();
        let local = loc.solve(&rhs);
        for (k, &d) in n.interior_dofs.iter().enumerate() {
            assert!((local[k] - global[d]).abs() < 1e-12);
        }
    }
}
