//! Galerkin solves in the multiscale space with an incrementally bordered
//! Cholesky factor of the coarse Gram matrix.

use crate::error::{Error, Result};
use crate::fem::NodalVector;
use crate::offline::{Basis, MultiscaleSpace};

/// Largest admissible ratio between the largest and smallest squared
/// Cholesky pivot.
pub const MAX_CONDITION: f64 = 1e14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Primal,
    Dual,
}

/// `G = Bᵀ A B` with its Cholesky factor and the projected loads `Bᵀ F`,
/// `Bᵀ Ĝ`. Both `G` and `L` are stored packed lower-triangular by rows.
#[derive(Clone, Debug)]
pub struct CoarseSystem {
    gram: Vec<f64>,
    chol: Vec<f64>,
    pivots: Vec<f64>,
    load: Vec<f64>,
    goal: Vec<f64>,
    f_vec: Vec<f64>,
    g_vec: Vec<f64>,
}

/// Result of offering one candidate basis to the system.
#[derive(Clone, Debug, PartialEq)]
pub enum Admission {
    Accepted,
    Rejected { reason: String },
}

#[inline]
fn tri(i: usize) -> usize {
    i * (i + 1) / 2
}

impl CoarseSystem {
    /// Empty system for the given fine load and goal vectors (free DOFs).
    pub fn new(load: &[f64], goal: &[f64]) -> Self {
        Self {
            gram: Vec::new(),
            chol: Vec::new(),
            pivots: Vec::new(),
            load: Vec::new(),
            goal: Vec::new(),
            f_vec: load.to_vec(),
            g_vec: goal.to_vec(),
        }
    }

    /// Builds the system for every basis of `space`, in order. Fails if any
    /// basis is rejected.
    pub fn assemble(space: &MultiscaleSpace, load: &[f64], goal: &[f64]) -> Result<Self> {
        let mut sys = Self::new(load, goal);
        for k in 0..space.dim() {
            if let Admission::Rejected { reason } = sys.try_push(&space.bases[..k], &space.bases[k], space) {
                return Err(Error::BasisRejected(reason));
            }
        }
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn gram(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        self.gram[tri(i) + j]
    }

    pub fn projected_load(&self) -> &[f64] {
        &self.load
    }

    pub fn projected_goal(&self) -> &[f64] {
        &self.goal
    }

    pub fn load_vector(&self) -> &[f64] {
        &self.f_vec
    }

    pub fn goal_vector(&self) -> &[f64] {
        &self.g_vec
    }

    /// Ratio of the largest to the smallest pivot of the bordered factor.
    pub fn condition_estimate(&self) -> f64 {
        let (lo, hi) = self
            .pivots
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        if self.pivots.is_empty() {
            1.0
        } else {
            hi / lo
        }
    }

    /// Borders `G` with `candidate`; `existing` must be the bases already in
    /// the system, in order. Leaves the system untouched on rejection.
    fn try_push(&mut self, existing: &[Basis], candidate: &Basis, space: &MultiscaleSpace) -> Admission {
        let n = self.dim();
        debug_assert_eq!(existing.len(), n);
        let mut row: Vec<f64> = existing.iter().map(|b| candidate.a_dot(b)).collect();
        let diag = candidate.energy();
        if !(diag > 0.0) || !diag.is_finite() {
            return Admission::Rejected {
                reason: format!("candidate of neighborhood {} has energy {diag:e}", candidate.owner),
            };
        }

        // forward substitution L w = row
        let mut w = row.clone();
        for i in 0..n {
            let li = &self.chol[tri(i)..tri(i) + i + 1];
            let s: f64 = li[..i].iter().zip(&w[..i]).map(|(a, b)| a * b).sum();
            w[i] = (w[i] - s) / li[i];
        }
        let d = diag - w.iter().map(|x| x * x).sum::<f64>();
        let reject = |reason: String| Admission::Rejected { reason };
        if !(d > 0.0) {
            return reject(format!(
                "candidate of neighborhood {} is linearly dependent on the space (pivot {d:e})",
                candidate.owner
            ));
        }
        let mut pivots = self.pivots.clone();
        pivots.push(d);
        let (lo, hi) = pivots
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        if hi / lo > MAX_CONDITION {
            return reject(format!(
                "candidate of neighborhood {} makes the coarse system ill-conditioned (estimate {:e})",
                candidate.owner,
                hi / lo
            ));
        }

        row.push(diag);
        self.gram.extend(row);
        w.push(d.sqrt());
        self.chol.extend(w);
        self.pivots = pivots;
        self.load.push(candidate.values.dot_free(&space.grid, &self.f_vec));
        self.goal.push(candidate.values.dot_free(&space.grid, &self.g_vec));
        Admission::Accepted
    }

    /// Coefficients of the Galerkin solution in basis order.
    pub fn solve_coefficients(&self, which: Which) -> Vec<f64> {
        let mut x = match which {
            Which::Primal => self.load.clone(),
            Which::Dual => self.goal.clone(),
        };
        let n = self.dim();
        for i in 0..n {
            let li = &self.chol[tri(i)..tri(i) + i + 1];
            let s: f64 = li[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / li[i];
        }
        for i in (0..n).rev() {
            x[i] /= self.chol[tri(i) + i];
            let xi = x[i];
            for (k, xk) in x[..i].iter_mut().enumerate() {
                *xk -= self.chol[tri(i) + k] * xi;
            }
        }
        x
    }
}

/// Offers `candidates` to the space in order, appending each admitted one to
/// both `space` and `system`. Returns one admission verdict per candidate.
pub fn extend_space(space: &mut MultiscaleSpace, system: &mut CoarseSystem, candidates: Vec<Basis>) -> Vec<Admission> {
    candidates
        .into_iter()
        .map(|cand| {
            let verdict = system.try_push(&space.bases, &cand, space);
            if verdict == Admission::Accepted {
                space.bases.push(cand);
            }
            verdict
        })
        .collect()
}

/// Galerkin solution expanded to the free fine DOFs.
pub fn solve_coarse(space: &MultiscaleSpace, system: &CoarseSystem, which: Which) -> Result<NodalVector> {
    if system.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            what: "coarse system vs multiscale space",
            expected: space.dim(),
            got: system.dim(),
        });
    }
    let c = system.solve_coefficients(which);
    Ok(NodalVector::from(space.expand(&c)))
}
