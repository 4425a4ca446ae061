use crate::dense::{generalized_eigen, gram, symmetrize, EigenFailure};
use crate::error::{Error, Result};
use crate::fem::mass_on_window;
use crate::grid::GridPair;
use crate::offline::snapshot::SnapshotSet;

/// Ascending eigenpairs of the local spectral problem in snapshot coordinates.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    pub neighborhood: usize,
    pub eigenvalues: Vec<f64>,
    /// Column-major `L_i × L_i`; column `j` is normalized so `s_i(φ_j, φ_j) = 1`.
    pub eigenvectors: Vec<f64>,
    pub selected: usize,
    /// `λ_{l_i+1}`, or `+∞` when every mode is selected.
    pub lambda_next: f64,
}

impl SpectralResult {
    pub fn num_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn coefficients(&self, j: usize) -> &[f64] {
        let n = self.num_modes();
        &self.eigenvectors[j * n..(j + 1) * n]
    }

    /// Mode `j` expanded to the nodes of the neighborhood window.
    pub fn mode(&self, snaps: &SnapshotSet, j: usize) -> Vec<f64> {
        let n = snaps.window.len();
        let mut out = vec![0.0; n];
        for (l, &c) in self.coefficients(j).iter().enumerate() {
            if c != 0.0 {
                for (o, s) in out.iter_mut().zip(snaps.column(l)) {
                    *o += c * s;
                }
            }
        }
        out
    }
}

/// `(Sᵀ A_ω S, Sᵀ M_{κ̃,ω} S)`, column-major and symmetrized.
pub fn projected_matrices(grid: &GridPair, snaps: &SnapshotSet, ktilde: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = snaps.window.len();
    let mass = mass_on_window(grid, ktilde, &snaps.window)?;
    let l = snaps.len();
    let mut a_s_cols = Vec::with_capacity(n * l);
    let mut m_s_cols = Vec::with_capacity(n * l);
    for j in 0..l {
        a_s_cols.extend(snaps.stiffness.matvec(snaps.column(j)));
        m_s_cols.extend(mass.matvec(snaps.column(j)));
    }
    let mut a_s = gram(&snaps.columns, &a_s_cols, n);
    let mut m_s = gram(&snaps.columns, &m_s_cols, n);
    symmetrize(&mut a_s, l);
    symmetrize(&mut m_s, l);
    Ok((a_s, m_s))
}

/// Solves `A_s v = λ M_s v` on the snapshot space and selects `l_i` modes.
pub fn solve_spectral(grid: &GridPair, snaps: &SnapshotSet, ktilde: &[f64], l_i: usize) -> Result<SpectralResult> {
    let l = snaps.len();
    if l_i == 0 || l_i > l {
        return Err(Error::Config(format!(
            "l_i = {l_i} must lie in 1..={l} for neighborhood {}",
            snaps.neighborhood
        )));
    }
    let (a_s, m_s) = projected_matrices(grid, snaps, ktilde)?;
    let (eigenvalues, eigenvectors) = generalized_eigen(&a_s, &m_s, l).map_err(|e| match e {
        EigenFailure::IndefiniteMass => Error::SingularSpectralMass(snaps.neighborhood),
        EigenFailure::Convergence(msg) => Error::Eigen(msg),
    })?;
    let lambda_next = eigenvalues.get(l_i).copied().unwrap_or(f64::INFINITY);
    Ok(SpectralResult {
        neighborhood: snaps.neighborhood,
        eigenvalues,
        eigenvectors,
        selected: l_i,
        lambda_next,
    })
}
