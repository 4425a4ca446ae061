use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::FineOperator;
use crate::grid::GridPair;
use crate::patch::PatchVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Offline,
    OnlinePrimal,
    OnlineDual,
}

/// One multiscale basis function together with its cached product `A·b`.
#[derive(Clone, Debug)]
pub struct Basis {
    pub owner: usize,
    pub kind: BasisKind,
    pub values: PatchVector,
    pub a_values: PatchVector,
}

impl Basis {
    /// Builds the record and rescales it to unit energy.
    pub fn normalized(owner: usize, kind: BasisKind, values: PatchVector, op: &FineOperator) -> Result<Self> {
        let mut b = Self::unscaled(owner, kind, values, op);
        let energy = b.energy();
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(Error::BasisRejected(format!(
                "{kind:?} basis of neighborhood {owner} has energy {energy:e}"
            )));
        }
        let c = energy.sqrt().recip();
        b.values.scale(c);
        b.a_values.scale(c);
        Ok(b)
    }

    /// Builds the record without rescaling.
    pub fn unscaled(owner: usize, kind: BasisKind, values: PatchVector, op: &FineOperator) -> Self {
        let a_values = values.apply(op);
        Self {
            owner,
            kind,
            values,
            a_values,
        }
    }

    /// `a(b, b)`.
    pub fn energy(&self) -> f64 {
        self.values.dot(&self.a_values)
    }

    /// `a(self, other)` through the cached product.
    pub fn a_dot(&self, other: &Basis) -> f64 {
        self.a_values.dot(&other.values)
    }
}

/// Ordered basis of `V_ms^m` plus the per-neighborhood `λ_{l_i+1}` table.
#[derive(Clone, Debug)]
pub struct MultiscaleSpace {
    pub grid: GridPair,
    pub bases: Vec<Basis>,
    pub lambda_next: Vec<f64>,
    pub l_i: usize,
}

impl MultiscaleSpace {
    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn count(&self, kind: BasisKind) -> usize {
        self.bases.iter().filter(|b| b.kind == kind).count()
    }

    /// `Σ_k c_k b_k` on the free fine DOFs.
    pub fn expand(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.dim());
        let mut out = vec![0.0; self.grid.num_free()];
        for (b, &c) in self.bases.iter().zip(coeffs) {
            b.values.add_to_free(&self.grid, c, &mut out);
        }
        out
    }
}
