//! Offline stage: multiscale partition of unity, spectral weight, snapshot
//! spaces, local spectral problems and the initial space `V_off`.

mod pou;
mod snapshot;
mod space;
mod spectral;

pub use pou::{compute_kappa_tilde, compute_partition_of_unity, KappaTildeNodes, PartitionOfUnity};
pub use snapshot::{compute_snapshots, SnapshotSet};
pub use space::{Basis, BasisKind, MultiscaleSpace};
pub use spectral::{projected_matrices, solve_spectral, SpectralResult};

use rayon::prelude::*;

use crate::error::Result;
use crate::fem::{assemble_stiffness, restrict_local, FineOperator, LocalOperator, PermeabilityField};
use crate::grid::{GridPair, Neighborhood};
use crate::patch::PatchVector;

/// Offline basis functions `χ_i · φ_j` for the selected modes of one
/// neighborhood (nodal product on the window of `ω_i`).
pub fn offline_bases(
    op: &FineOperator,
    pou: &PartitionOfUnity,
    snaps: &SnapshotSet,
    spectral: &SpectralResult,
) -> Result<Vec<Basis>> {
    let chi = pou.chi_interior(snaps.neighborhood);
    debug_assert_eq!(chi.window, snaps.window);
    (0..spectral.selected)
        .map(|j| {
            let mode = spectral.mode(snaps, j);
            let values = chi.values.iter().zip(&mode).map(|(c, m)| c * m).collect();
            let pv = PatchVector {
                window: snaps.window,
                values,
            };
            Basis::normalized(snaps.neighborhood, BasisKind::Offline, pv, op)
        })
        .collect()
}

/// Assembles `V_off` from per-neighborhood basis lists in index order.
pub fn build_offline_space(grid: &GridPair, l_i: usize, per_neighborhood: Vec<(Vec<Basis>, f64)>) -> MultiscaleSpace {
    let mut bases = Vec::new();
    let mut lambda_next = Vec::with_capacity(per_neighborhood.len());
    for (b, lam) in per_neighborhood {
        bases.extend(b);
        lambda_next.push(lam);
    }
    MultiscaleSpace {
        grid: *grid,
        bases,
        lambda_next,
        l_i,
    }
}

/// Everything the online stage reuses: the global operator, local factors,
/// partition of unity, spectral weight and the local spectra.
#[derive(Debug)]
pub struct OfflineModel {
    pub grid: GridPair,
    pub operator: FineOperator,
    pub neighborhoods: Vec<Neighborhood>,
    pub locals: Vec<LocalOperator>,
    pub pou: PartitionOfUnity,
    pub kappa_tilde: Vec<f64>,
    /// Full ascending spectrum of each neighborhood.
    pub eigenvalues: Vec<Vec<f64>>,
}

/// Runs the offline stage; neighborhoods are processed in parallel and
/// merged by index, so the result does not depend on scheduling.
pub fn build_offline(
    grid: &GridPair,
    field: &PermeabilityField,
    l_i: usize,
    nodes: KappaTildeNodes,
) -> Result<(OfflineModel, MultiscaleSpace)> {
    let operator = assemble_stiffness(grid, field)?;
    let neighborhoods = grid.neighborhoods()?;
    let pou = compute_partition_of_unity(grid, field)?;
    let kappa_tilde = compute_kappa_tilde(&pou, field, nodes)?;

    let per: Vec<(LocalOperator, Vec<Basis>, SpectralResult)> = neighborhoods
        .par_iter()
        .map(|neigh| {
            let local = restrict_local(&operator, neigh)?;
            let snaps = compute_snapshots(grid, field, neigh, &local)?;
            let spectral = solve_spectral(grid, &snaps, &kappa_tilde, l_i)?;
            let bases = offline_bases(&operator, &pou, &snaps, &spectral)?;
            Ok((local, bases, spectral))
        })
        .collect::<Result<_>>()?;

    let mut locals = Vec::with_capacity(per.len());
    let mut eigenvalues = Vec::with_capacity(per.len());
    let mut lists = Vec::with_capacity(per.len());
    for (local, bases, spectral) in per {
        locals.push(local);
        lists.push((bases, spectral.lambda_next));
        eigenvalues.push(spectral.eigenvalues);
    }
    let space = build_offline_space(grid, l_i, lists);
    Ok((
        OfflineModel {
            grid: *grid,
            operator,
            neighborhoods,
            locals,
            pou,
            kappa_tilde,
            eigenvalues,
        },
        space,
    ))
}
