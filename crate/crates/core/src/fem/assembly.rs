//! Closed-form Q1 element integrals and structured assembly.
//!
//! Element-local node `a` sits at offset `(a & 1, a >> 1)` from the cell's
//! lower-left node. Every bilinear element matrix is a sum of tensor
//! products of the 1D linear-element stiffness and mass matrices, so the
//! integrals are exact for cell-wise constant coefficients.

use super::field::{check_cells, PermeabilityField};
use super::operator::{FineOperator, NodalVector};
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::grid::{GridPair, NodeWindow};

pub(crate) type ElementMatrix = [[f64; 4]; 4];

fn tensor(ax: &[[f64; 2]; 2], ay: &[[f64; 2]; 2]) -> ElementMatrix {
    let mut out = [[0.0; 4]; 4];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, e) in row.iter_mut().enumerate() {
            *e = ax[a & 1][b & 1] * ay[a >> 1][b >> 1];
        }
    }
    out
}

fn stiffness_1d(h: f64) -> [[f64; 2]; 2] {
    [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]]
}

fn mass_1d(h: f64) -> [[f64; 2]; 2] {
    [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]]
}

/// Q1 stiffness `∫ ∇N_a·∇N_b` on an `hx × hy` rectangle.
pub fn element_stiffness(hx: f64, hy: f64) -> ElementMatrix {
    let kx = tensor(&stiffness_1d(hx), &mass_1d(hy));
    let ky = tensor(&mass_1d(hx), &stiffness_1d(hy));
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = kx[a][b] + ky[a][b];
        }
    }
    out
}

/// Q1 mass `∫ N_a N_b` on an `hx × hy` rectangle.
pub fn element_mass(hx: f64, hy: f64) -> ElementMatrix {
    tensor(&mass_1d(hx), &mass_1d(hy))
}

/// Assembles `Σ_cells c(cell)·E` over the nodes of `window` into a 9-point
/// structured CSR matrix indexed by window-local node position.
#[allow(clippy::needless_range_loop)] // corner bits drive both indices
pub(crate) fn assemble_window(
    grid: &GridPair,
    window: &NodeWindow,
    element: &ElementMatrix,
    coeff: impl Fn(usize) -> f64,
) -> CsrMatrix {
    let w = window.width();
    let mut stencil = vec![[0.0f64; 9]; window.len()];
    for (cx, cy) in window.cells() {
        let c = coeff(grid.cell_index(cx, cy));
        let base = window.local(cx, cy);
        for a in 0..4 {
            let pa = base + (a & 1) + (a >> 1) * w;
            for b in 0..4 {
                let dx = (b & 1) as isize - (a & 1) as isize;
                let dy = (b >> 1) as isize - (a >> 1) as isize;
                let slot = ((dy + 1) * 3 + (dx + 1)) as usize;
                stencil[pa][slot] += c * element[a][b];
            }
        }
    }

    let mut row_ptr = Vec::with_capacity(window.len() + 1);
    let mut col_idx = Vec::with_capacity(9 * window.len());
    let mut values = Vec::with_capacity(9 * window.len());
    row_ptr.push(0);
    for (p, row) in stencil.iter().enumerate() {
        let (ix, iy) = window.coords(p);
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                let qx = ix as isize + dx;
                let qy = iy as isize + dy;
                if qx < window.x0 as isize
                    || qy < window.y0 as isize
                    || qx > window.x1 as isize
                    || qy > window.y1 as isize
                {
                    continue;
                }
                col_idx.push(window.local(qx as usize, qy as usize));
                values.push(row[((dy + 1) * 3 + (dx + 1)) as usize]);
            }
        }
        row_ptr.push(col_idx.len());
    }
    CsrMatrix::from_parts(window.len(), row_ptr, col_idx, values)
}

/// Stiffness `∫ κ ∇φ_p·∇φ_q` over the cells of `window`, without any boundary
/// elimination.
pub fn stiffness_on_window(grid: &GridPair, field: &PermeabilityField, window: &NodeWindow) -> Result<CsrMatrix> {
    field.check_grid(grid)?;
    let e = element_stiffness(grid.hx(), grid.hy());
    Ok(assemble_window(grid, window, &e, |c| field.values()[c]))
}

/// Weighted mass `∫ w φ_p φ_q` over the cells of `window`.
pub fn mass_on_window(grid: &GridPair, weight: &[f64], window: &NodeWindow) -> Result<CsrMatrix> {
    check_weight(grid, weight)?;
    let e = element_mass(grid.hx(), grid.hy());
    Ok(assemble_window(grid, window, &e, |c| weight[c]))
}

fn check_weight(grid: &GridPair, weight: &[f64]) -> Result<()> {
    check_cells(grid, "weight cells", weight)?;
    if let Some((cell, &value)) = weight.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
        return Err(Error::NegativeWeight { cell, value });
    }
    Ok(())
}

/// Global stiffness over all fine nodes, before Dirichlet elimination.
pub fn assemble_stiffness_full(grid: &GridPair, field: &PermeabilityField) -> Result<FineOperator> {
    let m = stiffness_on_window(grid, field, &grid.full_window())?;
    Ok(FineOperator::new(*grid, m, false))
}

/// Global stiffness with homogeneous Dirichlet rows and columns eliminated.
pub fn assemble_stiffness(grid: &GridPair, field: &PermeabilityField) -> Result<FineOperator> {
    let full = stiffness_on_window(grid, field, &grid.full_window())?;
    Ok(FineOperator::new(*grid, eliminate(grid, &full), true))
}

/// Weighted mass matrix over all fine nodes (not eliminated).
pub fn assemble_weighted_mass(grid: &GridPair, weight: &[f64]) -> Result<FineOperator> {
    let m = mass_on_window(grid, weight, &grid.full_window())?;
    Ok(FineOperator::new(*grid, m, false))
}

pub(crate) fn free_nodes(grid: &GridPair) -> Vec<usize> {
    (1..grid.fine_ny())
        .flat_map(|iy| (1..grid.fine_nx()).map(move |ix| grid.node_index(ix, iy)))
        .collect()
}

/// Restricts an all-node matrix to the free DOFs.
pub fn eliminate(grid: &GridPair, full: &CsrMatrix) -> CsrMatrix {
    full.principal_submatrix(&free_nodes(grid))
}

/// Load vector `scale·∫ density φ_p` over all fine nodes.
pub fn assemble_functional_full(grid: &GridPair, density: &[f64], scale: f64) -> Result<Vec<f64>> {
    check_cells(grid, "density cells", density)?;
    let quarter = 0.25 * grid.hx() * grid.hy();
    let mut out = vec![0.0; grid.num_nodes()];
    for cy in 0..grid.fine_ny() {
        for cx in 0..grid.fine_nx() {
            let d = density[grid.cell_index(cx, cy)];
            if d == 0.0 {
                continue;
            }
            let v = scale * d * quarter;
            for a in 0..4 {
                out[grid.node_index(cx + (a & 1), cy + (a >> 1))] += v;
            }
        }
    }
    Ok(out)
}

/// Load vector over the free DOFs; serves both the source `f` and goal
/// functionals `g(v) = c·∫_K v`.
pub fn assemble_functional(grid: &GridPair, density: &[f64], scale: f64) -> Result<NodalVector> {
    let full = assemble_functional_full(grid, density, scale)?;
    Ok(NodalVector::from(
        free_nodes(grid).into_iter().map(|n| full[n]).collect::<Vec<_>>(),
    ))
}
