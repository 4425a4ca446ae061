use rayon::prelude::*;

use crate::error::Result;
use crate::fem::{stiffness_on_window, PermeabilityField, SparseCholesky};
use crate::grid::GridPair;
use crate::patch::PatchVector;

/// Multiscale partition of unity `{χ_j}`, one function per coarse node
/// (interior and boundary), each stored on the closure of its neighborhood.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    grid: GridPair,
    chi: Vec<PatchVector>,
}

impl PartitionOfUnity {
    pub fn grid(&self) -> &GridPair {
        &self.grid
    }

    /// `χ_j` for the coarse node with lattice index `node`.
    pub fn chi(&self, node: usize) -> &PatchVector {
        &self.chi[node]
    }

    /// `χ_i` for the interior coarse node with compact index `i`.
    pub fn chi_interior(&self, i: usize) -> &PatchVector {
        let (cx, cy) = self.grid.interior_coarse_coords(i);
        &self.chi[self.grid.coarse_node_index(cx, cy)]
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    /// `Σ_j χ_j` evaluated at every fine node.
    pub fn sum_at_nodes(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut out = vec![0.0; g.num_nodes()];
        for chi in &self.chi {
            for (k, &v) in chi.values.iter().enumerate() {
                let (ix, iy) = chi.window.coords(k);
                out[g.node_index(ix, iy)] += v;
            }
        }
        out
    }
}

/// Bilinear hat of the corner `(ax, ay) ∈ {0,1}²` of a coarse cell, at the
/// relative position `(s, t) ∈ [0,1]²`.
fn hat(ax: usize, ay: usize, s: f64, t: f64) -> f64 {
    let fx = if ax == 1 { s } else { 1.0 - s };
    let fy = if ay == 1 { t } else { 1.0 - t };
    fx * fy
}

/// κ-harmonic extensions of the four corner hats inside one coarse cell.
fn cell_functions(grid: &GridPair, field: &PermeabilityField, kx: usize, ky: usize) -> Result<[PatchVector; 4]> {
    let window = grid.coarse_cell_window(kx, ky);
    let r = grid.refine() as f64;
    let mut out: [PatchVector; 4] = std::array::from_fn(|_| PatchVector::zeros(window));

    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for k in 0..window.len() {
        let (ix, iy) = window.coords(k);
        if ix == window.x0 || ix == window.x1 || iy == window.y0 || iy == window.y1 {
            boundary.push(k);
        } else {
            interior.push(k);
        }
    }

    for (corner, f) in out.iter_mut().enumerate() {
        for &k in &boundary {
            let (ix, iy) = window.coords(k);
            let s = (ix - window.x0) as f64 / r;
            let t = (iy - window.y0) as f64 / r;
            f.values[k] = hat(corner & 1, corner >> 1, s, t);
        }
    }
    if interior.is_empty() {
        return Ok(out);
    }

    let a = stiffness_on_window(grid, field, &window)?;
    let a_ii = a.principal_submatrix(&interior);
    let a_ib = a.dense_block(&interior, &boundary);
    let factor = SparseCholesky::factorize(&a_ii)?;
    let ni = interior.len();
    let mut rhs = vec![0.0; ni * 4];
    for (corner, f) in out.iter().enumerate() {
        let col = &mut rhs[corner * ni..(corner + 1) * ni];
        for (b, &kb) in boundary.iter().enumerate() {
            let p = f.values[kb];
            if p != 0.0 {
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= a_ib[b * ni + i] * p;
                }
            }
        }
    }
    factor.solve_many_in_place(&mut rhs, 4);
    // The exact extensions sum to the constant 1; at high contrast rounding
    // leaves a defect near 1e-12, which is shared out evenly.
    for (i, &k) in interior.iter().enumerate() {
        let defect = 1.0 - (0..4).map(|c| rhs[c * ni + i]).sum::<f64>();
        for (corner, f) in out.iter_mut().enumerate() {
            f.values[k] = rhs[corner * ni + i] + 0.25 * defect;
        }
    }
    Ok(out)
}

/// Builds `χ_j` for every coarse node: κ-harmonic in each coarse cell with
/// the bilinear hat as boundary trace, glued across cells.
pub fn compute_partition_of_unity(grid: &GridPair, field: &PermeabilityField) -> Result<PartitionOfUnity> {
    field.check_grid(grid)?;
    let (cnx, cny) = (grid.coarse_nx(), grid.coarse_ny());
    let cells: Vec<[PatchVector; 4]> = (0..cnx * cny)
        .into_par_iter()
        .map(|k| cell_functions(grid, field, k % cnx, k / cnx))
        .collect::<Result<_>>()?;

    let mut chi: Vec<PatchVector> = (0..grid.num_coarse_nodes())
        .map(|n| {
            let (cx, cy) = grid.coarse_node_coords(n);
            PatchVector::zeros(grid.coarse_node_window(cx, cy))
        })
        .collect();
    for (k, funcs) in cells.iter().enumerate() {
        let (kx, ky) = (k % cnx, k / cnx);
        for (corner, f) in funcs.iter().enumerate() {
            let node = grid.coarse_node_index(kx + (corner & 1), ky + (corner >> 1));
            let target = &mut chi[node];
            for (p, &v) in f.values.iter().enumerate() {
                let (ix, iy) = f.window.coords(p);
                let q = target.window.local(ix, iy);
                target.values[q] = v;
            }
        }
    }
    Ok(PartitionOfUnity { grid: *grid, chi })
}

/// Which coarse nodes contribute to the spectral weight `κ̃`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaTildeNodes {
    /// Every coarse node, including those on `∂Ω`.
    #[default]
    All,
    /// Only interior coarse nodes.
    Interior,
}

/// Spectral weight `κ̃ = H² κ Σ_j |∇χ_j|²` per fine cell, with the gradients
/// taken at cell centers.
pub fn compute_kappa_tilde(
    pou: &PartitionOfUnity,
    field: &PermeabilityField,
    nodes: KappaTildeNodes,
) -> Result<Vec<f64>> {
    let grid = pou.grid();
    field.check_grid(grid)?;
    let r = grid.refine();
    let (hx, hy) = (grid.hx(), grid.hy());
    let h2 = grid.coarse_h() * grid.coarse_h();
    let mut out = vec![0.0; grid.num_cells()];
    for cy in 0..grid.fine_ny() {
        for cx in 0..grid.fine_nx() {
            let (kx, ky) = (cx / r, cy / r);
            let mut sum = 0.0;
            for corner in 0..4 {
                let (nx, ny) = (kx + (corner & 1), ky + (corner >> 1));
                if nodes == KappaTildeNodes::Interior && grid.interior_coarse_index(nx, ny).is_none() {
                    continue;
                }
                let chi = pou.chi(grid.coarse_node_index(nx, ny));
                let v00 = chi.at(cx, cy);
                let v10 = chi.at(cx + 1, cy);
                let v01 = chi.at(cx, cy + 1);
                let v11 = chi.at(cx + 1, cy + 1);
                let gx = 0.5 * ((v10 - v00) + (v11 - v01)) / hx;
                let gy = 0.5 * ((v01 - v00) + (v11 - v10)) / hy;
                sum += gx * gx + gy * gy;
            }
            out[grid.cell_index(cx, cy)] = h2 * field.at(cx, cy) * sum;
        }
    }
    Ok(out)
}
