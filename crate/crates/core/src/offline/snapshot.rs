use crate::error::{Error, Result};
use crate::fem::{stiffness_on_window, CsrMatrix, LocalOperator, PermeabilityField};
use crate::grid::{GridPair, Neighborhood, NodeWindow};

/// Discrete κ-harmonic extensions of the boundary deltas of one neighborhood.
///
/// `columns` is column-major with `window.len()` rows: column `l` equals one
/// on the `l`-th perimeter node, zero on the others, and is harmonic inside.
#[derive(Clone, Debug)]
pub struct SnapshotSet {
    pub neighborhood: usize,
    pub window: NodeWindow,
    pub columns: Vec<f64>,
    /// Local stiffness over the cells of `ω_i`, without boundary elimination.
    pub stiffness: CsrMatrix,
}

impl SnapshotSet {
    pub fn len(&self) -> usize {
        self.columns.len() / self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, l: usize) -> &[f64] {
        let n = self.window.len();
        &self.columns[l * n..(l + 1) * n]
    }
}

/// One factorized local solve with `L_i` right-hand sides `−A_{I,B} δ_l`.
pub fn compute_snapshots(
    grid: &GridPair,
    field: &PermeabilityField,
    neigh: &Neighborhood,
    local: &LocalOperator,
) -> Result<SnapshotSet> {
    if neigh.interior.is_empty() {
        return Err(Error::DegenerateNeighborhood(neigh.index));
    }
    if local.dim() != neigh.interior_len() {
        return Err(Error::DimensionMismatch {
            what: "local operator size",
            expected: neigh.interior_len(),
            got: local.dim(),
        });
    }
    let stiffness = stiffness_on_window(grid, field, &neigh.window)?;
    let ni = neigh.interior_len();
    let nb = neigh.boundary_len();
    let mut rhs = stiffness.dense_block(&neigh.interior, &neigh.boundary);
    rhs.iter_mut().for_each(|v| *v = -*v);
    local.solve_many_in_place(&mut rhs, nb);

    let n = neigh.window.len();
    let mut columns = vec![0.0; n * nb];
    for l in 0..nb {
        let col = &mut columns[l * n..(l + 1) * n];
        col[neigh.boundary[l]] = 1.0;
        for (i, &k) in neigh.interior.iter().enumerate() {
            col[k] = rhs[l * ni + i];
        }
    }
    Ok(SnapshotSet {
        neighborhood: neigh.index,
        window: neigh.window,
        columns,
        stiffness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_stiffness, restrict_local};

    fn setup(g: &GridPair) -> (PermeabilityField, crate::fem::FineOperator) {
        let (nx, ny) = (g.fine_nx(), g.fine_ny());
        let vals = (0..nx * ny)
            .map(|c| if (c / nx) % 5 == 2 { 1e3 } else { 1.0 + (c % 3) as f64 })
            .collect();
        let f = PermeabilityField::new(nx, ny, vals).unwrap();
        let op = assemble_stiffness(g, &f).unwrap();
        (f, op)
    }

    #[test]
    fn deltas_sum_to_one_and_are_harmonic() {
        let g = GridPair::new(4, 4, 5).unwrap();
        let (f, op) = setup(&g);
        for neigh in g.neighborhoods().unwrap() {
            let local = restrict_local(&op, &neigh).unwrap();
            let s = compute_snapshots(&g, &f, &neigh, &local).unwrap();
            assert_eq!(s.len(), 8 * g.refine());
            for k in 0..neigh.window.len() {
                let sum: f64 = (0..s.len()).map(|l| s.column(l)[k]).sum();
                assert!((sum - 1.0).abs() < 1e-10);
            }
            let scale = s.stiffness.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for l in 0..s.len() {
                let col = s.column(l);
                let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
                for (j, &b) in neigh.boundary.iter().enumerate() {
                    assert_eq!(col[b], if j == l { 1.0 } else { 0.0 });
                }
                for &k in &neigh.interior {
                    assert!(s.stiffness.row_dot(k, col).abs() <= 1e-10 * scale * norm);
                }
            }
        }
    }
}
