use crate::fem::FineOperator;
use crate::grid::{GridPair, NodeWindow};

/// Nodal values on a rectangular window of the fine lattice; zero elsewhere.
///
/// Every multiscale basis function lives on the closure of its owner's
/// neighborhood, so storing it on that window keeps memory proportional to
/// the neighborhood size rather than the fine grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchVector {
    pub window: NodeWindow,
    pub values: Vec<f64>,
}

impl PatchVector {
    pub fn zeros(window: NodeWindow) -> Self {
        Self {
            window,
            values: vec![0.0; window.len()],
        }
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        if self.window.contains(ix, iy) {
            self.values[self.window.local(ix, iy)]
        } else {
            0.0
        }
    }

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    /// Euclidean dot product over the overlap of the two windows.
    pub fn dot(&self, other: &PatchVector) -> f64 {
        let Some(ov) = self.window.intersect(&other.window) else {
            return 0.0;
        };
        let mut sum = 0.0;
        for iy in ov.y0..=ov.y1 {
            let a = self.window.local(ov.x0, iy);
            let b = other.window.local(ov.x0, iy);
            let w = ov.width();
            sum += self.values[a..a + w]
                .iter()
                .zip(&other.values[b..b + w])
                .map(|(x, y)| x * y)
                .sum::<f64>();
        }
        sum
    }

    /// Dot product with a free-DOF vector.
    pub fn dot_free(&self, grid: &GridPair, v: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (k, &x) in self.values.iter().enumerate() {
            if x != 0.0 {
                let (ix, iy) = self.window.coords(k);
                if let Some(d) = grid.free_index(ix, iy) {
                    sum += x * v[d];
                }
            }
        }
        sum
    }

    /// `out += c · self` on the free DOFs.
    pub fn add_to_free(&self, grid: &GridPair, c: f64, out: &mut [f64]) {
        for (k, &x) in self.values.iter().enumerate() {
            if x != 0.0 {
                let (ix, iy) = self.window.coords(k);
                if let Some(d) = grid.free_index(ix, iy) {
                    out[d] += c * x;
                }
            }
        }
    }

    pub fn to_free(&self, grid: &GridPair) -> Vec<f64> {
        let mut out = vec![0.0; grid.num_free()];
        self.add_to_free(grid, 1.0, &mut out);
        out
    }

    /// Global operator applied to `self` (which must vanish on the window
    /// perimeter), evaluated on the same window. Values on `∂Ω` are zero.
    pub fn apply(&self, op: &FineOperator) -> PatchVector {
        let grid = op.grid();
        let w = &self.window;
        let mut out = PatchVector::zeros(*w);
        for k in 0..w.len() {
            let (ix, iy) = w.coords(k);
            let Some(row) = grid.free_index(ix, iy) else {
                continue;
            };
            out.values[k] = op
                .matrix()
                .row(row)
                .map(|(col, a)| {
                    let (jx, jy) = grid.free_coords(col);
                    a * self.at(jx, jy)
                })
                .sum();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_dot() {
        let a = PatchVector {
            window: NodeWindow {
                x0: 0,
                y0: 0,
                x1: 2,
                y1: 1,
            },
            values: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
        };
        let b = PatchVector {
            window: NodeWindow {
                x0: 2,
                y0: 1,
                x1: 3,
                y1: 2,
            },
            values: vec![10.0, 0.0, 0.0, 0.0],
        };
        assert_eq!(a.dot(&b), 60.0);
        assert_eq!(b.dot(&a), 60.0);
        let far = PatchVector::zeros(NodeWindow {
            x0: 5,
            y0: 5,
            x1: 6,
            y1: 6,
        });
        assert_eq!(a.dot(&far), 0.0);
    }

    #[test]
    fn free_roundtrip() {
        let g = GridPair::new(2, 2, 2).unwrap();
        let mut p = PatchVector::zeros(g.full_window());
        for (k, v) in p.values.iter_mut().enumerate() {
            let (ix, iy) = g.full_window().coords(k);
            if g.free_index(ix, iy).is_some() {
                *v = k as f64;
            }
        }
        let free = p.to_free(&g);
        assert_eq!(free.len(), 9);
        assert_eq!(p.dot_free(&g, &free), free.iter().map(|x| x * x).sum::<f64>());
    }
}
