use crate::error::{Error, Result};
use crate::grid::GridPair;

/// Cell-wise constant permeability `κ` on the fine grid, row-major from the
/// bottom-left cell.
#[derive(Clone, Debug, PartialEq)]
pub struct PermeabilityField {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    min: f64,
    max: f64,
}

impl PermeabilityField {
    pub fn new(nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != nx * ny {
            return Err(Error::DimensionMismatch {
                what: "permeability values",
                expected: nx * ny,
                got: values.len(),
            });
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for (k, &v) in values.iter().enumerate() {
            // also rejects NaN
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositivePermeability {
                    ix: k % nx,
                    iy: k / nx,
                    value: v,
                });
            }
            min = min.min(v);
            max = max.max(v);
        }
        Ok(Self {
            nx,
            ny,
            values,
            min,
            max,
        })
    }

    pub fn constant(nx: usize, ny: usize, value: f64) -> Result<Self> {
        Self::new(nx, ny, vec![value; nx * ny])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, cx: usize, cy: usize) -> f64 {
        self.values[cy * self.nx + cx]
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn contrast(&self) -> f64 {
        self.max / self.min
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.nx, self.ny, self.values.iter().map(|v| v * c).collect())
    }

    pub(crate) fn check_grid(&self, grid: &GridPair) -> Result<()> {
        if self.nx != grid.fine_nx() || self.ny != grid.fine_ny() {
            return Err(Error::DimensionMismatch {
                what: "permeability field cells",
                expected: grid.num_cells(),
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_cells(grid: &GridPair, what: &'static str, values: &[f64]) -> Result<()> {
    if values.len() != grid.num_cells() {
        return Err(Error::DimensionMismatch {
            what,
            expected: grid.num_cells(),
            got: values.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caches_bounds() {
        let f = PermeabilityField::new(2, 2, vec![1.0, 5.0, 2.0, 1e4]).unwrap();
        assert_eq!(f.min(), 1.0);
        assert_eq!(f.max(), 1e4);
        assert_eq!(f.contrast(), 1e4);
        assert_eq!(f.at(1, 1), 1e4);
    }

    #[test]
    fn rejects_bad_values() {
        let e = PermeabilityField::new(2, 2, vec![1.0, 0.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(e, Error::NonPositivePermeability { ix: 1, iy: 0, .. }));
        assert!(PermeabilityField::new(2, 2, vec![1.0, f64::NAN, 1.0, 1.0]).is_err());
        assert!(PermeabilityField::new(2, 2, vec![1.0; 3]).is_err());
    }
}
