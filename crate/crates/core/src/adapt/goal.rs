use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{assemble_functional, NodalVector};
use crate::grid::GridPair;

/// Relative floor under which `|g(u)|` is treated as zero.
pub const UNDEFINED_GOAL: f64 = 1e-14;

/// `g(v) = c ∫_R v` over an axis-aligned rectangle `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalFunctional {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub scale: f64,
}

/// Inclusive-exclusive fine-cell range `[cx0, cx1) × [cy0, cy1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellRect {
    pub cx0: usize,
    pub cy0: usize,
    pub cx1: usize,
    pub cy1: usize,
}

impl GoalFunctional {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64, scale: f64) -> Result<Self> {
        let g = Self { x0, y0, x1, y1, scale };
        let coords_ok = [x0, y0, x1, y1].iter().all(|v| (0.0..=1.0).contains(v));
        if !coords_ok || !(x0 < x1) || !(y0 < y1) {
            return Err(Error::Config(format!(
                "goal region [{x0}, {x1}] x [{y0}, {y1}] must be a non-empty subset of the unit square"
            )));
        }
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::Config(format!("goal scale {scale} must be finite and non-zero")));
        }
        Ok(g)
    }

    /// Snaps the region outward to fine-cell edges. Regions narrower than one
    /// fine cell in either direction are rejected.
    pub fn cells(&self, grid: &GridPair) -> Result<CellRect> {
        let (nx, ny) = (grid.fine_nx(), grid.fine_ny());
        let slack = 1e-9;
        if self.x1 - self.x0 < grid.hx() * (1.0 - slack) || self.y1 - self.y0 < grid.hy() * (1.0 - slack) {
            return Err(Error::Config(format!(
                "goal region is smaller than one fine cell ({} x {})",
                grid.hx(),
                grid.hy()
            )));
        }
        let lo = |v: f64, n: usize| ((v * n as f64 + slack).floor().max(0.0) as usize).min(n);
        let hi = |v: f64, n: usize| ((v * n as f64 - slack).ceil().max(0.0) as usize).min(n);
        Ok(CellRect {
            cx0: lo(self.x0, nx),
            cy0: lo(self.y0, ny),
            cx1: hi(self.x1, nx),
            cy1: hi(self.y1, ny),
        })
    }

    /// Cell-wise density (1 inside the snapped region).
    pub fn density(&self, grid: &GridPair) -> Result<Vec<f64>> {
        let c = self.cells(grid)?;
        let mut d = vec![0.0; grid.num_cells()];
        for cy in c.cy0..c.cy1 {
            for cx in c.cx0..c.cx1 {
                d[grid.cell_index(cx, cy)] = 1.0;
            }
        }
        Ok(d)
    }

    /// The goal vector `Ĝ` on the free DOFs.
    pub fn vector(&self, grid: &GridPair) -> Result<NodalVector> {
        assemble_functional(grid, &self.density(grid)?, self.scale)
    }
}

/// `e_g = |g(u − u_ms)| / |g(u)|`.
pub fn goal_error(u_ms: &[f64], u_fine: &[f64], goal_vec: &[f64]) -> Result<f64> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gu = dot(goal_vec, u_fine);
    let threshold = UNDEFINED_GOAL * dot(goal_vec, goal_vec).sqrt() * dot(u_fine, u_fine).sqrt();
    if !(gu.abs() > threshold) {
        return Err(Error::UndefinedGoal {
            value: gu.abs(),
            threshold,
        });
    }
    let diff: f64 = goal_vec
        .iter()
        .zip(u_fine.iter().zip(u_ms))
        .map(|(g, (u, m))| g * (u - m))
        .sum();
    Ok(diff.abs() / gu.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping_outward() {
        let g = GridPair::new(4, 4, 4).unwrap();
        let goal = GoalFunctional::new(0.0625, 0.0, 0.125, 0.0625, 1.0).unwrap();
        assert_eq!(
            goal.cells(&g).unwrap(),
            CellRect {
                cx0: 1,
                cy0: 0,
                cx1: 2,
                cy1: 1
            }
        );
        let goal = GoalFunctional::new(0.07, 0.01, 0.2, 0.13, 1.0).unwrap();
        assert_eq!(
            goal.cells(&g).unwrap(),
            CellRect {
                cx0: 1,
                cy0: 0,
                cx1: 4,
                cy1: 3
            }
        );
        let tiny = GoalFunctional::new(0.1, 0.1, 0.12, 0.3, 1.0).unwrap();
        assert!(tiny.cells(&g).is_err());
        assert!(GoalFunctional::new(0.5, 0.1, 0.4, 0.3, 1.0).is_err());
        assert!(GoalFunctional::new(0.1, 0.1, 1.4, 0.3, 1.0).is_err());
    }

    #[test]
    fn goal_vector_integrates_region() {
        let g = GridPair::new(4, 4, 4).unwrap();
        let goal = GoalFunctional::new(0.25, 0.25, 0.75, 0.5, -2.0).unwrap();
        let v = goal.vector(&g).unwrap();
        // every node of the region is interior, so the total equals c·|R|
        let total: f64 = v.iter().sum();
        assert!((total + 2.0 * 0.125).abs() < 1e-14);
    }

    #[test]
    fn error_examples() {
        let u = [1.0, 2.0, -0.5];
        let gv = [0.3, 0.1, 0.2];
        assert_eq!(goal_error(&u, &u, &gv).unwrap(), 0.0);
        assert!((goal_error(&[0.0; 3], &u, &gv).unwrap() - 1.0).abs() < 1e-15);
        let um = [0.9, 2.1, -0.4];
        let neg: Vec<f64> = gv.iter().map(|x| -x).collect();
        assert_eq!(goal_error(&um, &u, &gv).unwrap(), goal_error(&um, &u, &neg).unwrap());
        assert!(matches!(
            goal_error(&um, &u, &[0.0, 0.0, 0.0]),
            Err(Error::UndefinedGoal { .. })
        ));
    }
}
