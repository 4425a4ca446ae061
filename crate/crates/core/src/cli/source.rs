use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridPair;

/// Amplitude used by the bare `blocks` spec. Each block then carries the same
/// total mass as the unit-scale default goal region, which keeps primal and
/// dual indicators of comparable size.
pub const DEFAULT_BLOCK_AMPLITUDE: f64 = 0.03125;

/// Piecewise-constant source term `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceSpec {
    /// `+a` on `[1/8, 3/8]²` and `−a` on `[5/8, 7/8]²`.
    Blocks {
        amplitude: f64,
    },
    Uniform {
        value: f64,
    },
}

impl FromStr for SourceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let number = |v: &str| -> Result<f64> {
            match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(Error::Config(format!(
                    "`{v}` is not a finite number in source spec `{s}`"
                ))),
            }
        };
        if s == "blocks" {
            return Ok(SourceSpec::Blocks {
                amplitude: DEFAULT_BLOCK_AMPLITUDE,
            });
        }
        if let Some(v) = s.strip_prefix("blocks:") {
            return Ok(SourceSpec::Blocks { amplitude: number(v)? });
        }
        if let Some(v) = s.strip_prefix("uniform:") {
            return Ok(SourceSpec::Uniform { value: number(v)? });
        }
        Err(Error::Config(format!(
            "unknown source spec `{s}` (expected `blocks`, `blocks:<amplitude>` or `uniform:<value>`)"
        )))
    }
}

impl SourceSpec {
    /// Cell-wise density on the fine grid; a cell belongs to a block when its
    /// center does.
    pub fn density(&self, grid: &GridPair) -> Vec<f64> {
        let (nx, ny) = (grid.fine_nx(), grid.fine_ny());
        match *self {
            SourceSpec::Uniform { value } => vec![value; nx * ny],
            SourceSpec::Blocks { amplitude } => {
                let inside = |t: f64, lo: f64, hi: f64| t > lo && t < hi;
                (0..nx * ny)
                    .map(|c| {
                        let x = ((c % nx) as f64 + 0.5) / nx as f64;
                        let y = ((c / nx) as f64 + 0.5) / ny as f64;
                        if inside(x, 0.125, 0.375) && inside(y, 0.125, 0.375) {
                            amplitude
                        } else if inside(x, 0.625, 0.875) && inside(y, 0.625, 0.875) {
                            -amplitude
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        }
    }
}
