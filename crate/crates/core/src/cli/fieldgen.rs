//! Seeded synthetic permeability fields built from channels and blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::PermeabilityField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    ChannelHorizontal,
    ChannelVertical,
    Block,
}

/// A rectangle of cells `[x0, x1) × [y0, y1)` set to `value`. Channels span
/// the whole grid along their axis, so only the transverse extent is used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub kind: FeatureKind,
    #[serde(default)]
    pub x0: usize,
    #[serde(default)]
    pub y0: usize,
    #[serde(default)]
    pub x1: usize,
    #[serde(default)]
    pub y1: usize,
    pub value: f64,
}

/// Randomly placed rectangular inclusions, painted before the features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inclusions {
    pub count: usize,
    pub width: usize,
    pub height: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub background: f64,
    /// Resolution the extents refer to. The target grid must be an integer
    /// multiple of it; when absent, extents are in target cells.
    #[serde(default)]
    pub resolution: Option<(usize, usize)>,
    #[serde(default)]
    pub features: Vec<Feature>,
    #[serde(default)]
    pub inclusions: Option<Inclusions>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl FieldSpec {
    pub fn constant(value: f64) -> Self {
        Self {
            background: value,
            resolution: None,
            features: Vec::new(),
            inclusions: None,
            seed: None,
        }
    }

    /// Multiplies every feature and inclusion value by `factor`.
    pub fn with_contrast_factor(mut self, factor: f64) -> Self {
        for f in &mut self.features {
            f.value *= factor;
        }
        if let Some(inc) = &mut self.inclusions {
            inc.value *= factor;
        }
        self
    }
}

fn check_value(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} value {v} must be positive and finite")))
    }
}

/// Paints `spec` onto an `nx × ny` cell grid. `seed` overrides the spec's own
/// seed for the random inclusions.
pub fn generate_field(spec: &FieldSpec, nx: usize, ny: usize, seed: Option<u64>) -> Result<PermeabilityField> {
    check_value("background", spec.background)?;
    let (rx, ry) = spec.resolution.unwrap_or((nx, ny));
    if rx == 0 || ry == 0 || !nx.is_multiple_of(rx) || !ny.is_multiple_of(ry) {
        return Err(Error::Config(format!(
            "grid {nx}x{ny} is not an integer refinement of the spec resolution {rx}x{ry}"
        )));
    }
    let (sx, sy) = (nx / rx, ny / ry);
    let mut values = vec![spec.background; nx * ny];
    let mut paint = |x0: usize, y0: usize, x1: usize, y1: usize, v: f64| {
        for cy in y0 * sy..y1 * sy {
            for cx in x0 * sx..x1 * sx {
                values[cy * nx + cx] = v;
            }
        }
    };

    if let Some(inc) = &spec.inclusions {
        check_value("inclusion", inc.value)?;
        if inc.width == 0 || inc.height == 0 || inc.width > rx || inc.height > ry {
            return Err(Error::Config(format!(
                "inclusion size {}x{} does not fit the {rx}x{ry} grid",
                inc.width, inc.height
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.or(spec.seed).unwrap_or(0));
        for _ in 0..inc.count {
            let x0 = rng.random_range(0..=rx - inc.width);
            let y0 = rng.random_range(0..=ry - inc.height);
            paint(x0, y0, x0 + inc.width, y0 + inc.height, inc.value);
        }
    }

    for (index, f) in spec.features.iter().enumerate() {
        check_value("feature", f.value)?;
        let (x0, y0, x1, y1) = match f.kind {
            FeatureKind::ChannelHorizontal => (0, f.y0, rx, f.y1),
            FeatureKind::ChannelVertical => (f.x0, 0, f.x1, ry),
            FeatureKind::Block => (f.x0, f.y0, f.x1, f.y1),
        };
        if x0 >= x1 || y0 >= y1 || x1 > rx || y1 > ry {
            return Err(Error::FeatureOutOfBounds { index, nx: rx, ny: ry });
        }
        paint(x0, y0, x1, y1, f.value);
    }
    PermeabilityField::new(nx, ny, values)
}

#[cfg(test)]
fn hchannel(y0: usize, y1: usize, value: f64) -> Feature {
    Feature {
        kind: FeatureKind::ChannelHorizontal,
        x0: 0,
        y0,
        x1: 0,
        y1,
        value,
    }
}

fn block(x0: usize, y0: usize, x1: usize, y1: usize, value: f64) -> Feature {
    Feature {
        kind: FeatureKind::Block,
        x0,
        y0,
        x1,
        y1,
        value,
    }
}

/// Thin channels, short streaks and inclusions on a 64×64 reference grid,
/// contrast `1e4`.
pub fn ex1() -> FieldSpec {
    let hi = 1e4;
    FieldSpec {
        background: 1.0,
        resolution: Some((64, 64)),
        features: vec![
            block(2, 29, 62, 30, hi),
            block(6, 13, 26, 14, hi),
            block(38, 45, 58, 46, hi),
            block(45, 6, 46, 24, hi),
            block(18, 38, 19, 58, hi),
        ],
        inclusions: Some(Inclusions {
            count: 8,
            width: 2,
            height: 2,
            value: hi,
        }),
        seed: Some(7),
    }
}

/// Thin channels on a 64×64 reference grid with the given channel value.
pub fn ex3(channel: f64) -> FieldSpec {
    FieldSpec {
        background: 1.0,
        resolution: Some((64, 64)),
        features: vec![
            block(2, 18, 62, 19, channel),
            block(2, 42, 62, 43, channel),
            block(10, 29, 54, 30, channel),
        ],
        inclusions: None,
        seed: None,
    }
}

/// Looks up a shipped spec by name.
pub fn preset(name: &str) -> Option<FieldSpec> {
    match name {
        "ex1" => Some(ex1()),
        "ex3-lo" => Some(ex3(1e4)),
        "ex3-hi" => Some(ex3(1e6)),
        _ => None,
    }
}

pub const PRESETS: [&str; 3] = ["ex1", "ex3-lo", "ex3-hi"];
