use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::reduction::{Bar, PersistenceDiagram};
use crate::math;

/// What to do with bars that never die before rasterizing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum EssentialPolicy {
    /// Death := `factor ×` the post's largest finite filtration value.
    Cap { factor: f64 },
    Drop,
}

impl Default for EssentialPolicy {
    fn default() -> Self {
        EssentialPolicy::Cap { factor: 1.05 }
    }
}

/// Raster geometry and kernel of a persistence image.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageConfig {
    pub resolution: usize,
    pub birth_range: (f64, f64),
    pub death_range: (f64, f64),
    pub sigma: f64,
    pub essential: EssentialPolicy,
}

impl ImageConfig {
    /// Square domain `[0, cap]²` with `σ = cap / resolution`.
    pub fn with_cap(cap: f64, resolution: usize) -> Self {
        ImageConfig {
            resolution,
            birth_range: (0.0, cap),
            death_range: (0.0, cap),
            sigma: cap / resolution as f64,
            essential: EssentialPolicy::default(),
        }
    }

    fn centers(range: (f64, f64), r: usize) -> Vec<f64> {
        let step = (range.1 - range.0) / r as f64;
        (0..r).map(|k| range.0 + (k as f64 + 0.5) * step).collect()
    }

    pub fn is_valid(&self) -> bool {
        self.resolution > 0
            && self.sigma > 0.0
            && self.sigma.is_finite()
            && self.birth_range.0.is_finite()
            && self.birth_range.1.is_finite()
            && self.death_range.0.is_finite()
            && self.death_range.1.is_finite()
    }
}

/// `resolution × resolution` pixels, row-major with rows along the death
/// axis and columns along the birth axis, both ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceImage {
    pub resolution: usize,
    pub pixels: Vec<f64>,
}

impl PersistenceImage {
    pub fn zeros(resolution: usize) -> Self {
        PersistenceImage {
            resolution,
            pixels: vec![0.0; resolution * resolution],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.resolution + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.pixels.chunks(self.resolution.max(1))
    }
}

/// Finite (birth, death) points to rasterize for one dimension.
fn points(diag: &PersistenceDiagram, dim: u8, policy: EssentialPolicy) -> Vec<(f64, f64)> {
    diag.in_dim(dim)
        .filter_map(|b: &Bar| {
            if b.is_essential() {
                match policy {
                    EssentialPolicy::Cap { factor } => Some((b.birth, factor * diag.max_finite_value)),
                    EssentialPolicy::Drop => None,
                }
            } else {
                Some((b.birth, b.death))
            }
        })
        .collect()
}

/// Sum of persistence-weighted Gaussians over the points of dimension
/// `dim`: `I(x, y) = Σ (d − b) · exp(−((x − b)² + (y − d)²) / (2σ²))`,
/// evaluated at pixel centers.
pub fn diagram_to_image(diag: &PersistenceDiagram, dim: u8, cfg: &ImageConfig) -> PersistenceImage {
    let r = cfg.resolution;
    let mut img = PersistenceImage::zeros(r);
    let xs = ImageConfig::centers(cfg.birth_range, r);
    let ys = ImageConfig::centers(cfg.death_range, r);
    let two_s2 = 2.0 * cfg.sigma * cfg.sigma;
    for (b, d) in points(diag, dim, cfg.essential) {
        let w = d - b;
        if w <= 0.0 {
            continue;
        }
        for (row, y) in ys.iter().enumerate() {
            let dy = y - d;
            for (col, x) in xs.iter().enumerate() {
                let dx = x - b;
                img.pixels[row * r + col] += w * math::exp(-(dx * dx + dy * dy) / two_s2);
            }
        }
    }
    img
}
