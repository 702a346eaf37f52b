//! Histogram of oriented gradients.
//!
//! Gradients by central difference with replicated borders, unsigned
//! orientation in `[0, 180)` degrees with bin `i` centered on `i * 180 / bins`,
//! magnitude split linearly between the two nearest bins, overlapping blocks
//! L2-normalized.

use serde::{Deserialize, Serialize};

use crate::dataset::GrayImage;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct HogParams {
    pub cell_size: usize,
    pub bins: usize,
    /// Block edge length in cells; blocks step by one cell.
    pub block_cells: usize,
    pub epsilon: f64,
}

impl Default for HogParams {
    fn default() -> Self {
        Self {
            cell_size: 4,
            bins: 9,
            block_cells: 2,
            epsilon: 1e-6,
        }
    }
}

impl HogParams {
    pub fn validate(&self) -> Result<()> {
        if self.cell_size == 0 || self.bins < 2 || self.block_cells == 0 {
            return Err(Error::Config(format!(
                "HOG needs cell-size >= 1, bins >= 2, block-cells >= 1 (got {}, {}, {})",
                self.cell_size, self.bins, self.block_cells
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config("HOG epsilon must be > 0".into()));
        }
        Ok(())
    }

    /// Descriptor length for a `width x height` image.
    pub fn descriptor_len(&self, width: usize, height: usize) -> usize {
        let (cx, cy) = (width / self.cell_size, height / self.cell_size);
        let bx = (cx + 1).saturating_sub(self.block_cells);
        let by = (cy + 1).saturating_sub(self.block_cells);
        bx * by * self.block_cells * self.block_cells * self.bins
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HogDescriptor(pub Vec<f64>);

impl HogDescriptor {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Unnormalized per-cell orientation histograms, cells in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CellHistograms {
    pub cells_x: usize,
    pub cells_y: usize,
    pub bins: usize,
    pub values: Vec<f64>,
}

impl CellHistograms {
    pub fn cell(&self, cx: usize, cy: usize) -> &[f64] {
        let start = (cy * self.cells_x + cx) * self.bins;
        &self.values[start..start + self.bins]
    }
}

pub fn cell_histograms(img: &GrayImage, params: &HogParams) -> Result<CellHistograms> {
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    if w % params.cell_size != 0 || h % params.cell_size != 0 || w == 0 || h == 0 {
        return Err(Error::arg(format!(
            "{w}x{h} image is not divisible into {}-px cells",
            params.cell_size
        )));
    }
    let (cells_x, cells_y) = (w / params.cell_size, h / params.cell_size);
    let bins = params.bins;
    let bin_width = 180.0 / bins as f64;
    let px = img.pixels();
    let at = |x: usize, y: usize| px[y * w + x] as f64;
    let mut values = vec![0.0; cells_x * cells_y * bins];
    for y in 0..h {
        for x in 0..w {
            let gx = at((x + 1).min(w - 1), y) - at(x.saturating_sub(1), y);
            let gy = at(x, (y + 1).min(h - 1)) - at(x, y.saturating_sub(1));
            let mag = (gx * gx + gy * gy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let mut theta = gy.atan2(gx).to_degrees();
            if theta < 0.0 {
                theta += 180.0;
            }
            if theta >= 180.0 {
                theta -= 180.0;
            }
            let pos = theta / bin_width;
            let lower = pos.floor();
            let frac = pos - lower;
            let lo = lower as usize % bins;
            let hi = (lo + 1) % bins;
            let base = ((y / params.cell_size) * cells_x + x / params.cell_size) * bins;
            values[base + lo] += mag * (1.0 - frac);
            values[base + hi] += mag * frac;
        }
    }
    Ok(CellHistograms {
        cells_x,
        cells_y,
        bins,
        values,
    })
}

/// Concatenated L2-normalized blocks, `v / sqrt(|v|^2 + eps^2)`, row-major.
pub fn hog(img: &GrayImage, params: &HogParams) -> Result<HogDescriptor> {
    let cells = cell_histograms(img, params)?;
    let bc = params.block_cells;
    let eps2 = params.epsilon * params.epsilon;
    let mut out = Vec::with_capacity(params.descriptor_len(img.width(), img.height()));
    for by in 0..(cells.cells_y + 1).saturating_sub(bc) {
        for bx in 0..(cells.cells_x + 1).saturating_sub(bc) {
            let start = out.len();
            for cy in by..by + bc {
                for cx in bx..bx + bc {
                    out.extend_from_slice(cells.cell(cx, cy));
                }
            }
            let norm = (out[start..].iter().map(|v| v * v).sum::<f64>() + eps2).sqrt();
            out[start..].iter_mut().for_each(|v| *v /= norm);
        }
    }
    Ok(HogDescriptor(out))
}
