//! Tangent-vector distortion: eight first-order image transformations
//! (scaling, rotation, x/y translation, two hyperbolic shears, thickness and
//! modified thickness) combined linearly to produce distorted variants.
//!
//! Fields are computed on a Gaussian-smoothed copy of the image using central
//! differences with clamped indices, and with coordinates `(u, v)` centered on
//! the image midpoint. A geometric field `T` describes the resampling
//! `I'(p) = I(p + alpha * d(p))`, so e.g. the x-translation field samples
//! `I(x + alpha, y)`.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{GrayImage, LabeledSet, Provenance};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TangentKind {
    Scaling,
    Rotation,
    XTranslation,
    YTranslation,
    ParallelHyperbolic,
    DiagonalHyperbolic,
    Thickness,
    ModifiedThickness,
}

impl TangentKind {
    pub const ALL: [TangentKind; 8] = [
        TangentKind::Scaling,
        TangentKind::Rotation,
        TangentKind::XTranslation,
        TangentKind::YTranslation,
        TangentKind::ParallelHyperbolic,
        TangentKind::DiagonalHyperbolic,
        TangentKind::Thickness,
        TangentKind::ModifiedThickness,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentField {
    pub kind: TangentKind,
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

/// One multiplier per [`TangentKind`], indexed by [`TangentKind::index`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TangentCoefficients(pub [f64; 8]);

impl TangentCoefficients {
    pub fn single(kind: TangentKind, alpha: f64) -> Self {
        let mut a = [0.0; 8];
        a[kind.index()] = alpha;
        Self(a)
    }

    pub fn within(&self, limits: &AlphaMax) -> bool {
        let lim = limits.as_array();
        self.0.iter().zip(lim).all(|(a, m)| a.abs() <= m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct AlphaMax {
    pub scaling: f64,
    pub rotation: f64,
    pub x_translation: f64,
    pub y_translation: f64,
    pub parallel_hyperbolic: f64,
    pub diagonal_hyperbolic: f64,
    pub thickness: f64,
    pub modified_thickness: f64,
}

impl Default for AlphaMax {
    fn default() -> Self {
        Self {
            scaling: 0.5,
            rotation: 0.5,
            x_translation: 0.5,
            y_translation: 0.5,
            parallel_hyperbolic: 0.5,
            diagonal_hyperbolic: 0.5,
            thickness: 5.0,
            modified_thickness: 5.0,
        }
    }
}

impl AlphaMax {
    pub fn as_array(&self) -> [f64; 8] {
        [
            self.scaling,
            self.rotation,
            self.x_translation,
            self.y_translation,
            self.parallel_hyperbolic,
            self.diagonal_hyperbolic,
            self.thickness,
            self.modified_thickness,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct TangentConfig {
    pub smoothing_sigma: f64,
    pub alpha_max: AlphaMax,
}

impl Default for TangentConfig {
    fn default() -> Self {
        Self {
            smoothing_sigma: 1.0,
            alpha_max: AlphaMax::default(),
        }
    }
}

impl TangentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.smoothing_sigma > 0.0 && self.smoothing_sigma.is_finite()) {
            return Err(Error::Config("smoothing-sigma must be > 0".into()));
        }
        if self
            .alpha_max
            .as_array()
            .iter()
            .any(|a| !(a.is_finite() && *a >= 0.0))
        {
            return Err(Error::Config("alpha-max values must be finite and >= 0".into()));
        }
        Ok(())
    }
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable Gaussian blur with replicated borders.
pub fn gaussian_smooth(img: &GrayImage, sigma: f64) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;
    let src: Vec<f64> = img.pixels().iter().map(|&v| v as f64).collect();
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, kv)| kv * src[y * w + clamp(x as isize + k as isize - r, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, kv)| kv * tmp[clamp(y as isize + k as isize - r, h) * w + x])
                .sum();
        }
    }
    out
}

/// Central differences `(I[i+1] - I[i-1]) / 2` with indices clamped to the canvas.
pub fn central_gradients(values: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let (xl, xr) = (x.saturating_sub(1), (x + 1).min(w - 1));
            let (yu, yd) = (y.saturating_sub(1), (y + 1).min(h - 1));
            gx[y * w + x] = (values[y * w + xr] - values[y * w + xl]) / 2.0;
            gy[y * w + x] = (values[yd * w + x] - values[yu * w + x]) / 2.0;
        }
    }
    (gx, gy)
}

/// The eight tangent fields of an already smoothed image.
pub fn tangent_fields_from_smoothed(smoothed: &[f64], w: usize, h: usize) -> [TangentField; 8] {
    let (gx, gy) = central_gradients(smoothed, w, h);
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    TangentKind::ALL.map(|kind| {
        let values = (0..w * h)
            .map(|i| {
                let (u, v) = ((i % w) as f64 - cx, (i / w) as f64 - cy);
                let (gx, gy) = (gx[i], gy[i]);
                match kind {
                    TangentKind::XTranslation => gx,
                    TangentKind::YTranslation => gy,
                    TangentKind::Rotation => v * gx - u * gy,
                    TangentKind::Scaling => u * gx + v * gy,
                    TangentKind::ParallelHyperbolic => u * gx - v * gy,
                    TangentKind::DiagonalHyperbolic => v * gx + u * gy,
                    // squared magnitude in [0, 1] intensity units, rescaled to 0..255
                    TangentKind::Thickness => (gx * gx + gy * gy) / 255.0,
                    TangentKind::ModifiedThickness => (gx * gx + gy * gy).sqrt(),
                }
            })
            .collect();
        TangentField {
            kind,
            width: w,
            height: h,
            values,
        }
    })
}

pub fn tangent_fields(img: &GrayImage, smoothing_sigma: f64) -> Result<[TangentField; 8]> {
    if !(smoothing_sigma > 0.0 && smoothing_sigma.is_finite()) {
        return Err(Error::arg(format!("smoothing sigma {smoothing_sigma} must be > 0")));
    }
    let smoothed = gaussian_smooth(img, smoothing_sigma);
    Ok(tangent_fields_from_smoothed(&smoothed, img.width(), img.height()))
}

/// `base + sum_k alpha_k * field_k`, unclamped.
pub fn apply_tangents_real(
    base: &[f64],
    coeffs: &TangentCoefficients,
    fields: &[TangentField; 8],
) -> Vec<f64> {
    let mut out = base.to_vec();
    for (alpha, field) in coeffs.0.iter().zip(fields) {
        if *alpha == 0.0 {
            continue;
        }
        for (o, f) in out.iter_mut().zip(&field.values) {
            *o += alpha * f;
        }
    }
    out
}

/// Distorted image, clamped to `[0, 255]` and rounded.
pub fn apply_tangents(
    img: &GrayImage,
    coeffs: &TangentCoefficients,
    fields: &[TangentField; 8],
) -> GrayImage {
    let base: Vec<f64> = img.pixels().iter().map(|&v| v as f64).collect();
    let px = apply_tangents_real(&base, coeffs, fields)
        .into_iter()
        .map(|v| v.clamp(0.0, 255.0).round() as u8)
        .collect();
    GrayImage::from_pixels(img.width(), img.height(), px).expect("dims match")
}

/// Draws `target` variants: a uniformly chosen seed image distorted by
/// independent `Uniform(-max, max)` coefficients.
pub fn sample_tangent_dataset(
    seed: &LabeledSet,
    target: usize,
    cfg: &TangentConfig,
    rng_seed: u64,
) -> Result<LabeledSet> {
    cfg.validate()?;
    if target == 0 {
        return Ok(LabeledSet::empty(Provenance::Synthetic));
    }
    if seed.is_empty() {
        return Err(Error::arg("tangent augmentation needs a nonempty seed set"));
    }
    let fields: Vec<[TangentField; 8]> = seed
        .images()
        .par_iter()
        .map(|im| tangent_fields(im, cfg.smoothing_sigma))
        .collect::<Result<_>>()?;

    let limits = cfg.alpha_max.as_array();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let pick = Uniform::new(0, seed.len());
    let draws: Vec<(usize, TangentCoefficients)> = (0..target)
        .map(|_| {
            let i = pick.sample(&mut rng);
            let alphas = limits.map(|m| if m > 0.0 { rng_uniform(&mut rng, m) } else { 0.0 });
            (i, TangentCoefficients(alphas))
        })
        .collect();
    let images: Vec<GrayImage> = draws
        .par_iter()
        .map(|(i, c)| apply_tangents(&seed.images()[*i], c, &fields[*i]))
        .collect();
    let labels = draws.iter().map(|(i, _)| seed.labels()[*i]).collect();
    LabeledSet::new(images, labels, Provenance::Synthetic)
}

fn rng_uniform(rng: &mut ChaCha8Rng, max: f64) -> f64 {
    Uniform::new_inclusive(-max, max).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(w: usize, h: usize, cx: f64, cy: f64, s: f64) -> GrayImage {
        let px = (0..w * h)
            .map(|i| {
                let (x, y) = ((i % w) as f64 - cx, (i / w) as f64 - cy);
                (255.0 * (-(x * x + y * y) / (2.0 * s * s)).exp()).round() as u8
            })
            .collect();
        GrayImage::from_pixels(w, h, px).unwrap()
    }

    #[test]
    fn constant_image_has_zero_fields() {
        let img = GrayImage::from_pixels(8, 8, vec![77; 64]).unwrap();
        for f in tangent_fields(&img, 1.0).unwrap() {
            assert!(f.values.iter().all(|v| v.abs() < 1e-9), "{:?}", f.kind);
        }
    }

    #[test]
    fn centered_radial_blob_has_no_rotation_tangent() {
        let img = blob(29, 29, 14.0, 14.0, 4.0);
        let fields = tangent_fields(&img, 1.0).unwrap();
        let rot = &fields[TangentKind::Rotation.index()];
        let peak = fields[TangentKind::Scaling.index()]
            .values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let worst = rot.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 0.05 * peak, "rotation residue {worst} vs scaling peak {peak}");
    }

    #[test]
    fn zero_coefficients_are_identity() {
        let img = blob(28, 28, 10.0, 16.0, 3.0);
        let fields = tangent_fields(&img, 1.0).unwrap();
        assert_eq!(apply_tangents(&img, &TangentCoefficients::default(), &fields), img);
    }

    #[test]
    fn bad_sigma_rejected() {
        let img = GrayImage::new(4, 4);
        assert!(tangent_fields(&img, 0.0).is_err());
        assert!(tangent_fields(&img, -1.0).is_err());
    }

    #[test]
    fn limits_check() {
        let c = TangentCoefficients::single(TangentKind::Thickness, 4.0);
        assert!(c.within(&AlphaMax::default()));
        let c = TangentCoefficients::single(TangentKind::Rotation, 0.6);
        assert!(!c.within(&AlphaMax::default()));
    }
}
