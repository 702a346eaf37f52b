//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use handsynth::dataset::{GrayImage, LabeledSet, Provenance};
use handsynth::raster::BinaryImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain stack flood fill over 8-neighbours. Returns each component as a
/// sorted pixel list, components sorted by their first pixel in (y, x) order.
pub fn flood_fill_components(img: &BinaryImage) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = img.dims();
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) || seen[y * w + x] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![(x, y)];
            seen[y * w + x] = true;
            while let Some((px, py)) = stack.pop() {
                comp.push((px, py));
                for ny in py.saturating_sub(1)..=(py + 1).min(h - 1) {
                    for nx in px.saturating_sub(1)..=(px + 1).min(w - 1) {
                        if img.get(nx, ny) && !seen[ny * w + nx] {
                            seen[ny * w + nx] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            comp.sort_by_key(|&(x, y)| (y, x));
            out.push(comp);
        }
    }
    out.sort_by_key(|c| (c[0].1, c[0].0));
    out
}

pub fn random_binary(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> BinaryImage {
    let mut img = BinaryImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            img.set(x, y, rng.gen_bool(density));
        }
    }
    img
}

/// Union of a few random filled discs and rectangles.
pub fn random_blob(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryImage {
    let mut img = BinaryImage::new(w, h);
    for _ in 0..rng.gen_range(1..=4) {
        let (cx, cy) = (rng.gen_range(0..w) as isize, rng.gen_range(0..h) as isize);
        if rng.gen_bool(0.5) {
            let r = rng.gen_range(1..=6) as isize;
            for y in 0..h as isize {
                for x in 0..w as isize {
                    if (x - cx).pow(2) + (y - cy).pow(2) <= r * r {
                        img.set(x as usize, y as usize, true);
                    }
                }
            }
        } else {
            let (rw, rh) = (rng.gen_range(1..=10), rng.gen_range(1..=10));
            for y in cy..(cy + rh).min(h as isize) {
                for x in cx..(cx + rw).min(w as isize) {
                    img.set(x as usize, y as usize, true);
                }
            }
        }
    }
    img
}

/// Catmull-Rom value at a real position of a row-major grid, borders replicated.
pub fn catmull_rom(values: &[f64], w: usize, h: usize, x: f64, y: f64) -> f64 {
    fn weights(t: f64) -> [f64; 4] {
        let (t2, t3) = (t * t, t * t * t);
        [
            0.5 * (-t3 + 2.0 * t2 - t),
            0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
            0.5 * (-3.0 * t3 + 4.0 * t2 + t),
            0.5 * (t3 - t2),
        ]
    }
    let (x0, y0) = (x.floor(), y.floor());
    let (wx, wy) = (weights(x - x0), weights(y - y0));
    let at = |i: isize, j: isize| {
        let i = i.clamp(0, w as isize - 1) as usize;
        let j = j.clamp(0, h as isize - 1) as usize;
        values[j * w + i]
    };
    let mut acc = 0.0;
    for (m, wym) in wy.iter().enumerate() {
        for (k, wxk) in wx.iter().enumerate() {
            acc += wym * wxk * at(x0 as isize + k as isize - 1, y0 as isize + m as isize - 1);
        }
    }
    acc
}

/// Smooth test image: a sum of Gaussian bumps.
pub fn bumps(w: usize, h: usize, centres: &[(f64, f64, f64)]) -> GrayImage {
    let px = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            let v: f64 = centres
                .iter()
                .map(|&(cx, cy, s)| (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp())
                .sum();
            (200.0 * v).min(255.0).round() as u8
        })
        .collect();
    GrayImage::from_pixels(w, h, px).unwrap()
}

fn stamp(img: &mut GrayImage, x: f64, y: f64) {
    for dy in -1..=1isize {
        for dx in -1..=1isize {
            let (px, py) = (x.round() as isize + dx, y.round() as isize + dy);
            if px >= 0 && py >= 0 && (px as usize) < img.width() && (py as usize) < img.height() {
                img.set(px as usize, py as usize, 255);
            }
        }
    }
}

/// A 28x28 stroke figure through `points`, about 3 px wide.
pub fn polyline(points: &[(f64, f64)]) -> GrayImage {
    let mut img = GrayImage::new(28, 28);
    for seg in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (seg[0], seg[1]);
        let steps = ((x1 - x0).abs().max((y1 - y0).abs()) * 2.0).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            stamp(&mut img, x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        }
    }
    img
}

/// Digit-like stand-ins: each class has a fixed zigzag template, each sample
/// jitters its vertices.
pub fn synthetic_digits(per_class: usize, seed: u64) -> LabeledSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let templates: Vec<Vec<(f64, f64)>> = (0..10)
        .map(|_| {
            (0..rng.gen_range(4..=6))
                .map(|_| (rng.gen_range(6.0..22.0), rng.gen_range(5.0..23.0)))
                .collect()
        })
        .collect();
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..per_class {
        for (label, t) in templates.iter().enumerate() {
            let pts: Vec<(f64, f64)> = t
                .iter()
                .map(|&(x, y)| (x + rng.gen_range(-2.0..2.0), y + rng.gen_range(-2.0..2.0)))
                .collect();
            images.push(polyline(&pts));
            labels.push(label as u8);
        }
    }
    LabeledSet::new(images, labels, Provenance::Seed).unwrap()
}
