//! MNIST-style IDX containers, seed-subset selection and contact sheets.
//!
//! IDX files are big-endian: a 4-byte magic (`0x00000803` for u8 image
//! tensors, `0x00000801` for u8 label vectors), one u32 per dimension, then
//! the raw payload.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const NUM_CLASSES: usize = 10;

/// Intensity used for the grid lines between contact sheet tiles.
pub const SEPARATOR_INTENSITY: u8 = 128;

/// 8-bit grayscale raster, row-major, origin top-left.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::arg(format!(
                "{} pixels supplied for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    MnistTrain,
    MnistTest,
    Synthetic,
    Seed,
}

/// Images with one digit label each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSet {
    images: Vec<GrayImage>,
    labels: Vec<u8>,
    provenance: Provenance,
}

impl LabeledSet {
    pub fn new(images: Vec<GrayImage>, labels: Vec<u8>, provenance: Provenance) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::arg(format!(
                "{} images but {} labels",
                images.len(),
                labels.len()
            )));
        }
        if let Some((index, &value)) = labels
            .iter()
            .enumerate()
            .find(|(_, &l)| l as usize >= NUM_CLASSES)
        {
            return Err(Error::LabelValue { index, value });
        }
        if let Some(first) = images.first() {
            let (w, h) = (first.width, first.height);
            if images.iter().any(|im| im.width != w || im.height != h) {
                return Err(Error::arg("images in a set must share dimensions"));
            }
        }
        Ok(Self {
            images,
            labels,
            provenance,
        })
    }

    pub fn empty(provenance: Provenance) -> Self {
        Self {
            images: Vec::new(),
            labels: Vec::new(),
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[GrayImage] {
        &self.images
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GrayImage, u8)> {
        self.images.iter().zip(self.labels.iter().copied())
    }

    /// Image dimensions, or `None` for an empty set.
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.images.first().map(|im| (im.width, im.height))
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut counts = [0; NUM_CLASSES];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledSet {
        LabeledSet {
            images: indices.iter().map(|&i| self.images[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            provenance: self.provenance,
        }
    }

    pub fn into_parts(self) -> (Vec<GrayImage>, Vec<u8>) {
        (self.images, self.labels)
    }
}

fn be_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(Error::Length {
            expected: at + 4,
            actual: bytes.len(),
        })
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<()> {
    let found = be_u32(bytes, 0)?;
    if found != expected {
        return Err(Error::BadMagic { expected, found });
    }
    Ok(())
}

/// Decodes an IDX image tensor (magic `0x00000803`).
pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<GrayImage>> {
    check_magic(bytes, IMAGE_MAGIC)?;
    let items = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    let per_image = rows * cols;
    let expected = 16 + items * per_image;
    if bytes.len() != expected {
        return Err(Error::Length {
            expected,
            actual: bytes.len(),
        });
    }
    let payload = &bytes[16..];
    Ok((0..items)
        .map(|i| GrayImage {
            width: cols,
            height: rows,
            pixels: payload[i * per_image..(i + 1) * per_image].to_vec(),
        })
        .collect())
}

/// Decodes an IDX label vector (magic `0x00000801`); every label must be 0..=9.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    check_magic(bytes, LABEL_MAGIC)?;
    let items = be_u32(bytes, 4)? as usize;
    let expected = 8 + items;
    if bytes.len() != expected {
        return Err(Error::Length {
            expected,
            actual: bytes.len(),
        });
    }
    let labels = bytes[8..].to_vec();
    if let Some((index, &value)) = labels
        .iter()
        .enumerate()
        .find(|(_, &l)| l as usize >= NUM_CLASSES)
    {
        return Err(Error::LabelValue { index, value });
    }
    Ok(labels)
}

pub fn read_idx_images<R: Read>(mut reader: R) -> Result<Vec<GrayImage>> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<stream>", e))?;
    parse_idx_images(&bytes)
}

pub fn read_idx_labels<R: Read>(mut reader: R) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<stream>", e))?;
    parse_idx_labels(&bytes)
}

/// Loads an image/label IDX pair from disk.
pub fn load_idx(
    image_path: impl AsRef<Path>,
    label_path: impl AsRef<Path>,
    provenance: Provenance,
) -> Result<LabeledSet> {
    let image_path = image_path.as_ref();
    let label_path = label_path.as_ref();
    let img_bytes = fs::read(image_path).map_err(|e| Error::io(image_path, e))?;
    let lbl_bytes = fs::read(label_path).map_err(|e| Error::io(label_path, e))?;
    let images = parse_idx_images(&img_bytes)?;
    let labels = parse_idx_labels(&lbl_bytes)?;
    LabeledSet::new(images, labels, provenance)
}

pub fn encode_idx_images(set: &LabeledSet) -> Vec<u8> {
    let (w, h) = set.dims().unwrap_or((0, 0));
    let mut out = Vec::with_capacity(16 + set.len() * w * h);
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(set.len() as u32).to_be_bytes());
    out.extend_from_slice(&(h as u32).to_be_bytes());
    out.extend_from_slice(&(w as u32).to_be_bytes());
    for im in &set.images {
        out.extend_from_slice(&im.pixels);
    }
    out
}

pub fn encode_idx_labels(set: &LabeledSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + set.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(set.len() as u32).to_be_bytes());
    out.extend_from_slice(&set.labels);
    out
}

/// Writes `set` as an image file and a label file. An empty set has no
/// dimensions, so its image header declares 0 rows and 0 columns.
pub fn write_idx(
    set: &LabeledSet,
    image_path: impl AsRef<Path>,
    label_path: impl AsRef<Path>,
) -> Result<()> {
    write_bytes(image_path.as_ref(), &encode_idx_images(set))?;
    write_bytes(label_path.as_ref(), &encode_idx_labels(set))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Per-class sample counts for a stratified draw of `n` items: classes are
/// filled round-robin in index order, so quotas differ by at most one unless
/// a class runs out of samples.
pub fn stratified_quotas(available: &[usize; NUM_CLASSES], n: usize) -> [usize; NUM_CLASSES] {
    let mut quotas = [0; NUM_CLASSES];
    let mut remaining = n;
    while remaining > 0 {
        let mut progressed = false;
        for c in 0..NUM_CLASSES {
            if remaining == 0 {
                break;
            }
            if quotas[c] < available[c] {
                quotas[c] += 1;
                remaining -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    quotas
}

/// Draws `n` samples without replacement, stratified by class. The result
/// keeps the source order of the chosen samples and has provenance `Seed`.
pub fn select_seed(set: &LabeledSet, n: usize, rng_seed: u64) -> Result<LabeledSet> {
    if n > set.len() {
        return Err(Error::arg(format!(
            "cannot select {n} samples from a set of {}",
            set.len()
        )));
    }
    let quotas = stratified_quotas(&set.class_counts(), n);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut chosen = Vec::with_capacity(n);
    for (class, &quota) in quotas.iter().enumerate() {
        let mut members: Vec<usize> = (0..set.len())
            .filter(|&i| set.labels[i] as usize == class)
            .collect();
        members.shuffle(&mut rng);
        chosen.extend_from_slice(&members[..quota]);
    }
    chosen.sort_unstable();
    Ok(set.subset(&chosen).with_provenance(Provenance::Seed))
}

/// Layout of a contact sheet: `(cols, rows, width, height)` in pixels.
pub fn contact_sheet_layout(
    count: usize,
    tile: (usize, usize),
    grid_cols: usize,
) -> (usize, usize, usize, usize) {
    let cols = grid_cols.max(1).min(count.max(1));
    let rows = count.div_ceil(cols).max(1);
    let width = cols * tile.0 + (cols - 1);
    let height = rows * tile.1 + (rows - 1);
    (cols, rows, width, height)
}

/// Renders the set as a grid of tiles, left-to-right then top-to-bottom,
/// separated by 1-px lines.
pub fn render_contact_sheet(set: &LabeledSet, grid_cols: usize) -> Result<GrayImage> {
    let (tw, th) = set
        .dims()
        .ok_or_else(|| Error::arg("contact sheet of an empty set"))?;
    let (cols, _rows, width, height) = contact_sheet_layout(set.len(), (tw, th), grid_cols);
    let mut sheet = GrayImage::new(width, height);
    for y in 0..height {
        for x in 0..width {
            if x % (tw + 1) == tw || y % (th + 1) == th {
                sheet.set(x, y, SEPARATOR_INTENSITY);
            }
        }
    }
    for (i, im) in set.images.iter().enumerate() {
        let ox = (i % cols) * (tw + 1);
        let oy = (i / cols) * (th + 1);
        for y in 0..th {
            for x in 0..tw {
                sheet.set(ox + x, oy + y, im.get(x, y));
            }
        }
    }
    Ok(sheet)
}

pub fn write_png(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let buf = image::GrayImage::from_raw(img.width as u32, img.height as u32, img.pixels.clone())
        .expect("buffer matches dimensions");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

pub fn write_contact_sheet(set: &LabeledSet, path: impl AsRef<Path>, grid_cols: usize) -> Result<()> {
    let sheet = render_contact_sheet(set, grid_cols)?;
    write_png(&sheet, path)
}
