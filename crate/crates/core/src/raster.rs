//! Binary raster primitives: thresholding, Zhang-Suen thinning, 3x3 dilation,
//! shifted overlays and connected-component labelling.
//!
//! All morphology clips at the canvas edge; pixels outside the canvas are
//! background.

use std::collections::VecDeque;

use crate::dataset::GrayImage;

pub const DEFAULT_THRESHOLD: u8 = 128;

/// Foreground mask, row-major, origin top-left.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    mask: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            mask: vec![false; width * height],
        }
    }

    /// Builds a mask from `(x, y)` coordinates; out-of-canvas points are ignored.
    pub fn from_points<I>(width: usize, height: usize, points: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut img = Self::new(width, height);
        for (x, y) in points {
            if x < width && y < height {
                img.set(x, y, true);
            }
        }
        img
    }

    /// Parses rows of `#`/`1` (foreground) and `.`/`0` (background).
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut img = Self::new(width, height);
        for (y, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), width, "ragged ascii raster");
            for (x, c) in row.chars().enumerate() {
                img.set(x, y, c == '#' || c == '1');
            }
        }
        img
    }

    pub fn to_ascii(&self) -> Vec<String> {
        (0..self.height)
            .map(|y| {
                (0..self.width)
                    .map(|x| if self.get(x, y) { '#' } else { '.' })
                    .collect()
            })
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    /// Signed lookup; anything off-canvas reads as background.
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.mask[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.mask[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    /// Foreground coordinates in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % self.width, i / self.width))
    }

    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.dims() == other.dims() && self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &BinaryImage) -> BinaryImage {
        assert_eq!(self.dims(), other.dims());
        BinaryImage {
            width: self.width,
            height: self.height,
            mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| a || b).collect(),
        }
    }

    /// Translates by `(dx, dy)`, discarding pixels that leave the canvas.
    pub fn shifted(&self, dx: isize, dy: isize) -> BinaryImage {
        let mut out = BinaryImage::new(self.width, self.height);
        for (x, y) in self.foreground() {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            if nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height {
                out.set(nx as usize, ny as usize, true);
            }
        }
        out
    }

    /// Foreground as intensity 255 on a 0 background.
    pub fn to_gray(&self) -> GrayImage {
        let px = self.mask.iter().map(|&b| if b { 255 } else { 0 }).collect();
        GrayImage::from_pixels(self.width, self.height, px).expect("dims match")
    }
}

/// Output of [`thin`]: a mask on which one more thinning pass deletes nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Skeleton(BinaryImage);

impl Skeleton {
    /// Accepts `img` only if it is already a thinning fixpoint.
    pub fn try_from_image(img: BinaryImage) -> Option<Skeleton> {
        let mut probe = img.clone();
        if zhang_suen_pass(&mut probe) == 0 {
            Some(Skeleton(img))
        } else {
            None
        }
    }

    pub fn image(&self) -> &BinaryImage {
        &self.0
    }

    pub fn into_image(self) -> BinaryImage {
        self.0
    }
}

/// Ordered `(x, y)` coordinates, sorted by `(y, x)`, no duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PixelSet(Vec<(usize, usize)>);

impl PixelSet {
    pub fn new(mut points: Vec<(usize, usize)>) -> Self {
        points.sort_unstable_by_key(|&(x, y)| (y, x));
        points.dedup();
        PixelSet(points)
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Smallest member in `(y, x)` order.
    pub fn first(&self) -> Option<(usize, usize)> {
        self.0.first().copied()
    }

    pub fn centroid(&self) -> (f64, f64) {
        let n = self.0.len().max(1) as f64;
        let (sx, sy) = self
            .0
            .iter()
            .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x as f64, sy + y as f64));
        (sx / n, sy / n)
    }

    pub fn to_image(&self, width: usize, height: usize) -> BinaryImage {
        BinaryImage::from_points(width, height, self.0.iter().copied())
    }
}

/// Foreground where `intensity >= threshold`.
pub fn binarize(img: &GrayImage, threshold: u8) -> BinaryImage {
    BinaryImage {
        width: img.width(),
        height: img.height(),
        mask: img.pixels().iter().map(|&v| v >= threshold).collect(),
    }
}

// P2..P9 of the Zhang-Suen neighbourhood: N, NE, E, SE, S, SW, W, NW.
const RING: [(isize, isize); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

fn ring(img: &BinaryImage, x: usize, y: usize) -> [bool; 8] {
    let (x, y) = (x as isize, y as isize);
    RING.map(|(dx, dy)| img.get_signed(x + dx, y + dy))
}

/// (A, B): 0->1 transitions around the ring and foreground neighbour count.
fn transitions_and_count(n: &[bool; 8]) -> (usize, usize) {
    let a = (0..8).filter(|&i| !n[i] && n[(i + 1) % 8]).count();
    let b = n.iter().filter(|&&v| v).count();
    (a, b)
}

/// Zhang-Suen deletion test with the Lu-Wang bound `3 <= B`, which keeps
/// 2-px diagonal strokes from being eaten away from their ends.
fn deletable(n: &[bool; 8], first: bool) -> bool {
    let (a, b) = transitions_and_count(n);
    if a != 1 || !(3..=6).contains(&b) {
        return false;
    }
    let [p2, _, p4, _, p6, _, p8, _] = *n;
    if first {
        !(p2 && p4 && p6) && !(p4 && p6 && p8)
    } else {
        !(p2 && p4 && p8) && !(p2 && p6 && p8)
    }
}

/// One subiteration. Candidates are chosen on a snapshot and deleted in
/// parallel, as in the textbook rules, except inside a component that the
/// parallel step would erase or split (2x2 blocks, some 2-px diagonals).
/// There the candidates are deleted one at a time in raster order, each only
/// while it still has a single run of neighbours (A == 1) and is not an end
/// point (B >= 2), so the component survives in one piece.
fn zhang_suen_subiteration(img: &mut BinaryImage, first: bool) -> usize {
    let candidates: Vec<(usize, usize)> = img
        .foreground()
        .filter(|&(x, y)| deletable(&ring(img, x, y), first))
        .collect();
    if candidates.is_empty() {
        return 0;
    }
    let w = img.width;
    let mut label = vec![usize::MAX; img.mask.len()];
    let before = connected_components(img, Connectivity::Eight);
    for (k, c) in before.iter().enumerate() {
        for &(x, y) in c.points() {
            label[y * w + x] = k;
        }
    }
    let mut after = img.clone();
    for &(x, y) in &candidates {
        after.set(x, y, false);
    }
    let mut pieces = vec![0usize; before.len()];
    for c in connected_components(&after, Connectivity::Eight) {
        let (x, y) = c.points()[0];
        pieces[label[y * w + x]] += 1;
    }
    let mut removed = 0;
    let mut careful = Vec::new();
    for &(x, y) in &candidates {
        if pieces[label[y * w + x]] == 1 {
            img.set(x, y, false);
            removed += 1;
        } else {
            careful.push((x, y));
        }
    }
    for (x, y) in careful {
        let (a, b) = transitions_and_count(&ring(img, x, y));
        if a == 1 && b >= 2 {
            img.set(x, y, false);
            removed += 1;
        }
    }
    removed
}

fn zhang_suen_pass(img: &mut BinaryImage) -> usize {
    zhang_suen_subiteration(img, true) + zhang_suen_subiteration(img, false)
}

/// Zhang-Suen thinning, iterated to a fixpoint.
pub fn thin(img: &BinaryImage) -> Skeleton {
    let mut out = img.clone();
    while zhang_suen_pass(&mut out) > 0 {}
    Skeleton(out)
}

/// Grows the foreground by a 3x3 square, `iterations` times.
pub fn dilate(img: &BinaryImage, iterations: usize) -> BinaryImage {
    let mut cur = img.clone();
    for _ in 0..iterations {
        let mut next = cur.clone();
        for (x, y) in cur.foreground() {
            let x0 = x.saturating_sub(1);
            let y0 = y.saturating_sub(1);
            let x1 = (x + 1).min(cur.width - 1);
            let y1 = (y + 1).min(cur.height - 1);
            for ny in y0..=y1 {
                for nx in x0..=x1 {
                    next.set(nx, ny, true);
                }
            }
        }
        cur = next;
    }
    cur
}

/// Overlays `other`, shifted by `offset`, onto `base`. Returns
/// `(union, intersection)` in `base`'s frame.
pub fn overlay(
    base: &BinaryImage,
    other: &BinaryImage,
    offset: (isize, isize),
) -> (BinaryImage, BinaryImage) {
    let mut union = base.clone();
    let mut inter = BinaryImage::new(base.width, base.height);
    for (x, y) in other.foreground() {
        let (nx, ny) = (x as isize + offset.0, y as isize + offset.1);
        if nx < 0 || ny < 0 || nx as usize >= base.width || ny as usize >= base.height {
            continue;
        }
        let (nx, ny) = (nx as usize, ny as usize);
        if base.get(nx, ny) {
            inter.set(nx, ny, true);
        }
        union.set(nx, ny, true);
    }
    (union, inter)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(0, -1), (1, 0), (0, 1), (-1, 0)],
            Connectivity::Eight => &RING,
        }
    }
}

/// Maximal connected foreground sets, ordered by their smallest `(y, x)` member.
pub fn connected_components(img: &BinaryImage, connectivity: Connectivity) -> Vec<PixelSet> {
    let mut seen = vec![false; img.mask.len()];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..img.mask.len() {
        if !img.mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % img.width) as isize, (i / img.width) as isize);
            members.push((x as usize, y as usize));
            for &(dx, dy) in connectivity.offsets() {
                if img.get_signed(x + dx, y + dy) {
                    let j = (y + dy) as usize * img.width + (x + dx) as usize;
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        components.push(PixelSet::new(members));
    }
    components
}

pub fn count_components(img: &BinaryImage) -> usize {
    connected_components(img, Connectivity::Eight).len()
}
