use serde::{Deserialize, Serialize};

use super::Offset;
use crate::raster::{connected_components, overlay, Connectivity, Skeleton};

/// Crossing-over points of two aligned skeletons, in `L`'s frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingPointSet {
    pub offset: Offset,
    /// Rounded centroid of each 8-connected intersection cluster.
    pub points: Vec<(usize, usize)>,
    pub cluster_sizes: Vec<usize>,
}

impl CrossingPointSet {
    pub fn empty(offset: Offset) -> Self {
        Self {
            offset,
            points: Vec::new(),
            cluster_sizes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean_y(&self) -> f64 {
        self.points.iter().map(|&(_, y)| y as f64).sum::<f64>() / self.points.len().max(1) as f64
    }

    /// The points in `R`'s own frame (may fall outside its canvas).
    pub fn points_in_r_frame(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        self.points
            .iter()
            .map(|&(x, y)| (x as isize - self.offset.dx, y as isize - self.offset.dy))
    }
}

/// Intersects `left` with `right` shifted by `offset` and reduces each
/// 8-connected cluster of shared pixels to its rounded centroid. Any cluster
/// above `max_cluster_size` pixels voids the whole offset.
pub fn find_crossing_points(
    left: &Skeleton,
    right: &Skeleton,
    offset: Offset,
    max_cluster_size: usize,
) -> CrossingPointSet {
    let (_, inter) = overlay(left.image(), right.image(), (offset.dx, offset.dy));
    let clusters = connected_components(&inter, Connectivity::Eight);
    if clusters.iter().any(|c| c.len() > max_cluster_size) {
        return CrossingPointSet::empty(offset);
    }
    let (points, cluster_sizes) = clusters
        .iter()
        .map(|c| {
            let (cx, cy) = c.centroid();
            ((cx.round() as usize, cy.round() as usize), c.len())
        })
        .unzip();
    CrossingPointSet {
        offset,
        points,
        cluster_sizes,
    }
}

/// Evaluates every offset of the `step` grid inside `[-radius, radius]^2`,
/// in ascending `(dy, dx)` order, and keeps those with at least `min_points`
/// crossing points.
pub fn sweep_offsets(
    left: &Skeleton,
    right: &Skeleton,
    radius: usize,
    step: usize,
    min_points: usize,
    max_cluster_size: usize,
) -> Vec<CrossingPointSet> {
    let step = step.max(1);
    let r = radius as isize;
    let grid: Vec<isize> = (-r..=r).step_by(step).collect();
    let mut out = Vec::new();
    for &dy in &grid {
        for &dx in &grid {
            let set = find_crossing_points(left, right, Offset::new(dx, dy), max_cluster_size);
            if !set.is_empty() && set.len() >= min_points {
                out.push(set);
            }
        }
    }
    out
}

/// Number of offsets [`sweep_offsets`] evaluates.
pub fn sweep_grid_len(radius: usize, step: usize) -> usize {
    let per_axis = (2 * radius) / step.max(1) + 1;
    per_axis * per_axis
}
