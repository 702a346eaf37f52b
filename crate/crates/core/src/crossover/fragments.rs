use thiserror::Error;

use super::{CrossingPointSet, Source};
use crate::raster::{connected_components, BinaryImage, Connectivity, PixelSet, Skeleton};

/// A connected piece of one skeleton left after erasing the crossing points.
/// Pixels and centroid are in the owning character's own frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Fragment {
    pub pixels: PixelSet,
    pub source: Source,
    pub centroid: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureGroup {
    pub fragments: Vec<Fragment>,
    pub source: Source,
    /// 0 for the structure above the crossing span, 1 for the one below.
    pub index: usize,
    /// Union of member pixels, in the owning character's frame.
    pub mask: BinaryImage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("no fragment of {character:?} survives erasing the crossing points")]
pub struct DegeneratePair {
    pub character: Source,
}

/// Disk of radius `r` around `(cx, cy)`, clipped to the canvas.
fn erase_disk(img: &mut BinaryImage, cx: isize, cy: isize, r: usize) {
    let r = r as isize;
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy > r * r {
                continue;
            }
            let (x, y) = (cx + dx, cy + dy);
            if x >= 0 && y >= 0 && (x as usize) < img.width() && (y as usize) < img.height() {
                img.set(x as usize, y as usize, false);
            }
        }
    }
}

/// Cuts `skel` at the crossing points. For `Source::R` the points are first
/// moved back into `R`'s frame. Components under `min_size` pixels are
/// dropped; survivors are ordered by their smallest `(y, x)` pixel.
pub fn fragment(
    skel: &Skeleton,
    points: &CrossingPointSet,
    source: Source,
    erase_radius: usize,
    min_size: usize,
) -> Result<Vec<Fragment>, DegeneratePair> {
    let mut img = skel.image().clone();
    match source {
        Source::L => {
            for &(x, y) in &points.points {
                erase_disk(&mut img, x as isize, y as isize, erase_radius);
            }
        }
        Source::R => {
            for (x, y) in points.points_in_r_frame() {
                erase_disk(&mut img, x, y, erase_radius);
            }
        }
    }
    let frags: Vec<Fragment> = connected_components(&img, Connectivity::Eight)
        .into_iter()
        .filter(|c| c.len() >= min_size)
        .map(|pixels| Fragment {
            centroid: pixels.centroid(),
            pixels,
            source,
        })
        .collect();
    if frags.is_empty() {
        return Err(DegeneratePair { character: source });
    }
    Ok(frags)
}

fn group_one(
    frags: &[Fragment],
    split_y: f64,
    shift_y: f64,
    source: Source,
    canvas: (usize, usize),
) -> Vec<StructureGroup> {
    let mut sides: [Vec<Fragment>; 2] = [Vec::new(), Vec::new()];
    for f in frags {
        let side = usize::from(f.centroid.1 + shift_y >= split_y);
        sides[side].push(f.clone());
    }
    sides
        .into_iter()
        .enumerate()
        .filter(|(_, members)| !members.is_empty())
        .map(|(index, fragments)| {
            let mask = BinaryImage::from_points(
                canvas.0,
                canvas.1,
                fragments.iter().flat_map(|f| f.pixels.points().iter().copied()),
            );
            StructureGroup {
                fragments,
                source,
                index,
                mask,
            }
        })
        .collect()
}

/// Merges each character's fragments into structures split at the mean
/// crossing-point row: centroids above it form structure 0, the rest
/// structure 1. `R`'s centroids are compared in `L`'s frame. A character whose
/// fragments all fall on one side yields only that side's structure.
pub fn group_structures(
    frags_l: &[Fragment],
    frags_r: &[Fragment],
    points: &CrossingPointSet,
    canvas: (usize, usize),
) -> (Vec<StructureGroup>, Vec<StructureGroup>) {
    let split = points.mean_y();
    (
        group_one(frags_l, split, 0.0, Source::L, canvas),
        group_one(frags_r, split, points.offset.dy as f64, Source::R, canvas),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossover::Offset;

    fn skel(img: BinaryImage) -> Skeleton {
        Skeleton::try_from_image(img).expect("already thin")
    }

    fn at(points: &[(usize, usize)], offset: Offset) -> CrossingPointSet {
        CrossingPointSet {
            offset,
            points: points.to_vec(),
            cluster_sizes: vec![1; points.len()],
        }
    }

    fn frag_at(y: f64) -> Fragment {
        Fragment {
            pixels: PixelSet::new(vec![(1, y as usize)]),
            source: Source::L,
            centroid: (1.0, y),
        }
    }

    #[test]
    fn line_cut_once_gives_two() {
        let line = skel(BinaryImage::from_points(15, 5, (1..14).map(|x| (x, 2))));
        let frags = fragment(&line, &at(&[(7, 2)], Offset::ZERO), Source::L, 1, 3).unwrap();
        assert_eq!(frags.len(), 2);
        assert_eq!(frags[0].pixels.len(), 5);
        assert_eq!(frags[1].pixels.len(), 5);
        assert!(frags[0].centroid.0 < frags[1].centroid.0);
    }

    #[test]
    fn plus_cut_at_centre_gives_four() {
        let mut plus = BinaryImage::new(13, 13);
        for i in 1..12 {
            plus.set(i, 6, true);
            plus.set(6, i, true);
        }
        let plus = skel(plus);
        let frags = fragment(&plus, &at(&[(6, 6)], Offset::ZERO), Source::L, 1, 3).unwrap();
        assert_eq!(frags.len(), 4);
        let firsts: Vec<_> = frags.iter().map(|f| f.pixels.first().unwrap()).collect();
        assert_eq!(firsts, vec![(6, 1), (1, 6), (8, 6), (6, 8)]);
    }

    #[test]
    fn r_points_are_back_translated() {
        let line = skel(BinaryImage::from_points(15, 5, (1..14).map(|x| (x, 2))));
        // crossing at (9, 2) in L's frame is (7, 2) in R's frame for offset (2, 0)
        let pts = at(&[(9, 2)], Offset::new(2, 0));
        let frags = fragment(&line, &pts, Source::R, 1, 3).unwrap();
        assert_eq!(frags.len(), 2);
        assert_eq!(frags[0].pixels.len(), 5);
        assert!(frags.iter().all(|f| f.source == Source::R));
    }

    #[test]
    fn tiny_remainders_are_degenerate() {
        let stub = skel(BinaryImage::from_points(9, 3, (3..6).map(|x| (x, 1))));
        let err = fragment(&stub, &at(&[(4, 1)], Offset::ZERO), Source::L, 1, 3).unwrap_err();
        assert_eq!(err.character, Source::L);
    }

    #[test]
    fn grouping_by_mean_crossing_row() {
        let frags = vec![frag_at(3.0), frag_at(10.0), frag_at(24.0)];
        let pts = at(&[(5, 12), (9, 16)], Offset::ZERO);
        assert_eq!(pts.mean_y(), 14.0);
        let (l, _) = group_structures(&frags, &[], &pts, (28, 28));
        assert_eq!(l.len(), 2);
        assert_eq!(l[0].index, 0);
        let ys: Vec<f64> = l[0].fragments.iter().map(|f| f.centroid.1).collect();
        assert_eq!(ys, vec![3.0, 10.0]);
        assert_eq!(l[1].index, 1);
        assert_eq!(l[1].fragments[0].centroid.1, 24.0);
        assert_eq!(l[0].mask.count(), 2);
    }

    #[test]
    fn one_fragment_each_gives_one_structure_each() {
        let pts = at(&[(5, 10)], Offset::new(0, 3));
        let fl = vec![frag_at(4.0)];
        let fr = vec![Fragment {
            source: Source::R,
            ..frag_at(9.0)
        }];
        let (l, r) = group_structures(&fl, &fr, &pts, (28, 28));
        assert_eq!((l.len(), r.len()), (1, 1));
        assert_eq!(l[0].index, 0);
        // 9 + dy 3 = 12 lies below the split row 10
        assert_eq!(r[0].index, 1);
    }
}
