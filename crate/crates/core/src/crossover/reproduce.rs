use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CrossingPointSet, Offset, Source, StructureGroup, SynthConfig};
use crate::dataset::GrayImage;
use crate::raster::{binarize, count_components, dilate, thin, BinaryImage, Skeleton};

/// A seed character prepared for crossing-over.
#[derive(Clone, Debug)]
pub struct Parent {
    pub id: usize,
    pub label: u8,
    pub skeleton: Skeleton,
    /// The skeleton dilated like a synthesized sample; its pixel count is the
    /// reference mass for the size band.
    pub dilated: BinaryImage,
}

impl Parent {
    pub fn prepare(id: usize, label: u8, img: &GrayImage, cfg: &SynthConfig) -> Self {
        let skeleton = thin(&binarize(img, cfg.threshold));
        let dilated = dilate(skeleton.image(), cfg.dilate_iters);
        Self {
            id,
            label,
            skeleton,
            dilated,
        }
    }

    pub fn mass(&self) -> usize {
        self.dilated.count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SampleProvenance {
    pub left_id: usize,
    pub right_id: usize,
    pub offset: Offset,
    pub left_structure: usize,
    pub right_structure: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSample {
    pub image: BinaryImage,
    pub label: u8,
    pub provenance: SampleProvenance,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Rejection {
    #[error("structures must come from L and R respectively")]
    WrongSource,
    #[error("both structures have index {0}")]
    SameStructure(usize),
    #[error("parents have different labels {0} and {1}")]
    LabelMismatch(u8, u8),
    #[error("result has {0} components")]
    Disconnected(usize),
    #[error("mass {count} outside [{lo:.1}, {hi:.1}]")]
    MassOutOfBand { count: usize, lo: f64, hi: f64 },
    #[error("result reproduces a parent")]
    CopyOfParent,
    #[error("no offset produced crossing points")]
    NoCrossing,
    #[error("fragmentation left nothing usable")]
    Degenerate,
}

impl Rejection {
    pub fn kind(&self) -> &'static str {
        match self {
            Rejection::WrongSource => "wrong-source",
            Rejection::SameStructure(_) => "same-structure",
            Rejection::LabelMismatch(..) => "label-mismatch",
            Rejection::Disconnected(_) => "disconnected",
            Rejection::MassOutOfBand { .. } => "mass-out-of-band",
            Rejection::CopyOfParent => "copy-of-parent",
            Rejection::NoCrossing => "no-crossing",
            Rejection::Degenerate => "degenerate",
        }
    }
}

/// `left.mask ∪ crossing points ∪ right.mask` (shifted into `L`'s frame), before dilation.
pub fn splice(
    left: &StructureGroup,
    points: &CrossingPointSet,
    right: &StructureGroup,
) -> BinaryImage {
    let (w, h) = left.mask.dims();
    let shifted = right.mask.shifted(points.offset.dx, points.offset.dy);
    let mut out = left.mask.union(&shifted);
    for &(x, y) in &points.points {
        if x < w && y < h {
            out.set(x, y, true);
        }
    }
    out
}

/// Builds one new character from `L`'s structure, the crossing points and
/// `R`'s other structure. The dilated result must be a single 8-connected
/// component whose mass lies in the configured band around the parents'
/// mean mass, and must differ from both parents.
pub fn reproduce(
    left_group: &StructureGroup,
    points: &CrossingPointSet,
    right_group: &StructureGroup,
    left: &Parent,
    right: &Parent,
    cfg: &SynthConfig,
) -> Result<SynthSample, Rejection> {
    if left_group.source != Source::L || right_group.source != Source::R {
        return Err(Rejection::WrongSource);
    }
    if left_group.index == right_group.index {
        return Err(Rejection::SameStructure(left_group.index));
    }
    if left.label != right.label {
        return Err(Rejection::LabelMismatch(left.label, right.label));
    }
    let image = dilate(&splice(left_group, points, right_group), cfg.dilate_iters);
    let components = count_components(&image);
    if components != 1 {
        return Err(Rejection::Disconnected(components));
    }
    let mean = (left.mass() + right.mass()) as f64 / 2.0;
    let (lo, hi) = (cfg.size_band.0 * mean, cfg.size_band.1 * mean);
    let count = image.count();
    if (count as f64) < lo || (count as f64) > hi {
        return Err(Rejection::MassOutOfBand { count, lo, hi });
    }
    let right_aligned = right.dilated.shifted(points.offset.dx, points.offset.dy);
    if image == left.dilated || image == right.dilated || image == right_aligned {
        return Err(Rejection::CopyOfParent);
    }
    Ok(SynthSample {
        image,
        label: left.label,
        provenance: SampleProvenance {
            left_id: left.id,
            right_id: right.id,
            offset: points.offset,
            left_structure: left_group.index,
            right_structure: right_group.index,
        },
    })
}
