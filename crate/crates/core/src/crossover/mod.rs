//! Structural crossing-over: recombines the skeletons of two same-class
//! characters at the points where they intersect.
//!
//! The pipeline per pair `(L, R)`:
//!
//! 1. binarize and thin both characters ([`Parent::prepare`]);
//! 2. slide `R` over `L` on an offset grid and collect the clustered
//!    intersection points at each offset ([`sweep_offsets`]);
//! 3. cut each skeleton at those points ([`fragment`]);
//! 4. merge each character's fragments into an upper and a lower structure
//!    ([`group_structures`]);
//! 5. splice `L`'s structure, the crossing points and `R`'s other structure,
//!    dilate, and keep the result only if it still looks like one character
//!    ([`reproduce`]).
//!
//! [`synthesize_dataset`] drives this over random same-class pairs.

mod fragments;
mod points;
mod reproduce;
mod synth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fragments::{fragment, group_structures, DegeneratePair, Fragment, StructureGroup};
pub use points::{find_crossing_points, sweep_grid_len, sweep_offsets, CrossingPointSet};
pub use reproduce::{reproduce, splice, Parent, Rejection, SampleProvenance, SynthSample};
pub use synth::{synthesize_dataset, synthesize_pair, SynthOutput, SynthStats};

/// Shift of `R` relative to `L`, which stays anchored at the origin.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Offset {
    pub dx: isize,
    pub dy: isize,
}

impl Offset {
    pub const ZERO: Offset = Offset { dx: 0, dy: 0 };

    pub fn new(dx: isize, dy: isize) -> Self {
        Self { dx, dy }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    L,
    R,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct SynthConfig {
    /// Binarization threshold applied before thinning.
    pub threshold: u8,
    pub sweep_radius: usize,
    pub step: usize,
    pub min_points: usize,
    /// Intersection clusters larger than this mean the strokes run along each
    /// other; the whole offset is discarded.
    pub max_cluster_size: usize,
    pub erase_radius: usize,
    pub min_fragment_size: usize,
    pub dilate_iters: usize,
    /// Accepted foreground mass, as multiples of the parents' mean mass.
    pub size_band: (f64, f64),
    /// Pair draws allowed before giving up; `None` means 50 x target.
    pub max_attempts: Option<usize>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            threshold: crate::raster::DEFAULT_THRESHOLD,
            sweep_radius: 4,
            step: 2,
            min_points: 1,
            max_cluster_size: 5,
            erase_radius: 1,
            min_fragment_size: 3,
            dilate_iters: 1,
            size_band: (0.5, 1.5),
            max_attempts: None,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step == 0 {
            return Err(Error::Config("synth step must be >= 1".into()));
        }
        if self.max_cluster_size == 0 {
            return Err(Error::Config("max-cluster-size must be >= 1".into()));
        }
        let (lo, hi) = self.size_band;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return Err(Error::Config(format!("size-band ({lo}, {hi}) is not a valid range")));
        }
        Ok(())
    }

    pub fn attempt_budget(&self, target: usize) -> usize {
        self.max_attempts.unwrap_or(target.saturating_mul(50))
    }
}
