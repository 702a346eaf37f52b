use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    fragment, group_structures, reproduce, sweep_offsets, Parent, Rejection, SampleProvenance,
    Source, SynthConfig, SynthSample,
};
use crate::dataset::{LabeledSet, Provenance, NUM_CLASSES};
use crate::error::Result;

/// Pair draws evaluated per parallel batch. Fixed so that output does not
/// depend on the thread count.
const BATCH: usize = 512;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SynthStats {
    pub target: usize,
    pub attempts: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub rejections: BTreeMap<String, usize>,
    /// `target - accepted` when the attempt budget ran out first.
    pub shortfall: usize,
}

impl SynthStats {
    pub fn accept_rate(&self) -> f64 {
        let total = self.accepted + self.rejected;
        if total == 0 {
            0.0
        } else {
            self.accepted as f64 / total as f64
        }
    }

    fn reject(&mut self, r: &Rejection) {
        self.rejected += 1;
        *self.rejections.entry(r.kind().to_string()).or_default() += 1;
    }
}

pub struct SynthOutput {
    pub set: LabeledSet,
    pub samples: Vec<SampleProvenance>,
    pub stats: SynthStats,
}

/// Runs the whole crossing-over pipeline on one pair. `choice` picks which of
/// the offsets with crossing points is used, so that a caller holding an RNG
/// decides the offset without the sweep depending on it.
pub fn synthesize_pair(
    left: &Parent,
    right: &Parent,
    choice: u64,
    cfg: &SynthConfig,
) -> (Vec<SynthSample>, Vec<Rejection>) {
    let sweeps = sweep_offsets(
        &left.skeleton,
        &right.skeleton,
        cfg.sweep_radius,
        cfg.step,
        cfg.min_points,
        cfg.max_cluster_size,
    );
    if sweeps.is_empty() {
        return (Vec::new(), vec![Rejection::NoCrossing]);
    }
    let points = &sweeps[(choice % sweeps.len() as u64) as usize];
    let frags_l = fragment(
        &left.skeleton,
        points,
        Source::L,
        cfg.erase_radius,
        cfg.min_fragment_size,
    );
    let frags_r = fragment(
        &right.skeleton,
        points,
        Source::R,
        cfg.erase_radius,
        cfg.min_fragment_size,
    );
    let (Ok(frags_l), Ok(frags_r)) = (frags_l, frags_r) else {
        return (Vec::new(), vec![Rejection::Degenerate]);
    };
    let (groups_l, groups_r) =
        group_structures(&frags_l, &frags_r, points, left.skeleton.image().dims());

    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for gl in &groups_l {
        for gr in groups_r.iter().filter(|gr| gr.index != gl.index) {
            match reproduce(gl, points, gr, left, right, cfg) {
                Ok(s) => accepted.push(s),
                Err(r) => rejected.push(r),
            }
        }
    }
    if accepted.is_empty() && rejected.is_empty() {
        // both characters collapsed onto the same side of the split
        rejected.push(Rejection::SameStructure(groups_l[0].index));
    }
    (accepted, rejected)
}

/// Synthesizes up to `target` new characters from random same-class pairs of
/// `seed`. Deterministic for a fixed `(seed, cfg, rng_seed)`.
pub fn synthesize_dataset(
    seed: &LabeledSet,
    target: usize,
    cfg: &SynthConfig,
    rng_seed: u64,
) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut stats = SynthStats {
        target,
        ..Default::default()
    };
    let mut images = Vec::with_capacity(target);
    let mut labels = Vec::with_capacity(target);
    let mut samples = Vec::with_capacity(target);

    let parents: Vec<Parent> = seed
        .images()
        .par_iter()
        .zip(seed.labels().par_iter())
        .enumerate()
        .map(|(id, (img, &label))| Parent::prepare(id, label, img, cfg))
        .collect();

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); NUM_CLASSES];
    for p in &parents {
        by_class[p.label as usize].push(p.id);
    }
    let eligible: Vec<usize> = parents
        .iter()
        .filter(|p| by_class[p.label as usize].len() >= 2)
        .map(|p| p.id)
        .collect();

    let budget = cfg.attempt_budget(target);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    'outer: while samples.len() < target && stats.attempts < budget && !eligible.is_empty() {
        let n = BATCH.min(budget - stats.attempts);
        let schedule: Vec<(usize, usize, u64)> = (0..n)
            .map(|_| {
                let i = eligible[rng.gen_range(0..eligible.len())];
                let mates = &by_class[parents[i].label as usize];
                // uniform over the class minus `i`
                let own = mates.binary_search(&i).expect("i is in its class");
                let mut k = rng.gen_range(0..mates.len() - 1);
                if k >= own {
                    k += 1;
                }
                (i, mates[k], rng.gen())
            })
            .collect();
        let results: Vec<_> = schedule
            .par_iter()
            .map(|&(i, j, choice)| synthesize_pair(&parents[i], &parents[j], choice, cfg))
            .collect();
        for (accepted, rejected) in results {
            stats.attempts += 1;
            for r in &rejected {
                stats.reject(r);
            }
            for s in accepted {
                if samples.len() == target {
                    break;
                }
                images.push(s.image.to_gray());
                labels.push(s.label);
                samples.push(s.provenance);
                stats.accepted += 1;
            }
            if samples.len() == target {
                break 'outer;
            }
        }
    }
    stats.shortfall = target - samples.len();
    let set = LabeledSet::new(images, labels, Provenance::Synthetic)?;
    Ok(SynthOutput {
        set,
        samples,
        stats,
    })
}
