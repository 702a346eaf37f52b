mod common;

use handsynth::crossover::{
    fragment, group_structures, reproduce, splice, sweep_offsets, synthesize_dataset, Parent,
    Source, SynthConfig,
};
use handsynth::dataset::{encode_idx_images, encode_idx_labels, LabeledSet};
use handsynth::raster::{binarize, count_components, dilate, BinaryImage};
use proptest::prelude::*;

fn pair(seed: u64, class: usize) -> (Parent, Parent) {
    let set = common::synthetic_digits(2, seed);
    let cfg = SynthConfig::default();
    (
        Parent::prepare(0, class as u8, &set.images()[class], &cfg),
        Parent::prepare(1, class as u8, &set.images()[10 + class], &cfg),
    )
}

fn near(img: &BinaryImage, x: isize, y: isize) -> bool {
    (-1..=1).any(|dy| (-1..=1).any(|dx| img.get_signed(x + dx, y + dy)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn crossing_points_touch_both_skeletons(seed in any::<u64>(), class in 0usize..10) {
        let (l, r) = pair(seed, class);
        let cfg = SynthConfig::default();
        for set in sweep_offsets(&l.skeleton, &r.skeleton, cfg.sweep_radius, cfg.step, 1, cfg.max_cluster_size) {
            let (dx, dy) = (set.offset.dx, set.offset.dy);
            for &(x, y) in &set.points {
                let (x, y) = (x as isize, y as isize);
                prop_assert!(near(l.skeleton.image(), x, y));
                prop_assert!(near(r.skeleton.image(), x - dx, y - dy));
            }
        }
    }

    #[test]
    fn fragments_are_disjoint_and_cover(seed in any::<u64>(), class in 0usize..10) {
        let (l, r) = pair(seed, class);
        let cfg = SynthConfig::default();
        let sweeps = sweep_offsets(&l.skeleton, &r.skeleton, cfg.sweep_radius, cfg.step, 1, cfg.max_cluster_size);
        for set in sweeps.iter().take(4) {
            for (parent, source) in [(&l, Source::L), (&r, Source::R)] {
                // keep every fragment so that coverage is exact
                let Ok(frags) = fragment(&parent.skeleton, set, source, cfg.erase_radius, 1) else { continue };
                let (w, h) = parent.skeleton.image().dims();
                let mut covered = BinaryImage::new(w, h);
                for f in &frags {
                    for &(x, y) in f.pixels.points() {
                        prop_assert!(!covered.get(x, y), "fragments overlap");
                        covered.set(x, y, true);
                    }
                }
                let (sx, sy) = match source {
                    Source::L => (0, 0),
                    Source::R => (set.offset.dx, set.offset.dy),
                };
                for (x, y) in parent.skeleton.image().foreground() {
                    let erased = set.points.iter().any(|&(px, py)| {
                        let (ex, ey) = (px as isize - sx - x as isize, py as isize - sy - y as isize);
                        ex * ex + ey * ey <= (cfg.erase_radius * cfg.erase_radius) as isize
                    });
                    prop_assert!(covered.get(x, y) || erased);
                }
            }
        }
    }

    #[test]
    fn reproduction_is_the_spliced_union(seed in any::<u64>(), class in 0usize..10) {
        let (l, r) = pair(seed, class);
        let cfg = SynthConfig::default();
        let sweeps = sweep_offsets(&l.skeleton, &r.skeleton, cfg.sweep_radius, cfg.step, 1, cfg.max_cluster_size);
        for set in sweeps.iter().take(4) {
            let (Ok(fl), Ok(fr)) = (
                fragment(&l.skeleton, set, Source::L, cfg.erase_radius, cfg.min_fragment_size),
                fragment(&r.skeleton, set, Source::R, cfg.erase_radius, cfg.min_fragment_size),
            ) else { continue };
            let (gl, gr) = group_structures(&fl, &fr, set, l.skeleton.image().dims());
            for a in &gl {
                for b in gr.iter().filter(|b| b.index != a.index) {
                    let raw = splice(a, set, b);
                    let mut expect = a.mask.union(&b.mask.shifted(set.offset.dx, set.offset.dy));
                    for &(x, y) in &set.points {
                        expect.set(x, y, true);
                    }
                    prop_assert_eq!(&raw, &expect);
                    if let Ok(s) = reproduce(a, set, b, &l, &r, &cfg) {
                        prop_assert_eq!(&s.image, &dilate(&raw, cfg.dilate_iters));
                        prop_assert_eq!(count_components(&s.image), 1);
                        prop_assert!(s.image != l.dilated && s.image != r.dilated);
                        prop_assert_eq!((s.provenance.left_structure, s.provenance.right_structure), (a.index, b.index));
                    }
                }
            }
        }
    }
}

fn synth(seed: &LabeledSet, target: usize, rng: u64) -> (Vec<u8>, Vec<u8>, usize) {
    let out = synthesize_dataset(seed, target, &SynthConfig::default(), rng).unwrap();
    (encode_idx_images(&out.set), encode_idx_labels(&out.set), out.set.len())
}

#[test]
fn synthesis_is_deterministic() {
    let seed = common::synthetic_digits(8, 3);
    let a = synth(&seed, 300, 11);
    assert_eq!(a, synth(&seed, 300, 11));
    assert_eq!(a.2, 300);
    assert_ne!(a.0, synth(&seed, 300, 12).0);
}

#[test]
fn zero_target_is_empty() {
    let seed = common::synthetic_digits(3, 3);
    let out = synthesize_dataset(&seed, 0, &SynthConfig::default(), 1).unwrap();
    assert!(out.set.is_empty());
    assert_eq!(out.stats.shortfall, 0);
}

#[test]
fn every_sample_keeps_its_label_and_band() {
    let seed = common::synthetic_digits(6, 21);
    let cfg = SynthConfig::default();
    let out = synthesize_dataset(&seed, 200, &cfg, 4).unwrap();
    assert_eq!(out.samples.len(), out.set.len());
    for (p, (img, label)) in out.samples.iter().zip(out.set.iter()) {
        assert_eq!(seed.labels()[p.left_id], label);
        assert_eq!(seed.labels()[p.right_id], label);
        assert_ne!(p.left_id, p.right_id);
        let mask = binarize(img, 128);
        let mass = |i: usize| Parent::prepare(i, label, &seed.images()[i], &cfg).mass() as f64;
        let mean = (mass(p.left_id) + mass(p.right_id)) / 2.0;
        let n = mask.count() as f64;
        assert!(n >= cfg.size_band.0 * mean && n <= cfg.size_band.1 * mean);
        assert_eq!(count_components(&mask), 1);
    }
}

#[test]
fn both_structure_pairings_make_a_character() {
    // an X: each diagonal is cut into an upper and a lower arm
    let l = common::polyline(&[(4.0, 4.0), (24.0, 24.0)]);
    let r = common::polyline(&[(24.0, 4.0), (4.0, 24.0)]);
    let cfg = SynthConfig::default();
    let (pl, pr) = (Parent::prepare(0, 3, &l, &cfg), Parent::prepare(1, 3, &r, &cfg));
    let sweeps = sweep_offsets(&pl.skeleton, &pr.skeleton, 0, 1, 1, cfg.max_cluster_size);
    assert_eq!(sweeps.len(), 1);
    let set = &sweeps[0];
    let fl = fragment(&pl.skeleton, set, Source::L, cfg.erase_radius, cfg.min_fragment_size).unwrap();
    let fr = fragment(&pr.skeleton, set, Source::R, cfg.erase_radius, cfg.min_fragment_size).unwrap();
    let (gl, gr) = group_structures(&fl, &fr, set, (28, 28));
    assert_eq!((gl.len(), gr.len()), (2, 2));
    let top_l_bottom_r = reproduce(&gl[0], set, &gr[1], &pl, &pr, &cfg).unwrap();
    let bottom_l_top_r = reproduce(&gl[1], set, &gr[0], &pl, &pr, &cfg).unwrap();
    assert_ne!(top_l_bottom_r.image, bottom_l_top_r.image);
    // upper-left arm of L with lower-left arm of R, and the mirror image
    let a = &top_l_bottom_r.image;
    assert!(a.get(6, 6) && a.get(6, 22) && !a.get(22, 6) && !a.get(22, 22));
    let b = &bottom_l_top_r.image;
    assert!(b.get(22, 6) && b.get(22, 22) && !b.get(6, 6) && !b.get(6, 22));
}
