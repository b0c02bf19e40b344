mod common;

use common::*;
use proptest::prelude::*;
use scriptid::features::{extract_features, features_of, opd, pixel_ratio, FeatureParams};
use scriptid::synth::{render_word, GlyphSheets};
use scriptid::{BinaryImage, Direction, FeatureVector, WordImage};

fn nonblank(seed: u64, w: usize, h: usize, d: f64) -> BinaryImage {
    let mut img = random_binary(&mut rng(seed), w, h, d);
    img.set(h / 2, w / 2, true);
    img
}

/// Closed-form features of a solid `w` x `h` rectangle.
fn rectangle_oracle(w: usize, h: usize) -> [f64; 8] {
    let mut len = ((0.7 * h as f64 + 0.5).floor() as usize).max(3);
    if len % 2 == 0 {
        len += 1;
    }
    let fits = |n: usize| if n >= len { 1.0 } else { 0.0 };
    let diag = fits(w.min(h));
    [
        fits(w),
        diag,
        fits(h),
        diag,
        h as f64 / w as f64,
        1.0,
        w.min(h) as f64 / w.max(h) as f64,
        1.0,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn solid_rectangles_match_closed_form(w in 1usize..40, h in 1usize..40) {
        let f = features_of(&BinaryImage::ones(w, h).unwrap(), &FeatureParams::default()).unwrap();
        let want = rectangle_oracle(w, h);
        for (got, want) in f.to_array().iter().zip(want) {
            prop_assert!((got - want).abs() < 1e-12, "{w}x{h}: {:?} vs {:?}", f, want);
        }
    }

    #[test]
    fn opd_never_exceeds_pixel_ratio(seed: u64, w in 2usize..40, h in 2usize..40, d in 0.05f64..0.95) {
        let word = WordImage::new(&nonblank(seed, w, h, d)).unwrap();
        let p = FeatureParams::default();
        let pr = pixel_ratio(&word);
        for dir in Direction::ALL {
            prop_assert!(opd(&word, dir, &p) <= pr);
        }
        prop_assert!(extract_features(&word, &p).validate().is_ok());
    }

    #[test]
    fn padding_changes_nothing(seed: u64, w in 2usize..30, h in 2usize..30, d in 0.05f64..0.95, margin in 1usize..6) {
        let img = nonblank(seed, w, h, d);
        let p = FeatureParams::default();
        prop_assert_eq!(features_of(&img, &p).unwrap(), features_of(&img.pad(margin), &p).unwrap());
    }

    #[test]
    fn doubling_keeps_shape_descriptors(seed: u64, w in 2usize..30, h in 2usize..30, d in 0.05f64..0.95) {
        let img = nonblank(seed, w, h, d);
        let p = FeatureParams::default();
        let a = features_of(&img, &p).unwrap();
        let b = features_of(&img.upscale(2), &p).unwrap();
        prop_assert!((a.aar - b.aar).abs() < 0.05);
        prop_assert!((a.ecc - b.ecc).abs() < 0.05);
        prop_assert!((a.ext - b.ext).abs() < 0.05);
    }
}

#[test]
fn stroke_direction_shows_in_opd() {
    let p = FeatureParams::default();
    // three tall bars, and the same picture lying on its side
    let vertical = BinaryImage::from_fn(20, 24, |_, c| c % 7 < 2).unwrap();
    let v = features_of(&vertical, &p).unwrap();
    assert!(v.opd_90 > v.opd_0, "{v:?}");
    let h = features_of(&vertical.transpose(), &p).unwrap();
    assert!(h.opd_0 > h.opd_90, "{h:?}");
}

#[test]
fn extraction_is_bit_stable_across_threads() {
    let sheets = GlyphSheets::bundled();
    let words: Vec<BinaryImage> = sheets
        .sets
        .iter()
        .flat_map(|set| (1..5).map(move |n| render_word(set, &(0..n).collect::<Vec<_>>(), 14.0 + n as f64)))
        .collect();
    let p = FeatureParams::default();
    let serial: Vec<FeatureVector> = words.iter().map(|w| features_of(w, &p).unwrap()).collect();
    let threaded: Vec<FeatureVector> = std::thread::scope(|s| {
        let handles: Vec<_> = words.iter().map(|w| s.spawn(|| features_of(w, &p).unwrap())).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for (a, b) in serial.iter().zip(&threaded) {
        assert_eq!(a.to_array().map(f64::to_bits), b.to_array().map(f64::to_bits));
    }
}

#[test]
fn single_glyph_words_have_valid_features() {
    let sheets = GlyphSheets::bundled();
    for set in &sheets.sets {
        for g in 0..set.glyphs.len() {
            let f = features_of(&render_word(set, &[g], 10.0), &FeatureParams::default()).unwrap();
            assert!(f.validate().is_ok(), "{} glyph {g}: {f:?}", set.label);
        }
    }
}
