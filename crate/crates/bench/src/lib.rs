//! Shared inputs for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scriptid::synth::{generate_page, render_word, GlyphSheets, PageParams};
use scriptid::{BinaryImage, ScriptLabel};

/// Uniform random bilevel image.
pub fn random_image(width: usize, height: usize, density: f64, seed: u64) -> BinaryImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BinaryImage::from_fn(width, height, |_, _| rng.gen_bool(density)).expect("nonzero size")
}

/// A four-glyph word of the given script at 24 pt.
pub fn sample_word(label: &ScriptLabel) -> BinaryImage {
    let sheets = GlyphSheets::bundled();
    let set = sheets.get(label).expect("bundled script");
    render_word(set, &[0, 3, 5, 7], 24.0)
}

/// A deterministic page from the bundled sheets.
pub fn sample_page(seed: u64) -> BinaryImage {
    let sheets = GlyphSheets::bundled();
    generate_page(&sheets, &PageParams::default(), &mut ChaCha8Rng::seed_from_u64(seed)).image
}
