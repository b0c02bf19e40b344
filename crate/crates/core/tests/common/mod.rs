//! Slow, obviously-correct reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scriptid::{BinaryImage, Connectivity, GrayImage, Sample, ScriptLabel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_binary(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> BinaryImage {
    BinaryImage::from_fn(w, h, |_, _| rng.gen_bool(density)).unwrap()
}

/// Random gray image: either uniform noise or a few flat levels with jitter.
pub fn random_gray(rng: &mut impl Rng, w: usize, h: usize) -> GrayImage {
    if rng.gen_bool(0.5) {
        GrayImage::from_fn(w, h, |_, _| rng.gen()).unwrap()
    } else {
        let levels: Vec<u8> = (0..rng.gen_range(1..=4)).map(|_| rng.gen()).collect();
        let jitter = rng.gen_range(0..=20i32);
        GrayImage::from_fn(w, h, |_, _| {
            let base = levels[rng.gen_range(0..levels.len())] as i32;
            (base + rng.gen_range(-jitter..=jitter)).clamp(0, 255) as u8
        })
        .unwrap()
    }
}

/// Exhaustive Otsu in exact integer arithmetic: the smallest `t` maximizing
/// `(S0 N - S n0)^2 / (n0 n1)`; a single-intensity image gives that intensity.
pub fn otsu_brute(img: &GrayImage) -> u8 {
    let px = img.data();
    let distinct: std::collections::BTreeSet<u8> = px.iter().copied().collect();
    if distinct.len() == 1 {
        return px[0];
    }
    let n = px.len() as i128;
    let s: i128 = px.iter().map(|&v| v as i128).sum();
    let mut best: Option<(u8, u128, u128)> = None; // (t, numerator, denominator)
    for t in 0..=255u8 {
        let n0 = px.iter().filter(|&&v| v <= t).count() as i128;
        let s0: i128 = px.iter().filter(|&&v| v <= t).map(|&v| v as i128).sum();
        let n1 = n - n0;
        let (num, den) = if n0 == 0 || n1 == 0 {
            (0u128, 1u128)
        } else {
            let d = s0 * n - s * n0;
            ((d * d) as u128, (n0 * n1) as u128)
        };
        let better = match best {
            None => true,
            Some((_, bn, bd)) => num * bd > bn * den,
        };
        if better {
            best = Some((t, num, den));
        }
    }
    best.unwrap().0
}

/// Erosion by definition: every offset of the element lands on ink.
pub fn naive_erode(img: &BinaryImage, offsets: &[(isize, isize)]) -> BinaryImage {
    BinaryImage::from_fn(img.width(), img.height(), |r, c| {
        offsets
            .iter()
            .all(|&(dr, dc)| img.get_or_bg(r as isize + dr, c as isize + dc))
    })
    .unwrap()
}

/// Dilation by definition: some ink pixel reaches here through an offset.
pub fn naive_dilate(img: &BinaryImage, offsets: &[(isize, isize)]) -> BinaryImage {
    BinaryImage::from_fn(img.width(), img.height(), |r, c| {
        offsets
            .iter()
            .any(|&(dr, dc)| img.get_or_bg(r as isize - dr, c as isize - dc))
    })
    .unwrap()
}

fn neighbours(conn: Connectivity) -> Vec<(isize, isize)> {
    let mut v = vec![(-1, 0), (1, 0), (0, -1), (0, 1)];
    if conn == Connectivity::Eight {
        v.extend([(-1, -1), (-1, 1), (1, -1), (1, 1)]);
    }
    v
}

/// Iterated geodesic dilation until nothing changes.
pub fn geodesic_reconstruct(marker: &BinaryImage, mask: &BinaryImage, conn: Connectivity) -> BinaryImage {
    let nb = neighbours(conn);
    let mut cur = marker.clone();
    loop {
        let next = BinaryImage::from_fn(cur.width(), cur.height(), |r, c| {
            mask.get(r, c)
                && (cur.get(r, c)
                    || nb
                        .iter()
                        .any(|&(dr, dc)| cur.get_or_bg(r as isize + dr, c as isize + dc)))
        })
        .unwrap();
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Components by breadth-first flood fill, in raster order of their first pixel.
pub fn bfs_components(img: &BinaryImage, conn: Connectivity) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (img.width(), img.height());
    let nb = neighbours(conn);
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if !img.get(r, c) || seen[r * w + c] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([(r, c)]);
            seen[r * w + c] = true;
            while let Some((pr, pc)) = queue.pop_front() {
                comp.push((pr, pc));
                for &(dr, dc) in &nb {
                    let (nr, nc) = (pr as isize + dr, pc as isize + dc);
                    if img.get_or_bg(nr, nc) && !seen[nr as usize * w + nc as usize] {
                        seen[nr as usize * w + nc as usize] = true;
                        queue.push_back((nr as usize, nc as usize));
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
    }
    out
}

/// Union of the 8-connected components that keep at least one pixel after erosion.
pub fn obr_by_components(img: &BinaryImage, offsets: &[(isize, isize)]) -> BinaryImage {
    let eroded = naive_erode(img, offsets);
    let mut out = BinaryImage::zeros(img.width(), img.height()).unwrap();
    for comp in bfs_components(img, Connectivity::Eight) {
        if comp.iter().any(|&(r, c)| eroded.get(r, c)) {
            for (r, c) in comp {
                out.set(r, c, true);
            }
        }
    }
    out
}

/// Background 4-components that never reach the frame.
pub fn enclosed_background(img: &BinaryImage) -> usize {
    let (w, h) = (img.width(), img.height());
    let bg = BinaryImage::from_fn(w, h, |r, c| !img.get(r, c)).unwrap();
    bfs_components(&bg, Connectivity::Four)
        .iter()
        .filter(|comp| !comp.iter().any(|&(r, c)| r == 0 || c == 0 || r + 1 == h || c + 1 == w))
        .count()
}

/// k-NN by sorting every sample: most votes, then smallest summed distance,
/// then label order.
pub fn knn_full_sort(samples: &[Sample], v: &[f64; 8], k: usize) -> ScriptLabel {
    let mut scored: Vec<(f64, usize)> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let d2: f64 = s.features.to_array().iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2.sqrt(), i)
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut tally: BTreeMap<ScriptLabel, (usize, f64)> = BTreeMap::new();
    for &(d, i) in &scored[..k] {
        let e = tally.entry(samples[i].label.clone()).or_default();
        e.0 += 1;
        e.1 += d;
    }
    let mut entries: Vec<_> = tally.into_iter().collect();
    // stable sort keeps label order among exact ties
    entries.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.partial_cmp(&b.1 .1).unwrap()));
    entries[0].0.clone()
}

/// Minimum-distance label by linear scan; first index wins ties.
pub fn nn_scan(samples: &[Sample], v: &[f64; 8]) -> ScriptLabel {
    let mut best = (f64::INFINITY, 0);
    for (i, s) in samples.iter().enumerate() {
        let d: f64 = s.features.to_array().iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
        if d.sqrt() < best.0 {
            best = (d.sqrt(), i);
        }
    }
    samples[best.1].label.clone()
}

pub const LABELS: [ScriptLabel; 3] = [ScriptLabel::Kannada, ScriptLabel::Devnagari, ScriptLabel::EnglishNumeral];

/// Random labelled samples spread over three loose clusters.
pub fn random_samples(rng: &mut impl Rng, n: usize) -> Vec<Sample> {
    (0..n)
        .map(|_| {
            let class = rng.gen_range(0..3);
            let mut v = [0.0; 8];
            for (j, x) in v.iter_mut().enumerate() {
                let centre = 0.2 + 0.3 * ((class + j) % 3) as f64;
                *x = (centre + rng.gen_range(-0.25..0.25f64)).clamp(0.001, 1.0);
            }
            v[4] *= 2.0;
            Sample {
                features: scriptid::FeatureVector::from_array(v),
                label: LABELS[class].clone(),
            }
        })
        .collect()
}
