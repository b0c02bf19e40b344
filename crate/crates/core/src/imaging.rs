//! Binarization, connected components and per-component shape descriptors.

use crate::image::{BinaryImage, GrayImage};

/// Pixel adjacency used by labeling and reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    /// Neighbour offsets `(drow, dcol)`.
    pub fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(-1, 0), (0, -1), (0, 1), (1, 0)],
            Connectivity::Eight => &[
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ],
        }
    }

    /// Neighbours already visited in a raster scan.
    pub(crate) fn causal_offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(-1, 0), (0, -1)],
            Connectivity::Eight => &[(-1, -1), (-1, 0), (-1, 1), (0, -1)],
        }
    }

    /// Neighbours visited after `p` in a raster scan.
    pub(crate) fn anticausal_offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(1, 0), (0, 1)],
            Connectivity::Eight => &[(1, 1), (1, 0), (1, -1), (0, 1)],
        }
    }
}

impl TryFrom<u8> for Connectivity {
    type Error = u8;

    fn try_from(v: u8) -> Result<Self, u8> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(other),
        }
    }
}

/// Otsu's global threshold over the 256-bin histogram.
///
/// Class 0 holds intensities `<= t`. Returns the smallest `t` that maximizes
/// the between-class variance. A single-intensity image returns that
/// intensity.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let hist = img.histogram();
    let mut present = hist.iter().enumerate().filter(|(_, &n)| n > 0);
    let first = present.next().map(|(i, _)| i as u8).unwrap_or(0);
    if present.next().is_none() {
        return first;
    }

    let total: u64 = hist.iter().sum();
    let total_sum: u64 = hist.iter().enumerate().map(|(i, &n)| i as u64 * n).sum();
    let n = total as f64;
    let s = total_sum as f64;

    let mut best_t = 0u8;
    let mut best = -1.0f64;
    let mut n0 = 0u64;
    let mut s0 = 0u64;
    for (t, &count) in hist.iter().enumerate() {
        n0 += count;
        s0 += t as u64 * count;
        let n1 = total - n0;
        let var = if n0 == 0 || n1 == 0 {
            0.0
        } else {
            // w0 w1 (mu0 - mu1)^2 = (s0 N - S n0)^2 / (N^2 n0 n1)
            let num = s0 as f64 * n - s * n0 as f64;
            num * num / (n * n * n0 as f64 * n1 as f64)
        };
        if var > best {
            best = var;
            best_t = t as u8;
        }
    }
    best_t
}

/// Ink is dark: pixels with intensity `<= t` become 1.
pub fn binarize(img: &GrayImage, t: u8) -> BinaryImage {
    let data = img.data().iter().map(|&v| (v <= t) as u8).collect();
    BinaryImage::from_raw_unchecked(img.width(), img.height(), data)
}

/// Otsu binarization with the page convention that a single-intensity
/// image carries no ink.
pub fn binarize_otsu(img: &GrayImage) -> (BinaryImage, u8) {
    let t = otsu_threshold(img);
    let hist = img.histogram();
    if hist.iter().filter(|&&n| n > 0).count() <= 1 {
        let blank = BinaryImage::from_raw_unchecked(
            img.width(),
            img.height(),
            vec![0; img.width() * img.height()],
        );
        return (blank, t);
    }
    (binarize(img, t), t)
}

/// Geometry of one connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStats {
    /// Label in the accompanying label map (starts at 1).
    pub id: u32,
    pub area: usize,
    /// Inclusive `(row_min, col_min, row_max, col_max)`.
    pub bbox: (usize, usize, usize, usize),
    /// `(row, col)` mean of pixel coordinates.
    pub centroid: (f64, f64),
    /// Second central moments normalized by area: `(mu_rr, mu_cc, mu_rc)`.
    pub central_moments: (f64, f64, f64),
    pub major_axis_len: f64,
    pub minor_axis_len: f64,
}

impl ComponentStats {
    pub fn bbox_height(&self) -> usize {
        self.bbox.2 - self.bbox.0 + 1
    }

    pub fn bbox_width(&self) -> usize {
        self.bbox.3 - self.bbox.1 + 1
    }

    /// Height over width of the bounding box.
    pub fn aspect_ratio(&self) -> f64 {
        self.bbox_height() as f64 / self.bbox_width() as f64
    }
}

/// Minor-axis length over major-axis length of the equivalent ellipse.
///
/// Note this is the ratio b/a, not the conic eccentricity sqrt(1 - (b/a)^2).
pub fn component_eccentricity(c: &ComponentStats) -> f64 {
    if c.major_axis_len <= 0.0 {
        return 1.0;
    }
    (c.minor_axis_len / c.major_axis_len).clamp(0.0, 1.0)
}

/// Fraction of the bounding box covered by the component.
pub fn component_extent(c: &ComponentStats) -> f64 {
    c.area as f64 / (c.bbox_height() * c.bbox_width()) as f64
}

/// Result of connected-component labeling.
#[derive(Debug, Clone)]
pub struct Components {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    stats: Vec<ComponentStats>,
}

impl Components {
    pub fn stats(&self) -> &[ComponentStats] {
        &self.stats
    }

    pub fn into_stats(self) -> Vec<ComponentStats> {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Row-major label map; 0 is background.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_at(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra != rb {
        // smaller provisional label wins so roots follow discovery order
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Two-pass union-find labeling of ink pixels.
///
/// Labels are assigned in raster-scan discovery order starting at 1.
pub fn connected_components(img: &BinaryImage, connectivity: Connectivity) -> Components {
    let (w, h) = (img.width(), img.height());
    let data = img.data();
    let mut labels = vec![0u32; w * h];
    let mut parent: Vec<u32> = vec![0];

    for r in 0..h {
        for c in 0..w {
            let idx = r * w + c;
            if data[idx] == 0 {
                continue;
            }
            let mut current = 0u32;
            for &(dr, dc) in connectivity.causal_offsets() {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nc as usize >= w {
                    continue;
                }
                let l = labels[nr as usize * w + nc as usize];
                if l == 0 {
                    continue;
                }
                if current == 0 {
                    current = l;
                } else if current != l {
                    union(&mut parent, current, l);
                }
            }
            if current == 0 {
                current = parent.len() as u32;
                parent.push(current);
            }
            labels[idx] = current;
        }
    }

    // Resolve roots; provisional labels grow in raster order and unions keep
    // the smaller root, so each root is the label of the component's first
    // pixel and a sequential renumbering preserves discovery order.
    let mut final_of = vec![0u32; parent.len()];
    let mut next = 0u32;
    for l in 1..parent.len() as u32 {
        let root = find(&mut parent, l);
        if root == l {
            next += 1;
            final_of[l as usize] = next;
        }
    }
    for l in 1..parent.len() as u32 {
        let root = find(&mut parent, l);
        final_of[l as usize] = final_of[root as usize];
    }

    let n = next as usize;
    let mut acc = vec![MomentAcc::default(); n];
    for r in 0..h {
        for c in 0..w {
            let idx = r * w + c;
            if labels[idx] != 0 {
                let l = final_of[labels[idx] as usize];
                labels[idx] = l;
                acc[l as usize - 1].push(r, c);
            }
        }
    }

    let stats = acc
        .iter()
        .enumerate()
        .map(|(i, a)| a.finish(i as u32 + 1))
        .collect();
    Components {
        width: w,
        height: h,
        labels,
        stats,
    }
}

#[derive(Clone)]
struct MomentAcc {
    n: u64,
    sr: u64,
    sc: u64,
    srr: u64,
    scc: u64,
    src: u64,
    bbox: (usize, usize, usize, usize),
}

impl Default for MomentAcc {
    fn default() -> Self {
        Self {
            n: 0,
            sr: 0,
            sc: 0,
            srr: 0,
            scc: 0,
            src: 0,
            bbox: (usize::MAX, usize::MAX, 0, 0),
        }
    }
}

impl MomentAcc {
    #[inline]
    fn push(&mut self, r: usize, c: usize) {
        let (r64, c64) = (r as u64, c as u64);
        self.n += 1;
        self.sr += r64;
        self.sc += c64;
        self.srr += r64 * r64;
        self.scc += c64 * c64;
        self.src += r64 * c64;
        let b = &mut self.bbox;
        b.0 = b.0.min(r);
        b.1 = b.1.min(c);
        b.2 = b.2.max(r);
        b.3 = b.3.max(c);
    }

    fn finish(&self, id: u32) -> ComponentStats {
        let n = self.n as i128;
        let nf = self.n as f64;
        // n^2 * mu = n * sum(x y) - sum(x) sum(y), exact in integers
        let central = |sxy: u64, sx: u64, sy: u64| {
            (n * sxy as i128 - sx as i128 * sy as i128) as f64 / (nf * nf)
        };
        let mu_rr = central(self.srr, self.sr, self.sr);
        let mu_cc = central(self.scc, self.sc, self.sc);
        let mu_rc = central(self.src, self.sr, self.sc);
        let (major, minor) = axis_lengths(mu_rr, mu_cc, mu_rc);
        ComponentStats {
            id,
            area: self.n as usize,
            bbox: self.bbox,
            centroid: (self.sr as f64 / nf, self.sc as f64 / nf),
            central_moments: (mu_rr, mu_cc, mu_rc),
            major_axis_len: major,
            minor_axis_len: minor,
        }
    }
}

/// Axis lengths `4 sqrt(lambda)` of the ellipse with the same second moments,
/// with the 1/12 per-pixel variance correction on the diagonal.
pub fn axis_lengths(mu_rr: f64, mu_cc: f64, mu_rc: f64) -> (f64, f64) {
    let a = mu_rr + 1.0 / 12.0;
    let b = mu_cc + 1.0 / 12.0;
    let mean = (a + b) / 2.0;
    let half_diff = (a - b) / 2.0;
    let disc = (half_diff * half_diff + mu_rc * mu_rc).sqrt();
    let hi = mean + disc;
    let lo = (mean - disc).max(0.0);
    (4.0 * hi.sqrt(), 4.0 * lo.sqrt())
}

/// Drops every 8-connected component with fewer than `min_area` pixels.
pub fn remove_small_objects(img: &BinaryImage, min_area: usize) -> BinaryImage {
    let comps = connected_components(img, Connectivity::Eight);
    let keep: Vec<bool> = std::iter::once(false)
        .chain(comps.stats().iter().map(|s| s.area >= min_area))
        .collect();
    let data = comps
        .labels()
        .iter()
        .map(|&l| keep[l as usize] as u8)
        .collect();
    BinaryImage::from_raw_unchecked(img.width(), img.height(), data)
}
