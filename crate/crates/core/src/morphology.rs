//! Flat binary morphology.
//!
//! Pixels outside the image are background for both erosion and dilation.
//! Line structuring elements run in O(n) per image regardless of length;
//! arbitrary offset sets fall back to a direct neighbourhood scan.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::image::BinaryImage;
use crate::imaging::Connectivity;

/// Orientation of a line structuring element, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// 0 degrees.
    Horizontal,
    /// 45 degrees, running up and to the right.
    RightDiagonal,
    /// 90 degrees.
    Vertical,
    /// 135 degrees, running up and to the left.
    LeftDiagonal,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Horizontal,
        Direction::RightDiagonal,
        Direction::Vertical,
        Direction::LeftDiagonal,
    ];

    pub fn from_degrees(deg: u32) -> Result<Self> {
        match deg {
            0 => Ok(Direction::Horizontal),
            45 => Ok(Direction::RightDiagonal),
            90 => Ok(Direction::Vertical),
            135 => Ok(Direction::LeftDiagonal),
            other => Err(Error::InvalidDirection(other)),
        }
    }

    pub fn degrees(self) -> u32 {
        match self {
            Direction::Horizontal => 0,
            Direction::RightDiagonal => 45,
            Direction::Vertical => 90,
            Direction::LeftDiagonal => 135,
        }
    }

    /// Unit step `(drow, dcol)` along the line; one pixel per row on diagonals.
    pub fn step(self) -> (isize, isize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::RightDiagonal => (-1, 1),
            Direction::Vertical => (1, 0),
            Direction::LeftDiagonal => (1, 1),
        }
    }
}

/// Flat structuring element given as offsets from its centre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    offsets: Vec<(isize, isize)>,
    line: Option<(Direction, usize)>,
}

impl StructuringElement {
    /// Arbitrary offset set. The origin must be included.
    pub fn from_offsets(mut offsets: Vec<(isize, isize)>) -> Result<Self> {
        offsets.sort_unstable();
        offsets.dedup();
        if !offsets.contains(&(0, 0)) {
            return Err(Error::Config("structuring element must contain its origin".into()));
        }
        Ok(Self {
            offsets,
            line: None,
        })
    }

    pub fn offsets(&self) -> &[(isize, isize)] {
        &self.offsets
    }

    pub fn direction(&self) -> Option<Direction> {
        self.line.map(|(d, _)| d)
    }

    /// Pixel count along the line for line elements, offset count otherwise.
    pub fn length(&self) -> usize {
        self.line.map_or(self.offsets.len(), |(_, l)| l)
    }

    pub fn reflect(&self) -> Self {
        let mut offsets: Vec<_> = self.offsets.iter().map(|&(r, c)| (-r, -c)).collect();
        offsets.sort_unstable();
        Self {
            offsets,
            line: self.line,
        }
    }
}

/// Centred digital line of `length` pixels.
pub fn line_se(direction: Direction, length: usize) -> Result<StructuringElement> {
    if length == 0 || length % 2 == 0 {
        return Err(Error::InvalidSeLength(length as i64));
    }
    let half = (length / 2) as isize;
    let (dr, dc) = direction.step();
    let mut offsets: Vec<_> = (-half..=half).map(|i| (i * dr, i * dc)).collect();
    offsets.sort_unstable();
    Ok(StructuringElement {
        offsets,
        line: Some((direction, length)),
    })
}

/// Same as [`line_se`] with the direction given in degrees.
pub fn line_se_degrees(degrees: u32, length: i64) -> Result<StructuringElement> {
    if length <= 0 || length % 2 == 0 {
        return Err(Error::InvalidSeLength(length));
    }
    line_se(Direction::from_degrees(degrees)?, length as usize)
}

/// Pointwise `1 - v`.
pub fn complement(img: &BinaryImage) -> BinaryImage {
    let data = img.data().iter().map(|&v| 1 - v).collect();
    BinaryImage::from_raw_unchecked(img.width(), img.height(), data)
}

pub fn erode(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    match se.line {
        Some((dir, len)) => line_filter(img, dir, len, LineOp::Erode),
        None => naive_filter(img, se.offsets(), true),
    }
}

pub fn dilate(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    match se.line {
        // line elements are symmetric, so reflection is a no-op
        Some((dir, len)) => line_filter(img, dir, len, LineOp::Dilate),
        None => naive_filter(img, se.reflect().offsets(), false),
    }
}

/// Erosion followed by dilation with the same element.
pub fn open(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    dilate(&erode(img, se), se)
}

/// Dilation followed by erosion with the same element.
pub fn close(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    erode(&dilate(img, se), se)
}

fn naive_filter(img: &BinaryImage, offsets: &[(isize, isize)], all: bool) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    let mut data = Vec::with_capacity(w * h);
    for r in 0..h as isize {
        for c in 0..w as isize {
            let v = if all {
                offsets.iter().all(|&(dr, dc)| img.get_or_bg(r + dr, c + dc))
            } else {
                offsets.iter().any(|&(dr, dc)| img.get_or_bg(r + dr, c + dc))
            };
            data.push(v as u8);
        }
    }
    BinaryImage::from_raw_unchecked(w, h, data)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum LineOp {
    Erode,
    Dilate,
}

/// Windowed count along every digital line parallel to `dir`.
fn line_filter(img: &BinaryImage, dir: Direction, len: usize, op: LineOp) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    let src = img.data();
    let mut out = vec![0u8; w * h];
    let half = len / 2;
    let (dr, dc) = dir.step();

    let mut chain: Vec<usize> = Vec::with_capacity(w.max(h));
    let mut prefix: Vec<u32> = Vec::with_capacity(w.max(h) + 1);

    let in_bounds =
        |r: isize, c: isize| r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w;

    for r0 in 0..h as isize {
        for c0 in 0..w as isize {
            // a chain starts where stepping backwards leaves the image
            if in_bounds(r0 - dr, c0 - dc) {
                continue;
            }
            chain.clear();
            prefix.clear();
            prefix.push(0);
            let (mut r, mut c) = (r0, c0);
            while in_bounds(r, c) {
                let idx = r as usize * w + c as usize;
                chain.push(idx);
                prefix.push(prefix.last().unwrap() + src[idx] as u32);
                r += dr;
                c += dc;
            }
            let m = chain.len();
            for (j, &idx) in chain.iter().enumerate() {
                out[idx] = match op {
                    LineOp::Erode => {
                        j >= half
                            && j + half < m
                            && (prefix[j + half + 1] - prefix[j - half]) as usize == len
                    }
                    LineOp::Dilate => {
                        let lo = j.saturating_sub(half);
                        let hi = (j + half + 1).min(m);
                        prefix[hi] > prefix[lo]
                    }
                } as u8;
            }
        }
    }
    BinaryImage::from_raw_unchecked(w, h, out)
}

/// A marker image contained in a same-sized mask.
#[derive(Debug, Clone)]
pub struct MarkerMaskPair {
    marker: BinaryImage,
    mask: BinaryImage,
}

impl MarkerMaskPair {
    pub fn new(marker: BinaryImage, mask: BinaryImage) -> Result<Self> {
        if !marker.same_dims(&mask) {
            return Err(Error::DimensionMismatch(
                marker.width(),
                marker.height(),
                mask.width(),
                mask.height(),
            ));
        }
        if !marker.is_subset_of(&mask) {
            return Err(Error::MarkerOutsideMask);
        }
        Ok(Self { marker, mask })
    }

    pub fn marker(&self) -> &BinaryImage {
        &self.marker
    }

    pub fn mask(&self) -> &BinaryImage {
        &self.mask
    }
}

/// Binary reconstruction by dilation under 8-connectivity.
pub fn reconstruct_by_dilation(pair: &MarkerMaskPair) -> BinaryImage {
    reconstruct_by_dilation_with(pair, Connectivity::Eight)
}

/// Binary reconstruction by dilation with the hybrid scheme: one raster
/// scan, one anti-raster scan that also seeds a FIFO queue, then queue
/// propagation.
pub fn reconstruct_by_dilation_with(pair: &MarkerMaskPair, conn: Connectivity) -> BinaryImage {
    hybrid_reconstruct(pair.marker.data(), pair.mask.data(), pair.mask.width(), pair.mask.height(), conn)
}

fn hybrid_reconstruct(
    marker: &[u8],
    mask: &[u8],
    w: usize,
    h: usize,
    conn: Connectivity,
) -> BinaryImage {
    let mut j = marker.to_vec();
    let (wi, hi) = (w as isize, h as isize);
    let neighbour = |r: usize, c: usize, dr: isize, dc: isize| -> Option<usize> {
        let (nr, nc) = (r as isize + dr, c as isize + dc);
        (nr >= 0 && nc >= 0 && nr < hi && nc < wi).then(|| nr as usize * w + nc as usize)
    };

    for r in 0..h {
        for c in 0..w {
            let p = r * w + c;
            if j[p] == 0
                && mask[p] != 0
                && conn
                    .causal_offsets()
                    .iter()
                    .any(|&(dr, dc)| neighbour(r, c, dr, dc).is_some_and(|q| j[q] != 0))
            {
                j[p] = 1;
            }
        }
    }

    let mut queue = VecDeque::new();
    for r in (0..h).rev() {
        for c in (0..w).rev() {
            let p = r * w + c;
            if j[p] == 0
                && mask[p] != 0
                && conn
                    .anticausal_offsets()
                    .iter()
                    .any(|&(dr, dc)| neighbour(r, c, dr, dc).is_some_and(|q| j[q] != 0))
            {
                j[p] = 1;
            }
            if j[p] != 0
                && conn.anticausal_offsets().iter().any(|&(dr, dc)| {
                    neighbour(r, c, dr, dc).is_some_and(|q| j[q] == 0 && mask[q] != 0)
                })
            {
                queue.push_back(p);
            }
        }
    }

    while let Some(p) = queue.pop_front() {
        let (r, c) = (p / w, p % w);
        for &(dr, dc) in conn.offsets() {
            if let Some(q) = neighbour(r, c, dr, dc) {
                if j[q] == 0 && mask[q] != 0 {
                    j[q] = 1;
                    queue.push_back(q);
                }
            }
        }
    }
    BinaryImage::from_raw_unchecked(w, h, j)
}

/// Reconstruction of `img` from its erosion by `se`: every 8-connected
/// component that survives the erosion comes back whole.
pub fn opening_by_reconstruction(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let marker = erode(img, se);
    hybrid_reconstruct(marker.data(), img.data(), img.width(), img.height(), Connectivity::Eight)
}

/// Fills every background region not 4-connected to the image border.
pub fn fill_holes(img: &BinaryImage) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    let mask = complement(img);
    let mut marker = vec![0u8; w * h];
    for r in 0..h {
        for c in 0..w {
            if r == 0 || c == 0 || r == h - 1 || c == w - 1 {
                let p = r * w + c;
                marker[p] = mask.data()[p];
            }
        }
    }
    let background = hybrid_reconstruct(&marker, mask.data(), w, h, Connectivity::Four);
    complement(&background)
}
