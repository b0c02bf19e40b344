//! Raster containers.
//!
//! Both images are row-major. [`GrayImage`] stores 8-bit intensities with
//! 0 = black and 255 = white; [`BinaryImage`] stores labels where 1 is ink
//! (object) and 0 is background.

use crate::error::{Error, Result};

/// 8-bit grayscale raster, 0 = black, 255 = white.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image filled with a single intensity.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        check_dims(width, height, width.saturating_mul(height))?;
        Ok(Self {
            width,
            height,
            data: vec![value; width * height],
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        check_dims(width, height, width.saturating_mul(height))?;
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    /// 256-bin intensity histogram.
    pub fn histogram(&self) -> [u64; 256] {
        let mut hist = [0u64; 256];
        for &v in &self.data {
            hist[v as usize] += 1;
        }
        hist
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrayImage({}x{})", self.width, self.height)
    }
}

/// Bilevel raster with 1 = ink and 0 = background.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryImage {
    /// Builds an image from raw labels. Every value must be 0 or 1.
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        if let Some(pos) = data.iter().position(|&v| v > 1) {
            return Err(Error::InvalidLabel {
                index: pos,
                value: data[pos],
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// All-background image.
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height, width.saturating_mul(height))?;
        Ok(Self {
            width,
            height,
            data: vec![0; width * height],
        })
    }

    pub fn ones(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height, width.saturating_mul(height))?;
        Ok(Self {
            width,
            height,
            data: vec![1; width * height],
        })
    }

    /// Builds an image from a predicate over `(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_dims(width, height, width.saturating_mul(height))?;
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c) as u8);
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Parses an ASCII picture: `#` or `1` is ink, anything else background.
    /// Rows are separated by newlines; surrounding blank lines are ignored.
    /// Mostly useful for tests.
    pub fn from_ascii(picture: &str) -> Result<Self> {
        let rows: Vec<&str> = picture
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        if rows.iter().any(|r| r.chars().count() != width) {
            return Err(Error::Ragged);
        }
        let data = rows
            .iter()
            .flat_map(|r| r.chars().map(|ch| matches!(ch, '#' | '1') as u8))
            .collect();
        Self::new(width, height, data)
    }

    pub(crate) fn from_raw_unchecked(width: usize, height: usize, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        debug_assert!(data.iter().all(|&v| v <= 1));
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col] != 0
    }

    /// Bounds-checked read with signed coordinates; outside is background.
    #[inline]
    pub fn get_or_bg(&self, row: isize, col: isize) -> bool {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            false
        } else {
            self.data[row as usize * self.width + col as usize] != 0
        }
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row * self.width + col] = value as u8;
    }

    /// Number of ink pixels.
    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn same_dims(&self, other: &BinaryImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// `true` if every ink pixel of `self` is also ink in `other`.
    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.same_dims(other) && self.data.iter().zip(&other.data).all(|(&a, &b)| a <= b)
    }

    /// Inclusive `(row_min, col_min, row_max, col_max)` of the ink, if any.
    pub fn ink_bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bounds: Option<(usize, usize, usize, usize)> = None;
        for r in 0..self.height {
            let row = &self.data[r * self.width..(r + 1) * self.width];
            let Some(first) = row.iter().position(|&v| v != 0) else {
                continue;
            };
            let last = row.iter().rposition(|&v| v != 0).unwrap_or(first);
            bounds = Some(match bounds {
                None => (r, first, r, last),
                Some((r0, c0, _, c1)) => (r0, c0.min(first), r, c1.max(last)),
            });
        }
        bounds
    }

    /// Copies the inclusive window `[row0..=row1] x [col0..=col1]`.
    pub fn crop(&self, row0: usize, col0: usize, row1: usize, col1: usize) -> Result<Self> {
        if row0 > row1 || col0 > col1 || row1 >= self.height || col1 >= self.width {
            return Err(Error::CropOutOfBounds {
                window: (row0, col0, row1, col1),
                width: self.width,
                height: self.height,
            });
        }
        let w = col1 - col0 + 1;
        let h = row1 - row0 + 1;
        let mut data = Vec::with_capacity(w * h);
        for r in row0..=row1 {
            data.extend_from_slice(&self.data[r * self.width + col0..=r * self.width + col1]);
        }
        Ok(Self::from_raw_unchecked(w, h, data))
    }

    /// Tight crop around the ink. `None` when the image is blank.
    pub fn crop_to_ink(&self) -> Option<Self> {
        let (r0, c0, r1, c1) = self.ink_bounds()?;
        self.crop(r0, c0, r1, c1).ok()
    }

    /// Surrounds the image with `margin` background pixels on every side.
    pub fn pad(&self, margin: usize) -> Self {
        let w = self.width + 2 * margin;
        let h = self.height + 2 * margin;
        let mut data = vec![0u8; w * h];
        for r in 0..self.height {
            let dst = (r + margin) * w + margin;
            data[dst..dst + self.width]
                .copy_from_slice(&self.data[r * self.width..(r + 1) * self.width]);
        }
        Self::from_raw_unchecked(w, h, data)
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0u8; self.data.len()];
        for r in 0..self.height {
            for c in 0..self.width {
                data[c * self.height + r] = self.data[r * self.width + c];
            }
        }
        Self::from_raw_unchecked(self.height, self.width, data)
    }

    /// Nearest-neighbour upscaling by an integer factor.
    pub fn upscale(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        let w = self.width * factor;
        let h = self.height * factor;
        let mut data = Vec::with_capacity(w * h);
        for r in 0..h {
            let src = &self.data[(r / factor) * self.width..(r / factor + 1) * self.width];
            for c in 0..w {
                data.push(src[c / factor]);
            }
        }
        Self::from_raw_unchecked(w, h, data)
    }

    /// Grayscale rendering with ink = 0 and background = 255.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| if v != 0 { 0 } else { 255 }).collect(),
        }
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    /// Renders as `#`/`.` rows, handy in assertion messages.
    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for r in 0..self.height {
            for c in 0..self.width {
                out.push(if self.get(r, c) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

impl std::fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.width <= 64 && self.height <= 64 {
            write!(f, "BinaryImage({}x{})\n{}", self.width, self.height, self.to_ascii())
        } else {
            write!(f, "BinaryImage({}x{})", self.width, self.height)
        }
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage);
    }
    match width.checked_mul(height) {
        Some(n) if n == len => Ok(()),
        _ => Err(Error::DataLength {
            expected: width.saturating_mul(height),
            actual: len,
        }),
    }
}
