//! Netpbm reader/writer for the formats the pipeline consumes.
//!
//! Reads P1, P2, P4 and P5 with `maxval <= 255`; writes P4 (binary PBM) and
//! P5 (binary PGM). In PBM a set bit is black, which maps directly onto ink = 1.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};

/// A decoded netpbm raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Raster {
    Gray(GrayImage),
    Binary(BinaryImage),
}

impl Raster {
    pub fn width(&self) -> usize {
        match self {
            Raster::Gray(g) => g.width(),
            Raster::Binary(b) => b.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Raster::Gray(g) => g.height(),
            Raster::Binary(b) => b.height(),
        }
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.buf.len() {
            let b = self.buf[self.pos];
            if b == b'#' {
                while self.pos < self.buf.len() && self.buf[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.buf.len() && self.buf[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Pnm(format!("expected {what}")));
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Pnm(format!("{what} out of range")))
    }

    /// Consumes the single whitespace byte that separates header and raster.
    fn raster_start(&mut self) -> Result<&'a [u8]> {
        match self.buf.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.buf[self.pos + 1..]),
            _ => Err(Error::Pnm("missing whitespace before raster".into())),
        }
    }
}

/// Decodes a netpbm byte buffer.
pub fn decode(buf: &[u8]) -> Result<Raster> {
    if buf.len() < 2 || buf[0] != b'P' {
        return Err(Error::Pnm("bad magic number".into()));
    }
    let kind = buf[1];
    if !matches!(kind, b'1' | b'2' | b'4' | b'5') {
        return Err(Error::Pnm(format!("unsupported format P{}", kind as char)));
    }
    let mut cur = Cursor { buf, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    if width == 0 || height == 0 {
        return Err(Error::Pnm("zero dimension".into()));
    }
    let npix = width
        .checked_mul(height)
        .filter(|&n| n <= 1 << 31)
        .ok_or_else(|| Error::Pnm("image too large".into()))?;

    match kind {
        b'1' => {
            let mut data = Vec::with_capacity(npix);
            while data.len() < npix {
                cur.skip_ws_and_comments();
                match cur.buf.get(cur.pos) {
                    Some(b'0') => data.push(0),
                    Some(b'1') => data.push(1),
                    Some(_) => return Err(Error::Pnm("invalid P1 sample".into())),
                    None => return Err(Error::Pnm("truncated P1 raster".into())),
                }
                cur.pos += 1;
            }
            Ok(Raster::Binary(BinaryImage::from_raw_unchecked(width, height, data)))
        }
        b'4' => {
            let raster = cur.raster_start()?;
            let stride = width.div_ceil(8);
            if raster.len() < stride * height {
                return Err(Error::Pnm("truncated P4 raster".into()));
            }
            let mut data = Vec::with_capacity(npix);
            for r in 0..height {
                let row = &raster[r * stride..(r + 1) * stride];
                for c in 0..width {
                    data.push((row[c / 8] >> (7 - c % 8)) & 1);
                }
            }
            Ok(Raster::Binary(BinaryImage::from_raw_unchecked(width, height, data)))
        }
        _ => {
            let maxval = cur.number("maxval")?;
            if maxval == 0 || maxval > 255 {
                return Err(Error::Pnm(format!("maxval {maxval} not in 1..=255")));
            }
            let mut data = if kind == b'5' {
                let raster = cur.raster_start()?;
                if raster.len() < npix {
                    return Err(Error::Pnm("truncated P5 raster".into()));
                }
                raster[..npix].to_vec()
            } else {
                let mut data = Vec::with_capacity(npix);
                for _ in 0..npix {
                    let v = cur.number("P2 sample")?;
                    if v > maxval {
                        return Err(Error::Pnm("P2 sample exceeds maxval".into()));
                    }
                    data.push(v as u8);
                }
                data
            };
            if data.iter().any(|&v| v as usize > maxval) {
                return Err(Error::Pnm("sample exceeds maxval".into()));
            }
            if maxval != 255 {
                for v in &mut data {
                    *v = ((*v as usize * 255 + maxval / 2) / maxval) as u8;
                }
            }
            Ok(Raster::Gray(GrayImage::new(width, height, data)?))
        }
    }
}

/// Encodes as binary PBM (P4).
pub fn encode_pbm(img: &BinaryImage) -> Vec<u8> {
    let header = format!("P4\n{} {}\n", img.width(), img.height());
    let stride = img.width().div_ceil(8);
    let mut out = Vec::with_capacity(header.len() + stride * img.height());
    out.extend_from_slice(header.as_bytes());
    for r in 0..img.height() {
        let mut row = vec![0u8; stride];
        for c in 0..img.width() {
            if img.get(r, c) {
                row[c / 8] |= 0x80 >> (c % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

/// Encodes as binary PGM (P5) with maxval 255.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.data().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.data());
    out
}

pub fn read(path: impl AsRef<Path>) -> Result<Raster> {
    let path = path.as_ref();
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&buf).map_err(|e| match e {
        Error::Pnm(msg) => Error::Pnm(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_pbm(path: impl AsRef<Path>, img: &BinaryImage) -> Result<()> {
    write_bytes(path.as_ref(), &encode_pbm(img))
}

pub fn write_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    write_bytes(path.as_ref(), &encode_pgm(img))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}
