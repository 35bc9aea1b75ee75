//! Binary PGM (P5) and PPM (P6) images with 8-bit samples.

use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// 1 for PGM, 3 for PPM.
    pub channels: usize,
    pub maxval: u8,
    /// Row-major, channels interleaved.
    pub pixels: Vec<u8>,
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::Data(format!("bad {what} in image header")))
    }
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<u8>) -> Result<Self> {
        if !matches!(channels, 1 | 3) || pixels.len() != width * height * channels {
            return Err(CliError::Data(format!(
                "{} samples do not fill a {width}x{height} image with {channels} channels",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            maxval: 255,
            pixels,
        })
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let channels = match bytes.get(..2) {
            Some(b"P5") => 1,
            Some(b"P6") => 3,
            _ => {
                return Err(CliError::Data(
                    "not a binary PGM (P5) or PPM (P6) file".into(),
                ))
            }
        };
        let mut h = Header { bytes, pos: 2 };
        let width = h.number("width")?;
        let height = h.number("height")?;
        let maxval = h.number("maxval")?;
        if !(1..=255).contains(&maxval) {
            return Err(CliError::Data(format!(
                "maxval {maxval} unsupported, only 8-bit images are read"
            )));
        }
        if width == 0 || height == 0 {
            return Err(CliError::Data("image has no pixels".into()));
        }
        // exactly one whitespace byte ends the header
        if !bytes.get(h.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(CliError::Data("malformed image header".into()));
        }
        let start = h.pos + 1;
        let len = width * height * channels;
        let raster = bytes.get(start..start + len).ok_or_else(|| {
            CliError::Data(format!("image raster truncated, expected {len} bytes"))
        })?;
        Ok(Self {
            width,
            height,
            channels,
            maxval: maxval as u8,
            pixels: raster.to_vec(),
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out =
            format!("{magic}\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::decode(&bytes).map_err(|e| match e {
            CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.encode()).map_err(|e| CliError::io(path, e))
    }

    /// The centered square of the largest power-of-two side, or `None` when
    /// the image already is one.
    pub fn dyadic_crop(&self) -> Option<Image> {
        let short = self.width.min(self.height);
        let side = 1usize << (usize::BITS - 1 - short.leading_zeros());
        if self.width == side && self.height == side {
            return None;
        }
        let (x0, y0) = ((self.width - side) / 2, (self.height - side) / 2);
        let c = self.channels;
        let mut pixels = Vec::with_capacity(side * side * c);
        for y in y0..y0 + side {
            let row = (y * self.width + x0) * c;
            pixels.extend_from_slice(&self.pixels[row..row + side * c]);
        }
        Some(Image {
            width: side,
            height: side,
            channels: c,
            maxval: self.maxval,
            pixels,
        })
    }

    /// One row-major grid per channel.
    pub fn bands(&self) -> Vec<Vec<f64>> {
        (0..self.channels)
            .map(|b| {
                self.pixels
                    .iter()
                    .skip(b)
                    .step_by(self.channels)
                    .map(|&v| f64::from(v))
                    .collect()
            })
            .collect()
    }

    /// Square image from concatenated band grids, rounded and clamped to
    /// `0..=maxval`.
    pub fn from_bands(side: usize, flat: &[f64], channels: usize, maxval: u8) -> Result<Self> {
        let n = side * side;
        if flat.len() != n * channels {
            return Err(CliError::Data(
                "reconstruction does not match the image size".into(),
            ));
        }
        let hi = f64::from(maxval);
        let mut pixels = vec![0u8; n * channels];
        for b in 0..channels {
            for (i, v) in flat[b * n..(b + 1) * n].iter().enumerate() {
                pixels[i * channels + b] = v.round().clamp(0.0, hi) as u8;
            }
        }
        Ok(Self {
            width: side,
            height: side,
            channels,
            maxval,
            pixels,
        })
    }
}
