//! Binary PGM (P5) and 8-bit grayscale PNG decoding, plus PGM output.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use facerec_core::{DepthMap, GrayImage};

use crate::error::{Error, Result};

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Why a PGM buffer was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PgmError {
    Malformed { offset: usize, reason: String },
    Unsupported(String),
}

fn malformed(offset: usize, reason: impl Into<String>) -> PgmError {
    PgmError::Malformed {
        offset,
        reason: reason.into(),
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> std::result::Result<usize, PgmError> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(malformed(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(start, format!("{what} out of range")))
    }
}

/// Decodes a binary PGM with `maxval ≤ 255`; samples are divided by maxval.
pub fn decode_pgm(bytes: &[u8]) -> std::result::Result<GrayImage, PgmError> {
    if !bytes.starts_with(b"P5") {
        return Err(malformed(0, "missing P5 magic"));
    }
    let mut r = HeaderReader { bytes, pos: 2 };
    if !bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(malformed(2, "expected whitespace after magic"));
    }
    let width = r.number("width")?;
    let height = r.number("height")?;
    let maxval_at = r.pos;
    let maxval = r.number("maxval")?;
    if maxval == 0 {
        return Err(malformed(maxval_at, "maxval must be positive"));
    }
    if maxval > 255 {
        return Err(PgmError::Unsupported(format!("16-bit PGM (maxval {maxval})")));
    }
    if !bytes.get(r.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(malformed(r.pos, "expected one whitespace byte before the raster"));
    }
    let start = r.pos + 1;
    if width == 0 || height == 0 {
        return Err(malformed(start, "zero image extent"));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| malformed(start, "image extent overflows"))?;
    let raster = &bytes[start..];
    if raster.len() < count {
        return Err(malformed(
            bytes.len(),
            format!("raster truncated: {count} samples declared, {} present", raster.len()),
        ));
    }
    let scale = maxval as f64;
    let mut data = Vec::with_capacity(count);
    for (i, &b) in raster[..count].iter().enumerate() {
        if b as usize > maxval {
            return Err(malformed(start + i, format!("sample {b} exceeds maxval {maxval}")));
        }
        data.push(b as f64 / scale);
    }
    Ok(GrayImage::new(width, height, data).expect("samples lie in [0, 1]"))
}

fn decode_png(bytes: &[u8], path: &Path) -> Result<GrayImage> {
    let unsupported = |reason: String| Error::Unsupported {
        path: path.to_path_buf(),
        reason,
    };
    let broken = |e: png::DecodingError| Error::Decode {
        path: path.to_path_buf(),
        offset: 0,
        reason: e.to_string(),
    };
    let mut reader = png::Decoder::new(Cursor::new(bytes)).read_info().map_err(broken)?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(unsupported(format!(
            "{:?} PNG at {:?} bits, need 8-bit grayscale",
            info.color_type, info.bit_depth
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| unsupported("image too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf).map_err(broken)?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let mut data = Vec::with_capacity(w * h);
    for row in buf.chunks(frame.line_size).take(h) {
        data.extend(row[..w].iter().map(|&b| b as f64 / 255.0));
    }
    Ok(GrayImage::new(w, h, data).expect("samples lie in [0, 1]"))
}

/// Loads a P5 PGM or an 8-bit grayscale PNG, picked by magic bytes.
pub fn load_gray_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(PNG_SIGNATURE) {
        return decode_png(&bytes, path);
    }
    if !bytes.starts_with(b"P5") {
        let magic = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(Error::Unsupported {
            path: path.to_path_buf(),
            reason: format!("neither binary PGM nor PNG (starts with {magic:?})"),
        });
    }
    decode_pgm(&bytes).map_err(|e| match e {
        PgmError::Malformed { offset, reason } => Error::Decode {
            path: path.to_path_buf(),
            offset,
            reason,
        },
        PgmError::Unsupported(reason) => Error::Unsupported {
            path: path.to_path_buf(),
            reason,
        },
    })
}

/// Binary PGM at maxval 255 from samples in `[0, 1]`.
pub fn encode_pgm(width: usize, height: usize, samples: &[f64]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(samples.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

pub fn write_pgm(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(image.width(), image.height(), image.data())).map_err(|e| Error::io(path, e))
}

/// Depth map mapped affinely onto 0–255 (a flat map is written black).
pub fn write_depth_pgm(path: impl AsRef<Path>, depth: &DepthMap) -> Result<()> {
    let path = path.as_ref();
    let plane = depth.plane();
    let (lo, hi) = (plane.min(), plane.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let samples: Vec<f64> = plane.data().iter().map(|v| (v - lo) / span).collect();
    fs::write(path, encode_pgm(plane.width(), plane.height(), &samples)).map_err(|e| Error::io(path, e))
}
