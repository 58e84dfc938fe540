//! Portable Float Map (colour "PF" variant) reading and writing.
//!
//! Layout: `PF\n<width> <height>\n<scale>\n` followed by width·height·3
//! packed 32-bit floats, rows stored bottom-up. A negative scale means
//! little-endian payload, a positive one big-endian.

use std::fs;
use std::path::Path;

use super::EquirectMap;
use crate::error::{Error, Result};

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace(&mut self) {
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn token(&mut self, what: &str) -> Result<&'a str> {
        self.skip_whitespace();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
            if self.pos - start > 64 {
                return Err(Error::Format(format!("PFM {what} token too long")));
            }
        }
        if start == self.pos {
            return Err(Error::Format(format!("PFM header truncated before {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .map_err(|_| Error::Format(format!("PFM {what} is not ASCII")))
    }
}

/// Decodes an in-memory PFM image.
pub fn decode_pfm(bytes: &[u8]) -> Result<EquirectMap> {
    let mut cur = Cursor { data: bytes, pos: 0 };
    match cur.token("magic")? {
        "PF" => {}
        "Pf" => {
            return Err(Error::Format(
                "grayscale PFM (\"Pf\") is not supported; expected colour \"PF\"".into(),
            ))
        }
        other => return Err(Error::Format(format!("not a PFM file (magic {other:?})"))),
    }
    let width: usize = cur
        .token("width")?
        .parse()
        .map_err(|_| Error::Format("invalid PFM width".into()))?;
    let height: usize = cur
        .token("height")?
        .parse()
        .map_err(|_| Error::Format("invalid PFM height".into()))?;
    let scale: f64 = cur
        .token("scale")?
        .parse()
        .map_err(|_| Error::Format("invalid PFM scale".into()))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Format(format!("invalid PFM scale {scale}")));
    }
    let little_endian = scale < 0.0;
    // exactly one whitespace byte separates the header from the payload
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::Format("PFM header not terminated".into())),
    }
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("empty PFM image {width}x{height}")));
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(12))
        .ok_or_else(|| Error::Format("PFM dimensions overflow".into()))?;
    let payload = &bytes[cur.pos..];
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "PFM payload has {} bytes, expected {expected} for {width}x{height}",
            payload.len()
        )));
    }
    let mut pixels = vec![[0.0f64; 3]; width * height];
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        if v.is_nan() {
            return Err(Error::Format("NaN in PFM payload".into()));
        }
        if v.is_infinite() {
            return Err(Error::Format("infinite value in PFM payload".into()));
        }
        if v < 0.0 {
            return Err(Error::Format(format!("negative radiance {v} in PFM payload")));
        }
        let px = i / 3;
        let file_row = px / width;
        let col = px % width;
        let row = height - 1 - file_row;
        pixels[row * width + col][i % 3] = v as f64;
    }
    EquirectMap::new(height, width, pixels).map_err(|e| match e {
        Error::InvalidArgument(m) => Error::Format(m),
        other => other,
    })
}

pub fn read_pfm(path: impl AsRef<Path>) -> Result<EquirectMap> {
    decode_pfm(&fs::read(path)?)
}

/// Encodes a map as little-endian PFM; values are stored as f32.
pub fn encode_pfm(map: &EquirectMap) -> Result<Vec<u8>> {
    map.check_radiance()?;
    let (h, w) = (map.height(), map.width());
    let mut out = format!("PF\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(h * w * 12);
    for file_row in 0..h {
        let row = h - 1 - file_row;
        for col in 0..w {
            for v in map.pixel(row, col) {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn write_pfm(map: &EquirectMap, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pfm(map)?)?;
    Ok(())
}
