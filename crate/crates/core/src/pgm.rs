//! Binary (P5) PGM input/output with fixed byte semantics.
//!
//! Probability maps are stored with maxval 255: a probability `p` is written
//! as `round(p * 255)` and a stored byte `b` reads back as exactly `b / 255`.
//! Binary masks write 255/0 and read back as `byte >= 128`. Headers tolerate
//! `#` comments and arbitrary whitespace between tokens; exactly one
//! whitespace byte separates the maxval from the raster data.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use crate::raster::{BinaryMask, PixelCoord, ProbabilityMap};
use crate::{Error, Result};

const MAXVAL: u32 = 255;

/// Reads the header tokens (magic, width, height, maxval) and leaves the
/// reader positioned at the first raster byte.
fn read_header(bytes: &[u8]) -> Result<(usize, usize, usize)> {
    let mut pos = 0usize;
    let mut token = |expect_name: &str| -> Result<String> {
        // Skip whitespace and comments.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Pgm(format!("missing {expect_name} in header")));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = token("magic number")?;
    if magic != "P5" {
        return Err(Error::Pgm(format!("expected magic P5, got {magic:?}")));
    }
    let width: usize = token("width")?
        .parse()
        .map_err(|_| Error::Pgm("width is not a number".into()))?;
    let height: usize = token("height")?
        .parse()
        .map_err(|_| Error::Pgm("height is not a number".into()))?;
    let maxval: u32 = token("maxval")?
        .parse()
        .map_err(|_| Error::Pgm("maxval is not a number".into()))?;
    if maxval != MAXVAL {
        return Err(Error::Pgm(format!("unsupported maxval {maxval}, expected {MAXVAL}")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Pgm(format!("degenerate dimensions {width}x{height}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Pgm("missing whitespace after maxval".into()));
    }
    pos += 1;
    Ok((width, height, pos))
}

fn read_raster(bytes: &[u8]) -> Result<(usize, usize, &[u8])> {
    let (width, height, start) = read_header(bytes)?;
    let need = width * height;
    let raster = &bytes[start..];
    if raster.len() < need {
        return Err(Error::Pgm(format!(
            "raster truncated: need {need} bytes, got {}",
            raster.len()
        )));
    }
    Ok((width, height, &raster[..need]))
}

/// Decodes a probability map from PGM bytes; each byte `b` becomes `b / 255`.
pub fn probability_from_bytes(bytes: &[u8]) -> Result<ProbabilityMap> {
    let (width, height, raster) = read_raster(bytes)?;
    let data = raster.iter().map(|&b| b as f64 / MAXVAL as f64).collect();
    Ok(ProbabilityMap::from_vec(width, height, data))
}

/// Decodes a binary mask from PGM bytes; a byte is true iff `>= 128`.
pub fn mask_from_bytes(bytes: &[u8]) -> Result<BinaryMask> {
    let (width, height, raster) = read_raster(bytes)?;
    let mut mask = BinaryMask::new(width, height);
    for (i, &b) in raster.iter().enumerate() {
        if b >= 128 {
            mask.set(PixelCoord::new(i / width, i % width), true);
        }
    }
    Ok(mask)
}

/// Encodes a probability map as PGM bytes; each value is `round(p * 255)`.
pub fn probability_to_bytes(map: &ProbabilityMap) -> Vec<u8> {
    let mut out = header_bytes(map.width(), map.height());
    out.extend(
        map.values()
            .iter()
            .map(|&p| (p.clamp(0.0, 1.0) * MAXVAL as f64).round() as u8),
    );
    out
}

/// Encodes a binary mask as PGM bytes (255 for true, 0 for false).
pub fn mask_to_bytes(mask: &BinaryMask) -> Vec<u8> {
    let mut out = header_bytes(mask.width(), mask.height());
    let total = mask.width() * mask.height();
    let mut data = vec![0u8; total];
    for p in mask.iter_true() {
        data[p.row * mask.width() + p.col] = 255;
    }
    out.extend(data);
    out
}

fn header_bytes(width: usize, height: usize) -> Vec<u8> {
    format!("P5\n{width} {height}\n{MAXVAL}\n").into_bytes()
}

/// Writes `bytes` to `path` atomically: the data lands in a sibling temp file
/// that is renamed over the target, so readers never observe a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension(format!(
        "{}tmp{}",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

pub fn load_probability_map(path: &Path) -> Result<ProbabilityMap> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    probability_from_bytes(&bytes)
}

pub fn load_mask(path: &Path) -> Result<BinaryMask> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    mask_from_bytes(&bytes)
}

pub fn save_probability_map(path: &Path, map: &ProbabilityMap) -> Result<()> {
    Ok(atomic_write(path, &probability_to_bytes(map))?)
}

pub fn save_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    Ok(atomic_write(path, &mask_to_bytes(mask))?)
}
