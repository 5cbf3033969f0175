//! Portable float maps (PFM) and 16-bit binary graymaps (PGM).

use std::path::Path;

use symnorm_core::render::{LabelMap, NormalMap};
use symnorm_core::Vec3;

use crate::error::{Error, Result};

/// Interleaved `f32` image, rows stored top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    /// Width in pixels.
    pub width: usize,
    /// Height in pixels.
    pub height: usize,
    /// 1 (grey) or 3 (color).
    pub channels: usize,
    /// `width * height * channels` samples.
    pub data: Vec<f32>,
}

/// Encodes a PFM: little-endian (scale −1.0), bottom row first.
pub fn write_pfm(img: &FloatImage) -> Vec<u8> {
    let magic = if img.channels == 3 { "PF" } else { "Pf" };
    let mut out = format!("{magic}\n{} {}\n-1.0\n", img.width, img.height).into_bytes();
    let row = img.width * img.channels;
    out.reserve(img.data.len() * 4);
    for r in (0..img.height).rev() {
        for v in &img.data[r * row..(r + 1) * row] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Decodes a PFM of either byte order.
pub fn read_pfm(bytes: &[u8], path: &Path) -> Result<FloatImage> {
    let mut header = Header::new(bytes);
    let channels = match header.token(path)? {
        "PF" => 3,
        "Pf" => 1,
        m => return Err(Error::format(path, format!("not a PFM (magic `{m}`)"))),
    };
    let width = header.number::<usize>(path)?;
    let height = header.number::<usize>(path)?;
    let scale = header.number::<f32>(path)?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::format(path, "PFM scale must be finite and nonzero"));
    }
    let raster = header.raster(path)?;
    let count = width * height * channels;
    if raster.len() != count * 4 {
        return Err(Error::format(path, format!("expected {} data bytes, found {}", count * 4, raster.len())));
    }
    let decode = |b: &[u8]| {
        let b = [b[0], b[1], b[2], b[3]];
        if scale < 0.0 { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) }
    };
    let row = width * channels;
    let mut data = vec![0.0f32; count];
    for (k, chunk) in raster.chunks_exact(4).enumerate() {
        let (file_row, col) = (k / row.max(1), k % row.max(1));
        data[(height - 1 - file_row) * row + col] = decode(chunk);
    }
    Ok(FloatImage { width, height, channels, data })
}

/// Encodes 16-bit labels as binary PGM (P5, maxval 65535, big-endian).
pub fn write_pgm16(width: usize, height: usize, labels: &[u16]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    out.reserve(labels.len() * 2);
    for l in labels {
        out.extend_from_slice(&l.to_be_bytes());
    }
    out
}

/// Decodes a binary PGM into `(width, height, samples)`; 8-bit files are
/// widened.
pub fn read_pgm(bytes: &[u8], path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    let mut header = Header::new(bytes);
    if header.token(path)? != "P5" {
        return Err(Error::format(path, "not a binary PGM (P5)"));
    }
    let width = header.number::<usize>(path)?;
    let height = header.number::<usize>(path)?;
    let maxval = header.number::<u32>(path)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(path, format!("unsupported maxval {maxval}")));
    }
    let raster = header.raster(path)?;
    let wide = maxval > 255;
    let bytes_per = if wide { 2 } else { 1 };
    if raster.len() != width * height * bytes_per {
        return Err(Error::format(
            path,
            format!("expected {} data bytes, found {}", width * height * bytes_per, raster.len()),
        ));
    }
    let samples = if wide {
        raster.chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]])).collect()
    } else {
        raster.iter().map(|&b| b as u16).collect()
    };
    Ok((width, height, samples))
}

// Whitespace-separated PNM header with `#` comments, followed by exactly one
// whitespace byte before the raster.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Header { bytes, pos: 0 }
    }

    fn token(&mut self, path: &Path) -> Result<&'a str> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.bytes.get(self.pos) == Some(&b'#') {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::format(path, "truncated header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| Error::format(path, "header is not ASCII"))
    }

    fn number<T: std::str::FromStr>(&mut self, path: &Path) -> Result<T> {
        let tok = self.token(path)?;
        tok.parse().map_err(|_| Error::format(path, format!("bad header value `{tok}`")))
    }

    fn raster(&self, path: &Path) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(Error::format(path, "missing whitespace after header")),
        }
    }
}

/// Normals as a 3-channel image and depth as a 1-channel image. Background
/// pixels hold zero normals and infinite depth.
pub fn normal_map_to_images(nm: &NormalMap) -> (FloatImage, FloatImage) {
    let normals = nm.normals().iter().flat_map(|n| [n.x as f32, n.y as f32, n.z as f32]).collect();
    let depth = nm.depth().iter().map(|&d| d as f32).collect();
    let (width, height) = (nm.width(), nm.height());
    (
        FloatImage { width, height, channels: 3, data: normals },
        FloatImage { width, height, channels: 1, data: depth },
    )
}

/// Rebuilds a normal map from its images; zero normals are background.
pub fn normal_map_from_images(normals: &FloatImage, depth: Option<&FloatImage>, path: &Path) -> Result<NormalMap> {
    if normals.channels != 3 {
        return Err(Error::format(path, "normal maps need a 3-channel PFM"));
    }
    let vectors = normals
        .data
        .chunks_exact(3)
        .map(|c| Vec3::new(c[0] as f64, c[1] as f64, c[2] as f64))
        .collect();
    let depth = match depth {
        Some(d) => {
            if d.channels != 1 || d.width != normals.width || d.height != normals.height {
                return Err(Error::format(path, "depth image does not match the normal image"));
            }
            Some(d.data.iter().map(|&v| v as f64).collect())
        }
        None => None,
    };
    NormalMap::from_normals(normals.width, normals.height, vectors, depth)
        .map_err(|e| Error::format(path, e.to_string()))
}

/// Decodes a label PGM against a codebook of `k` bins.
pub fn label_map_from_pgm(bytes: &[u8], k: usize, path: &Path) -> Result<LabelMap> {
    let (w, h, labels) = read_pgm(bytes, path)?;
    LabelMap::new(w, h, k, labels).map_err(|e| Error::format(path, e.to_string()))
}
