//! Grayscale portable float map (`Pf`).
//!
//! Rows are stored bottom to top. The sign of the scale field selects the
//! byte order: negative is little-endian, positive big-endian. We always
//! write little-endian with scale `-1.0`. Depth files encode an undefined
//! pixel as `0.0`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::DepthMap;

/// Raw float raster as stored in a PFM file.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatRaster {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r')
}

fn header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a str> {
    while *pos < bytes.len() && is_ws(bytes[*pos]) {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !is_ws(bytes[*pos]) {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::format("PFM", "truncated header"));
    }
    std::str::from_utf8(&bytes[start..*pos]).map_err(|_| Error::format("PFM", "non-ASCII header"))
}

pub fn decode(bytes: &[u8]) -> Result<FloatRaster> {
    let mut pos = 0;
    match header_token(bytes, &mut pos)? {
        "Pf" => {}
        "PF" => return Err(Error::format("PFM", "color PFM is not supported")),
        other => return Err(Error::format("PFM", format!("bad magic `{other}`"))),
    }
    let parse_dim = |tok: &str| -> Result<usize> {
        tok.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::format("PFM", format!("bad dimension `{tok}`")))
    };
    let width = parse_dim(header_token(bytes, &mut pos)?)?;
    let height = parse_dim(header_token(bytes, &mut pos)?)?;
    let scale_tok = header_token(bytes, &mut pos)?;
    let scale: f64 = scale_tok
        .parse()
        .ok()
        .filter(|s: &f64| s.is_finite() && *s != 0.0)
        .ok_or_else(|| Error::format("PFM", format!("bad scale `{scale_tok}`")))?;
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !is_ws(bytes[pos]) {
        return Err(Error::format("PFM", "missing raster data"));
    }
    pos += 1;

    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::format("PFM", "dimensions overflow"))?;
    let payload = &bytes[pos..];
    if payload.len() != count * 4 {
        return Err(Error::format(
            "PFM",
            format!(
                "expected {} payload bytes for {width}x{height}, found {}",
                count * 4,
                payload.len()
            ),
        ));
    }
    let little = scale < 0.0;
    let mut data = vec![0f32; count];
    for (file_row, chunk) in payload.chunks_exact(width * 4).enumerate() {
        let row = height - 1 - file_row;
        for (col, px) in chunk.chunks_exact(4).enumerate() {
            let raw = [px[0], px[1], px[2], px[3]];
            data[row * width + col] = if little {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
        }
    }
    Ok(FloatRaster {
        width,
        height,
        data,
    })
}

pub fn encode(raster: &FloatRaster) -> Vec<u8> {
    let mut out = format!("Pf\n{} {}\n-1.0\n", raster.width, raster.height).into_bytes();
    out.reserve(raster.data.len() * 4);
    for row in raster.data.chunks_exact(raster.width).rev() {
        for v in row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Decode a depth map; stored zeros become undefined pixels.
pub fn decode_depth(bytes: &[u8]) -> Result<DepthMap> {
    let FloatRaster {
        width,
        height,
        data,
    } = decode(bytes)?;
    let data = data
        .into_iter()
        .map(|v| if v == 0.0 { f32::NAN } else { v })
        .collect();
    DepthMap::new(width, height, data)
}

pub fn encode_depth(depth: &DepthMap) -> Vec<u8> {
    encode(&FloatRaster {
        width: depth.width(),
        height: depth.height(),
        data: depth
            .data()
            .iter()
            .map(|&v| if v.is_nan() { 0.0 } else { v })
            .collect(),
    })
}

pub fn read_depth(path: impl AsRef<Path>) -> Result<DepthMap> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_depth(&bytes).map_err(|e| e.at(path))
}

pub fn write_depth(path: impl AsRef<Path>, depth: &DepthMap) -> Result<()> {
    let path = path.as_ref();
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&encode_depth(depth)))
        .map_err(|e| Error::io(path, e))
}
