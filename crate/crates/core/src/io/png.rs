//! Grayscale PNG encoding for intensity textures (16-bit) and binary masks
//! (8-bit, 0 or 255).

use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{intensity_to_u16, u16_to_intensity, IntensityMap, Mask};

fn encode_gray(width: usize, height: usize, depth: png::BitDepth, bytes: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(depth);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::format("PNG", e.to_string()))?;
        writer
            .write_image_data(bytes)
            .map_err(|e| Error::format("PNG", e.to_string()))?;
    }
    Ok(out)
}

struct Gray {
    width: usize,
    height: usize,
    bit_depth: png::BitDepth,
    bytes: Vec<u8>,
}

fn decode_gray(bytes: &[u8]) -> Result<Gray> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::format("PNG", e.to_string()))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale {
        return Err(Error::format(
            "PNG",
            format!("expected grayscale, found {:?}", info.color_type),
        ));
    }
    let (width, height, bit_depth) = (info.width as usize, info.height as usize, info.bit_depth);
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::format("PNG", "image too large"))?;
    let mut buf = vec![0; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::format("PNG", e.to_string()))?;
    buf.truncate(frame.buffer_size());
    Ok(Gray {
        width,
        height,
        bit_depth,
        bytes: buf,
    })
}

pub fn encode_intensity(map: &IntensityMap) -> Result<Vec<u8>> {
    let bytes: Vec<u8> = map
        .data()
        .iter()
        .flat_map(|&v| intensity_to_u16(v).to_be_bytes())
        .collect();
    encode_gray(map.width(), map.height(), png::BitDepth::Sixteen, &bytes)
}

/// Decode an 8- or 16-bit grayscale PNG, mapping the full code range onto
/// `[0, 1]`.
pub fn decode_intensity(bytes: &[u8]) -> Result<IntensityMap> {
    let g = decode_gray(bytes)?;
    let data = match g.bit_depth {
        png::BitDepth::Sixteen => g
            .bytes
            .chunks_exact(2)
            .map(|b| u16_to_intensity(u16::from_be_bytes([b[0], b[1]])))
            .collect(),
        png::BitDepth::Eight => g.bytes.iter().map(|&b| f32::from(b) / 255.0).collect(),
        other => {
            return Err(Error::format(
                "PNG",
                format!("unsupported intensity bit depth {other:?}"),
            ))
        }
    };
    IntensityMap::new(g.width, g.height, data)
}

pub fn encode_mask(mask: &Mask) -> Result<Vec<u8>> {
    let bytes: Vec<u8> = mask.data().iter().map(|&b| if b { 255 } else { 0 }).collect();
    encode_gray(mask.width(), mask.height(), png::BitDepth::Eight, &bytes)
}

pub fn decode_mask(bytes: &[u8]) -> Result<Mask> {
    let g = decode_gray(bytes)?;
    if g.bit_depth != png::BitDepth::Eight {
        return Err(Error::format(
            "PNG",
            format!("mask must be 8-bit, found {:?}", g.bit_depth),
        ));
    }
    let data = g
        .bytes
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            255 => Ok(true),
            v => Err(Error::format("PNG", format!("mask value {v} is not 0 or 255"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Mask::new(g.width, g.height, data)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_intensity(path: impl AsRef<Path>) -> Result<IntensityMap> {
    let path = path.as_ref();
    decode_intensity(&read_bytes(path)?).map_err(|e| e.at(path))
}

pub fn write_intensity(path: impl AsRef<Path>, map: &IntensityMap) -> Result<()> {
    let path = path.as_ref();
    write_bytes(path, &encode_intensity(map)?)
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    decode_mask(&read_bytes(path)?).map_err(|e| e.at(path))
}

pub fn write_mask(path: impl AsRef<Path>, mask: &Mask) -> Result<()> {
    let path = path.as_ref();
    write_bytes(path, &encode_mask(mask)?)
}
