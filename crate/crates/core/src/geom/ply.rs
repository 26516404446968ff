//! Binary little-endian PLY with `float x y z` and optional
//! `uchar red green blue` vertex properties.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::Point3;

use super::{PointCloud, Rgb};
use crate::error::{Error, Result};

fn to_u8(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn write_ply_to(mut out: impl Write, cloud: &PointCloud) -> std::io::Result<()> {
    let colors = cloud.colors.as_deref();
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n",
        cloud.len()
    )?;
    if colors.is_some() {
        out.write_all(b"property uchar red\nproperty uchar green\nproperty uchar blue\n")?;
    }
    out.write_all(b"end_header\n")?;
    for (i, p) in cloud.points.iter().enumerate() {
        for v in [p.x, p.y, p.z] {
            out.write_all(&(v as f32).to_le_bytes())?;
        }
        if let Some(c) = colors {
            out.write_all(&c[i].map(to_u8))?;
        }
    }
    out.flush()
}

pub fn write_ply(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    let path = path.as_ref();
    cloud.validate()?;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_ply_to(BufWriter::new(file), cloud).map_err(|e| Error::io(path, e))
}

/// Read a PLY file in the layout written by [`write_ply`].
pub fn read_ply_from(input: impl Read) -> Result<PointCloud> {
    let bad = |m: &str| Error::format("PLY", m.to_string());
    let mut reader = BufReader::new(input);
    let mut count = None;
    let mut props = Vec::new();
    let mut line = String::new();
    let mut first = true;
    loop {
        line.clear();
        if reader.read_line(&mut line).map_err(|e| bad(&e.to_string()))? == 0 {
            return Err(bad("unexpected end of header"));
        }
        let l = line.trim_end();
        if first {
            if l != "ply" {
                return Err(bad("missing `ply` magic"));
            }
            first = false;
            continue;
        }
        let tok: Vec<&str> = l.split_whitespace().collect();
        match tok.as_slice() {
            ["format", "binary_little_endian", "1.0"] => {}
            ["format", ..] => return Err(bad("only binary_little_endian 1.0 is supported")),
            ["element", "vertex", n] => count = Some(n.parse::<usize>().map_err(|_| bad("bad vertex count"))?),
            ["property", ty, name] => props.push((ty.to_string(), name.to_string())),
            ["comment", ..] | [] => {}
            ["end_header"] => break,
            _ => return Err(bad(&format!("unsupported header line `{l}`"))),
        }
    }
    let count = count.ok_or_else(|| bad("no vertex element"))?;
    let xyz = props.len() >= 3
        && props[..3]
            .iter()
            .zip(["x", "y", "z"])
            .all(|((t, n), e)| t == "float" && n == e);
    let has_color = match props.len() {
        3 => false,
        6 => props[3..]
            .iter()
            .zip(["red", "green", "blue"])
            .all(|((t, n), e)| t == "uchar" && n == e),
        _ => false,
    };
    if !xyz || (props.len() != 3 && !has_color) {
        return Err(bad("expected float x y z with optional uchar red green blue"));
    }
    let stride = if has_color { 15 } else { 12 };
    let mut body = Vec::new();
    reader.read_to_end(&mut body).map_err(|e| bad(&e.to_string()))?;
    if body.len() != count * stride {
        return Err(bad("vertex data length does not match the header"));
    }
    let mut points = Vec::with_capacity(count);
    let mut colors: Vec<Rgb> = Vec::new();
    for rec in body.chunks_exact(stride) {
        let f = |o: usize| f64::from(f32::from_le_bytes([rec[o], rec[o + 1], rec[o + 2], rec[o + 3]]));
        points.push(Point3::new(f(0), f(4), f(8)));
        if has_color {
            colors.push([rec[12], rec[13], rec[14]].map(|b| f32::from(b) / 255.0));
        }
    }
    Ok(PointCloud {
        points,
        colors: has_color.then_some(colors),
        source_index: None,
    })
}

pub fn read_ply(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_ply_from(file).map_err(|e| e.at(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_colors() {
        let cloud = PointCloud {
            points: vec![Point3::new(1.5, -2.0, 300.25), Point3::new(0.0, 0.0, 1.0)],
            colors: Some(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]]),
            source_index: None,
        };
        let mut buf = Vec::new();
        write_ply_to(&mut buf, &cloud).unwrap();
        assert!(buf.starts_with(b"ply\nformat binary_little_endian 1.0\nelement vertex 2\n"));
        assert_eq!(read_ply_from(buf.as_slice()).unwrap(), cloud);
    }

    #[test]
    fn plain_xyz() {
        let cloud = PointCloud::from_points(vec![Point3::new(1.0, 2.0, 3.0)]);
        let mut buf = Vec::new();
        write_ply_to(&mut buf, &cloud).unwrap();
        let header_len = buf.len() - 12;
        assert!(std::str::from_utf8(&buf[..header_len]).unwrap().ends_with("end_header\n"));
        assert_eq!(read_ply_from(buf.as_slice()).unwrap(), cloud);
    }

    #[test]
    fn rejects_ascii() {
        let text = b"ply\nformat ascii 1.0\nelement vertex 0\nend_header\n";
        assert!(read_ply_from(&text[..]).is_err());
    }
}
