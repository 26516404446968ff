//! On-disk formats.
//!
//! A sample directory holds:
//!
//! | file            | content                                           |
//! |-----------------|---------------------------------------------------|
//! | `depth_hr.pfm`  | HR depth, little-endian grayscale PFM, 0 = undefined |
//! | `intensity.png` | 16-bit grayscale texture                          |
//! | `definition.png`| 8-bit mask, 0 / 255                               |
//! | `object.png`    | 8-bit mask, 0 / 255 (prepared samples only)       |
//! | `depth_lr.pfm`  | filled LR depth (prepared samples only)           |
//! | `meta.json`     | `fx, fy, cx, cy, scale` and a `tags` object       |

pub mod pfm;
pub mod png;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::camera::CameraIntrinsics;
use crate::error::{Error, Result};
use crate::raster::{definition_map, DefinitionMap, ObjectMap};
use crate::sample::Sample;

pub const DEPTH_HR: &str = "depth_hr.pfm";
pub const INTENSITY: &str = "intensity.png";
pub const DEFINITION: &str = "definition.png";
pub const OBJECT: &str = "object.png";
pub const DEPTH_LR: &str = "depth_lr.pfm";
pub const META: &str = "meta.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub scale: usize,
    #[serde(default)]
    pub tags: BTreeMap<String, String>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::from(e).at(path))
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Load a sample directory. `definition.png` is optional for raw scans (it is
/// then derived from the depth); `object.png` and `depth_lr.pfm` are loaded
/// when present.
pub fn read_sample(dir: impl AsRef<Path>) -> Result<Sample> {
    let dir = dir.as_ref();
    let meta: Meta = read_json(dir.join(META))?;
    let hr_depth = pfm::read_depth(dir.join(DEPTH_HR))?;
    let intensity = png::read_intensity(dir.join(INTENSITY))?;

    let def_path = dir.join(DEFINITION);
    let definition = if def_path.exists() {
        DefinitionMap::from_mask(png::read_mask(&def_path)?)
    } else {
        definition_map(&hr_depth)
    };
    let obj_path = dir.join(OBJECT);
    let object_map = obj_path
        .exists()
        .then(|| png::read_mask(&obj_path).map(ObjectMap::from_mask))
        .transpose()?;
    let lr_path = dir.join(DEPTH_LR);
    let lr_depth = lr_path
        .exists()
        .then(|| pfm::read_depth(&lr_path))
        .transpose()?;

    let sample = Sample {
        hr_depth,
        intensity,
        definition,
        object_map,
        lr_depth,
        intrinsics: CameraIntrinsics {
            fx: meta.fx,
            fy: meta.fy,
            cx: meta.cx,
            cy: meta.cy,
        },
        scale: meta.scale,
        metadata: meta.tags,
    };
    sample.validate().map_err(|e| e.at(dir))?;
    Ok(sample)
}

/// Write a sample directory, creating it if needed. Optional rasters that are
/// absent from `sample` are removed from the directory.
pub fn write_sample(sample: &Sample, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    sample.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    pfm::write_depth(dir.join(DEPTH_HR), &sample.hr_depth)?;
    png::write_intensity(dir.join(INTENSITY), &sample.intensity)?;
    png::write_mask(dir.join(DEFINITION), &sample.definition)?;
    match &sample.object_map {
        Some(obj) => png::write_mask(dir.join(OBJECT), obj)?,
        None => remove_if_exists(&dir.join(OBJECT))?,
    }
    match &sample.lr_depth {
        Some(lr) => pfm::write_depth(dir.join(DEPTH_LR), lr)?,
        None => remove_if_exists(&dir.join(DEPTH_LR))?,
    }
    let k = sample.intrinsics;
    write_json(
        dir.join(META),
        &Meta {
            fx: k.fx,
            fy: k.fy,
            cx: k.cx,
            cy: k.cy,
            scale: sample.scale,
            tags: sample.metadata.clone(),
        },
    )
}

fn remove_if_exists(path: &Path) -> Result<()> {
    match std::fs::remove_file(path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(Error::io(path, e)),
        _ => Ok(()),
    }
}
