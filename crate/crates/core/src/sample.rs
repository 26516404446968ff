use std::collections::BTreeMap;

use crate::camera::CameraIntrinsics;
use crate::error::{check_dims, Error, Result};
use crate::raster::{DefinitionMap, DepthMap, IntensityMap, ObjectMap};

/// One scan together with everything derived from it.
///
/// A raw sample carries the HR depth (with undefined pixels), its intensity
/// texture and definition map. A prepared sample additionally holds the
/// object map and the filled LR depth, and its `hr_depth` has been filled.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub hr_depth: DepthMap,
    pub intensity: IntensityMap,
    pub definition: DefinitionMap,
    pub object_map: Option<ObjectMap>,
    pub lr_depth: Option<DepthMap>,
    pub intrinsics: CameraIntrinsics,
    pub scale: usize,
    pub metadata: BTreeMap<String, String>,
}

impl Sample {
    pub fn dims(&self) -> (usize, usize) {
        self.hr_depth.dims()
    }

    /// Check every cross-field invariant.
    pub fn validate(&self) -> Result<()> {
        let dims = self.dims();
        check_dims("intensity", dims, self.intensity.dims())?;
        check_dims("definition map", dims, self.definition.dims())?;
        if let Some(obj) = &self.object_map {
            check_dims("object map", dims, obj.dims())?;
            if !obj.is_subset_of(&self.definition) {
                return Err(Error::InvalidRaster(
                    "object map marks pixels that are not defined".into(),
                ));
            }
        }
        let (w, h) = dims;
        if self.scale == 0 || w % self.scale != 0 || h % self.scale != 0 {
            return Err(Error::InvalidParameter(format!(
                "scale {} does not divide {w}x{h}",
                self.scale
            )));
        }
        if let Some(lr) = &self.lr_depth {
            check_dims("LR depth", (w / self.scale, h / self.scale), lr.dims())?;
        }
        // a pixel undefined in the depth must be undefined in the definition map
        if let Some(i) = (0..w * h).find(|&i| !self.hr_depth.is_defined_at(i) && self.definition.data()[i]) {
            return Err(Error::InvalidRaster(format!(
                "pixel ({}, {}) is undefined in the depth but marked defined",
                i / w,
                i % w
            )));
        }
        self.intrinsics.validate_for(w, h)
    }
}
