use serde::{Deserialize, Serialize};

use super::holes::{Connectivity, HoleLabeling};
use crate::error::{check_dims, Error, Result};
use crate::raster::{DefinitionMap, DepthMap, IntensityMap};

/// Hole filling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillConfig {
    /// Constant written into background holes, in millimeters.
    pub background_value_depth: f32,
    /// Constant written into background holes of the texture.
    pub background_value_intensity: f32,
    pub connectivity: Connectivity,
}

impl FillConfig {
    pub fn new(background_value_depth: f32, background_value_intensity: f32) -> Result<Self> {
        let cfg = Self {
            background_value_depth,
            background_value_intensity,
            connectivity: Connectivity::Four,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.background_value_depth.is_finite() && self.background_value_depth > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "background depth must be > 0, got {}",
                self.background_value_depth
            )));
        }
        if !(0.0..=1.0).contains(&self.background_value_intensity) {
            return Err(Error::InvalidParameter(format!(
                "background intensity must lie in [0, 1], got {}",
                self.background_value_intensity
            )));
        }
        Ok(())
    }
}

/// Fill holes in a row-major buffer in place.
///
/// Background holes take `background`. Every horizontal run of a near-object
/// hole takes the larger of the two originally defined pixels bounding it.
/// Only `labels == 0` pixels are read, so the order runs are visited in does
/// not matter.
fn fill_runs(values: &mut [f32], labeling: &HoleLabeling, background: f32) {
    let w = labeling.width();
    let labels = labeling.labels();
    for (row_vals, row_labels) in values.chunks_exact_mut(w).zip(labels.chunks_exact(w)) {
        let mut c = 0;
        while c < w {
            let id = row_labels[c];
            if id == 0 {
                c += 1;
                continue;
            }
            let start = c;
            while c < w && row_labels[c] != 0 {
                c += 1;
            }
            // [start, c) is a maximal undefined run; horizontally adjacent
            // pixels share a hole under either connectivity
            let fill = if labeling.is_background(id) {
                background
            } else {
                let left = (start > 0).then(|| row_vals[start - 1]);
                let right = (c < w).then(|| row_vals[c]);
                debug_assert!(left.is_some() && right.is_some(), "near-object run touches the border");
                match (left, right) {
                    (Some(a), Some(b)) => a.max(b),
                    (Some(v), None) | (None, Some(v)) => v,
                    (None, None) => background,
                }
            };
            row_vals[start..c].fill(fill);
        }
    }
}

fn check_labeling(labeling: &HoleLabeling, defined: impl Iterator<Item = bool>) -> Result<()> {
    let consistent = labeling
        .labels()
        .iter()
        .zip(defined)
        .all(|(&l, d)| (l == 0) == d);
    if !consistent {
        return Err(Error::InvalidParameter(
            "hole labeling does not match the undefined pixels".into(),
        ));
    }
    Ok(())
}

/// Produce a fully defined depth map. Defined pixels are copied unchanged.
pub fn fill_depth(depth: &DepthMap, labeling: &HoleLabeling, config: &FillConfig) -> Result<DepthMap> {
    config.validate()?;
    check_dims("hole labeling", depth.dims(), labeling.dims())?;
    check_labeling(labeling, depth.data().iter().map(|v| !v.is_nan()))?;
    let mut values = depth.data().to_vec();
    fill_runs(&mut values, labeling, config.background_value_depth);
    DepthMap::new(depth.width(), depth.height(), values)
}

/// Blank the texture wherever the depth is undefined, then refill those
/// pixels exactly like [`fill_depth`] does for depth.
pub fn augment_texture(
    intensity: &IntensityMap,
    definition: &DefinitionMap,
    labeling: &HoleLabeling,
    config: &FillConfig,
) -> Result<IntensityMap> {
    config.validate()?;
    check_dims("definition map", intensity.dims(), definition.dims())?;
    check_dims("hole labeling", intensity.dims(), labeling.dims())?;
    check_labeling(labeling, definition.data().iter().copied())?;
    let mut values: Vec<f32> = intensity
        .data()
        .iter()
        .zip(definition.data())
        .map(|(&v, &d)| if d { v } else { 0.0 })
        .collect();
    fill_runs(&mut values, labeling, config.background_value_intensity);
    IntensityMap::new(intensity.width(), intensity.height(), values)
}
