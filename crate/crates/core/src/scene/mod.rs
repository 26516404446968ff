//! Ground-plane extraction and object maps.
//!
//! Scenes hold a single object resting on a flat ground that fills most of
//! the frame. The ground plane is recovered from three cells of a coarse
//! depth grid (see [`select_plane_vertices`]); every defined pixel lying far
//! enough above that plane belongs to the object.

mod grid;
mod plane;
mod vertices;

pub use grid::{grid_reduce, ReducedGrid};
pub use plane::{fit_plane, Plane};
pub use vertices::{select_plane_vertices, GridCoord, PlaneVertices};

use serde::{Deserialize, Serialize};

use crate::camera::CameraIntrinsics;
use crate::error::{check_dims, Error, Result};
use crate::raster::{DefinitionMap, DepthMap, ObjectMap};
use crate::upsample::remask;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlaneSearchConfig {
    pub grid_w: usize,
    pub grid_h: usize,
    /// Share of cells, ranked by squared deviation from the mean, that sets
    /// the near-mean threshold.
    pub near_mean_fraction: f64,
    /// Share of cells, ranked by depth, forming the far group.
    pub far_fraction: f64,
    /// Minimum height above the plane for an object pixel, in millimeters.
    pub object_margin_epsilon: f64,
}

impl Default for PlaneSearchConfig {
    fn default() -> Self {
        Self {
            grid_w: 20,
            grid_h: 20,
            near_mean_fraction: 0.05,
            far_fraction: 0.02,
            object_margin_epsilon: 3.0,
        }
    }
}

impl PlaneSearchConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        unit("near_mean_fraction", self.near_mean_fraction)?;
        unit("far_fraction", self.far_fraction)?;
        if self.grid_w < 2 || self.grid_h == 0 || self.grid_w * self.grid_h < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 columns and 3 cells, got {}x{}",
                self.grid_w, self.grid_h
            )));
        }
        if !(self.object_margin_epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "object margin must be > 0, got {}",
                self.object_margin_epsilon
            )));
        }
        Ok(())
    }
}

/// Mark defined pixels that lie strictly more than `epsilon` millimeters above
/// `plane` on the camera side.
pub fn object_map(
    depth: &DepthMap,
    definition: &DefinitionMap,
    plane: &Plane,
    intrinsics: &CameraIntrinsics,
    epsilon: f64,
) -> Result<ObjectMap> {
    check_dims("definition map", depth.dims(), definition.dims())?;
    let (w, h) = depth.dims();
    let mut data = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let inside = definition.get(r, c)
                && depth.get(r, c).is_some_and(|z| {
                    let p = intrinsics.unproject(r as f64, c as f64, f64::from(z));
                    plane.height(&p) > epsilon
                });
            data.push(inside);
        }
    }
    ObjectMap::new(w, h, data)
}

/// Estimate the ground plane of a scan and derive its object map.
///
/// `depth` may be filled; the grid search only looks at pixels that
/// `definition` marks as measured, so filled values never pick a vertex.
pub fn extract_object_map(
    depth: &DepthMap,
    definition: &DefinitionMap,
    intrinsics: &CameraIntrinsics,
    config: &PlaneSearchConfig,
) -> Result<(ObjectMap, Plane)> {
    let measured = remask(depth, definition)?;
    let grid = grid_reduce(&measured, config)?;
    let v = select_plane_vertices(&grid.depth, config)?;
    let point = |g: GridCoord| {
        let idx = g.row * config.grid_w + g.col;
        let (r, c) = grid.sources[idx].expect("selected cells are defined");
        intrinsics.unproject(r as f64, c as f64, f64::from(grid.depth.data()[idx]))
    };
    let plane = fit_plane(point(v.a), point(v.b), point(v.c))?;
    let map = object_map(depth, definition, &plane, intrinsics, config.object_margin_epsilon)?;
    Ok((map, plane))
}
