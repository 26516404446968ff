use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pinhole intrinsics in pixels. Pixel `(row, col)` is centered at image
/// coordinates `(x = col, y = row)`; the camera looks along `+Z` with `+X`
/// to the right and `+Y` down.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self> {
        let k = Self { fx, fy, cx, cy };
        if !(fx.is_finite() && fx > 0.0 && fy.is_finite() && fy > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "focal lengths must be positive, got fx={fx}, fy={fy}"
            )));
        }
        if !(cx.is_finite() && cy.is_finite()) {
            return Err(Error::InvalidParameter(
                "principal point must be finite".into(),
            ));
        }
        Ok(k)
    }

    /// Intrinsics with the principal point at the raster center.
    pub fn centered(width: usize, height: usize, focal: f64) -> Result<Self> {
        Self::new(
            focal,
            focal,
            (width as f64 - 1.0) / 2.0,
            (height as f64 - 1.0) / 2.0,
        )
    }

    /// Check the principal point against a raster of the given size.
    pub fn validate_for(&self, width: usize, height: usize) -> Result<()> {
        Self::new(self.fx, self.fy, self.cx, self.cy)?;
        if !(0.0..width as f64).contains(&self.cx) || !(0.0..height as f64).contains(&self.cy) {
            return Err(Error::InvalidParameter(format!(
                "principal point ({}, {}) outside a {width}x{height} raster",
                self.cx, self.cy
            )));
        }
        Ok(())
    }

    /// Back-project pixel `(row, col)` with depth `z` into camera space.
    pub fn unproject(&self, row: f64, col: f64, z: f64) -> Point3<f64> {
        Point3::new((col - self.cx) * z / self.fx, (row - self.cy) * z / self.fy, z)
    }

    /// Ray direction through pixel `(row, col)`, scaled so that `z = 1`.
    pub fn ray(&self, row: f64, col: f64) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new((col - self.cx) / self.fx, (row - self.cy) / self.fy, 1.0)
    }

    /// Project a camera-space point to `(row, col)`; `None` behind the camera.
    pub fn project(&self, p: &Point3<f64>) -> Option<(f64, f64)> {
        (p.z > 0.0).then(|| {
            (
                self.fy * p.y / p.z + self.cy,
                self.fx * p.x / p.z + self.cx,
            )
        })
    }

    /// Intrinsics for the same camera viewing a raster downsampled by `s`.
    pub fn scaled_down(&self, s: usize) -> Self {
        let s = s as f64;
        // block (i, j) covers source pixels s*i .. s*i + s - 1, centered at s*i + (s - 1) / 2
        Self {
            fx: self.fx / s,
            fy: self.fy / s,
            cx: (self.cx - (s - 1.0) / 2.0) / s,
            cy: (self.cy - (s - 1.0) / 2.0) / s,
        }
    }
}
