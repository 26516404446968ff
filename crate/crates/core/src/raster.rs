//! Raster containers for depth, intensity and binary masks.
//!
//! All rasters are row-major and immutable once built. Depth is stored as
//! `f32` millimeters with `NaN` marking an undefined pixel; every other value
//! must be finite and strictly positive.

use std::ops::Deref;

use crate::error::{check_dims, Error, Result};

/// In-memory marker for an undefined depth pixel.
pub const UNDEFINED: f32 = f32::NAN;

fn check_len(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidRaster(format!(
            "dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::InvalidRaster(format!(
            "data length {len} does not match {width}x{height}"
        )));
    }
    Ok(())
}

/// Dense depth raster in millimeters.
#[derive(Clone, Debug)]
pub struct DepthMap {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl DepthMap {
    /// Build a depth map, checking the length and that every value is either
    /// undefined (`NaN`) or a finite depth above zero.
    pub fn new(width: usize, height: usize, mut data: Vec<f32>) -> Result<Self> {
        check_len(width, height, data.len())?;
        for (i, v) in data.iter_mut().enumerate() {
            if v.is_nan() {
                *v = UNDEFINED;
            } else if !v.is_finite() || *v <= 0.0 {
                return Err(Error::InvalidRaster(format!(
                    "depth at ({}, {}) is {v}; expected a finite value > 0 mm or undefined",
                    i / width,
                    i % width
                )));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn constant(width: usize, height: usize, value: f32) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn undefined(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![UNDEFINED; width * height])
    }

    /// Build from a per-pixel function of `(row, col)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    /// Raw stored value, `NaN` when undefined.
    pub fn value(&self, row: usize, col: usize) -> f32 {
        self.data[row * self.width + col]
    }

    /// The depth at `(row, col)`, or `None` when undefined.
    pub fn get(&self, row: usize, col: usize) -> Option<f32> {
        let v = self.value(row, col);
        (!v.is_nan()).then_some(v)
    }

    pub fn is_defined_at(&self, index: usize) -> bool {
        !self.data[index].is_nan()
    }

    pub fn defined_count(&self) -> usize {
        self.data.iter().filter(|v| !v.is_nan()).count()
    }

    pub fn is_fully_defined(&self) -> bool {
        self.data.iter().all(|v| !v.is_nan())
    }

    /// Largest defined depth, if any.
    pub fn max_defined(&self) -> Option<f32> {
        self.data
            .iter()
            .copied()
            .filter(|v| !v.is_nan())
            .reduce(f32::max)
    }

    /// Map every defined value through `f`, keeping undefined pixels.
    pub fn map_defined(&self, mut f: impl FnMut(f32) -> f32) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|&v| if v.is_nan() { v } else { f(v) })
            .collect();
        Self::new(self.width, self.height, data)
    }
}

/// Bit-exact comparison; undefined pixels compare equal to each other.
impl PartialEq for DepthMap {
    fn eq(&self, other: &Self) -> bool {
        self.dims() == other.dims()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Grayscale intensity texture normalized to `[0, 1]`.
#[derive(Clone, Debug)]
pub struct IntensityMap {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl IntensityMap {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        check_len(width, height, data.len())?;
        if let Some((i, v)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::InvalidRaster(format!(
                "intensity at ({}, {}) is {v}; expected a value in [0, 1]",
                i / width,
                i % width
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn value(&self, row: usize, col: usize) -> f32 {
        self.data[row * self.width + col]
    }

    pub fn max_value(&self) -> f32 {
        self.data.iter().copied().fold(0.0, f32::max)
    }

    /// Snap every value onto the 16-bit grid used by the on-disk format, so
    /// that writing and reading back is lossless.
    pub fn quantized(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| quantize_u16(v)).collect(),
        }
    }
}

impl PartialEq for IntensityMap {
    fn eq(&self, other: &Self) -> bool {
        self.dims() == other.dims()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

pub(crate) fn intensity_to_u16(v: f32) -> u16 {
    (f64::from(v) * 65535.0).round().clamp(0.0, 65535.0) as u16
}

pub(crate) fn u16_to_intensity(v: u16) -> f32 {
    f32::from(v) / 65535.0
}

pub(crate) fn quantize_u16(v: f32) -> f32 {
    u16_to_intensity(intensity_to_u16(v))
}

/// Row-major binary raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_len(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col]
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Intersection-over-union with another mask of the same size. Two empty
    /// masks have IoU 1.
    pub fn iou(&self, other: &Mask) -> Result<f64> {
        check_dims("mask", self.dims(), other.dims())?;
        let (mut inter, mut union) = (0usize, 0usize);
        for (&a, &b) in self.data.iter().zip(&other.data) {
            inter += usize::from(a && b);
            union += usize::from(a || b);
        }
        Ok(if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        })
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.dims() == other.dims() && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }
}

macro_rules! mask_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq)]
        pub struct $name(Mask);

        impl $name {
            pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
                Mask::new(width, height, data).map(Self)
            }

            pub fn from_mask(mask: Mask) -> Self {
                Self(mask)
            }

            pub fn into_mask(self) -> Mask {
                self.0
            }
        }

        impl Deref for $name {
            type Target = Mask;

            fn deref(&self) -> &Mask {
                &self.0
            }
        }
    };
}

mask_newtype!(
    /// Which depth pixels held a measurement before any filling.
    DefinitionMap
);
mask_newtype!(
    /// Pixels that belong to the scanned object rather than the ground.
    ObjectMap
);

/// Mark every pixel of `depth` that is not undefined.
pub fn definition_map(depth: &DepthMap) -> DefinitionMap {
    DefinitionMap(Mask {
        width: depth.width(),
        height: depth.height(),
        data: depth.data().iter().map(|v| !v.is_nan()).collect(),
    })
}
