//! Data preparation and evaluation for depth-map super-resolution on
//! structured-light scans.
//!
//! A scan is a [`Sample`]: HR depth in millimeters, a grayscale texture, the
//! definition map of measured pixels and the camera intrinsics. Preparing a
//! sample fills its holes ([`prep`]), derives the LR input by
//! gradient-aware downsampling and extracts the object map above the ground
//! plane ([`scene`]). Predictions are scored with [`eval`] on depth and with
//! [`geom`] on point clouds. [`synth`] renders test scenes.

pub mod camera;
pub mod error;
pub mod eval;
pub mod geom;
pub mod io;
pub mod pipeline;
pub mod prep;
pub mod raster;
pub mod sample;
pub mod scene;
pub mod synth;
pub mod upsample;

pub use camera::CameraIntrinsics;
pub use error::{Error, Result};
pub use raster::{definition_map, DefinitionMap, DepthMap, IntensityMap, Mask, ObjectMap, UNDEFINED};
pub use sample::Sample;
