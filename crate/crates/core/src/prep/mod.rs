//! Dataset preparation: downsampling, hole labeling, hole filling and
//! texture augmentation.

mod downsample;
mod fill;
mod holes;

pub use downsample::{downsample, DEFAULT_TAU_MM};
pub use fill::{augment_texture, fill_depth, FillConfig};
pub use holes::{classify_holes, Connectivity, HoleLabeling};
