//! Point clouds computed from depth maps and the metrics evaluated on them.

mod kdtree;
mod outliers;
pub mod ply;

pub use kdtree::{squared_distance, KdTree};
pub use outliers::{mean_neighbor_distances, remove_outliers, OutlierParams, REMOVAL_SLACK};

use nalgebra::Point3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::CameraIntrinsics;
use crate::error::{check_dims, Error, Result};
use crate::raster::{DefinitionMap, DepthMap};

/// RGB color with channels in `[0, 1]`.
pub type Rgb = [f32; 3];

/// Camera-space points in millimeters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point3<f64>>,
    pub colors: Option<Vec<Rgb>>,
    /// `(row, col)` of the depth pixel each point came from.
    pub source_index: Option<Vec<(u32, u32)>>,
}

impl PointCloud {
    pub fn from_points(points: Vec<Point3<f64>>) -> Self {
        Self {
            points,
            colors: None,
            source_index: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if self.colors.as_ref().is_some_and(|c| c.len() != n)
            || self.source_index.as_ref().is_some_and(|s| s.len() != n)
        {
            return Err(Error::InvalidParameter(
                "per-point attributes must match the number of points".into(),
            ));
        }
        if self.points.iter().any(|p| !p.coords.iter().all(|v| v.is_finite())) {
            return Err(Error::InvalidParameter("point coordinates must be finite".into()));
        }
        Ok(())
    }

    /// Keep the points where `keep` is true, preserving order and attributes.
    pub fn retain_mask(&self, keep: &[bool]) -> Self {
        fn pick<T: Clone>(v: &[T], keep: &[bool]) -> Vec<T> {
            v.iter().zip(keep).filter(|(_, &k)| k).map(|(x, _)| x.clone()).collect()
        }
        Self {
            points: pick(&self.points, keep),
            colors: self.colors.as_deref().map(|c| pick(c, keep)),
            source_index: self.source_index.as_deref().map(|s| pick(s, keep)),
        }
    }
}

/// One point per pixel marked in `definition`, back-projected through the
/// pinhole model. Pixels marked defined whose depth is nevertheless undefined
/// produce no point.
pub fn unproject(
    depth: &DepthMap,
    definition: &DefinitionMap,
    intrinsics: &CameraIntrinsics,
) -> Result<PointCloud> {
    check_dims("definition map", depth.dims(), definition.dims())?;
    let mut points = Vec::new();
    let mut source = Vec::new();
    for r in 0..depth.height() {
        for c in 0..depth.width() {
            if let (true, Some(z)) = (definition.get(r, c), depth.get(r, c)) {
                points.push(intrinsics.unproject(r as f64, c as f64, f64::from(z)));
                source.push((r as u32, c as u32));
            }
        }
    }
    Ok(PointCloud {
        points,
        colors: None,
        source_index: Some(source),
    })
}

/// Summary of nearest-neighbor distances, in millimeters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub per_point: Vec<f64>,
}

impl DistanceStats {
    pub fn from_distances(per_point: Vec<f64>) -> Result<Self> {
        if per_point.is_empty() {
            return Err(Error::Empty("no distances".into()));
        }
        let min = per_point.iter().copied().fold(f64::INFINITY, f64::min);
        let max = per_point.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = per_point.iter().sum::<f64>() / per_point.len() as f64;
        Ok(Self {
            min,
            max,
            mean,
            per_point,
        })
    }

    /// The same statistics without the per-point list.
    pub fn summary(&self) -> Self {
        Self {
            per_point: Vec::new(),
            ..*self
        }
    }
}

/// Which direction(s) distances are measured in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Candidate points to their nearest reference point.
    #[default]
    OneSided,
    /// Both directions; `per_point` lists candidate distances first.
    Symmetric,
}

fn one_sided(candidate: &PointCloud, reference: &PointCloud) -> Result<Vec<f64>> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(Error::Empty("distance between empty point clouds".into()));
    }
    let tree = KdTree::new(&reference.points);
    Ok(candidate
        .points
        .par_iter()
        .map(|p| tree.nearest(p).expect("non-empty reference").0.sqrt())
        .collect())
}

/// Exact distance from every candidate point to its nearest reference point.
pub fn nn_distances(candidate: &PointCloud, reference: &PointCloud) -> Result<DistanceStats> {
    DistanceStats::from_distances(one_sided(candidate, reference)?)
}

/// Hausdorff-style statistics; the maximum is the Hausdorff distance.
pub fn hausdorff(candidate: &PointCloud, reference: &PointCloud, mode: DistanceMode) -> Result<DistanceStats> {
    match mode {
        DistanceMode::OneSided => nn_distances(candidate, reference),
        DistanceMode::Symmetric => {
            let mut d = one_sided(candidate, reference)?;
            d.extend(one_sided(reference, candidate)?);
            DistanceStats::from_distances(d)
        }
    }
}

/// Map distances onto a blue, green, red ramp; anything at or beyond
/// `threshold` is red.
pub fn color_by_distance(stats: &DistanceStats, threshold: f64) -> Vec<Rgb> {
    stats
        .per_point
        .iter()
        .map(|&d| distance_color(d, threshold))
        .collect()
}

pub fn distance_color(d: f64, threshold: f64) -> Rgb {
    if !(d < threshold) {
        return [1.0, 0.0, 0.0];
    }
    let u = (d.max(0.0) / threshold) as f32;
    if u <= 0.5 {
        [0.0, 2.0 * u, 1.0 - 2.0 * u]
    } else {
        [2.0 * u - 1.0, 2.0 - 2.0 * u, 0.0]
    }
}

pub const DEFAULT_COLOR_THRESHOLD_MM: f64 = 2.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unproject_principal_and_offset_pixels() {
        let k = CameraIntrinsics::new(100.0, 100.0, 1.0, 1.0).unwrap();
        let d = DepthMap::constant(3, 3, 500.0).unwrap();
        let def = DefinitionMap::new(3, 3, vec![true; 9]).unwrap();
        let cloud = unproject(&d, &def, &k).unwrap();
        assert_eq!(cloud.len(), 9);
        assert_eq!(cloud.points[4], Point3::new(0.0, 0.0, 500.0));
        assert_eq!(cloud.source_index.as_ref().unwrap()[4], (1, 1));

        let k = CameraIntrinsics::new(2.0, 2.0, 0.0, 0.0).unwrap();
        let cloud = unproject(&d, &def, &k).unwrap();
        // pixel (row 0, col 2) = (cx + fx, cy)
        assert_eq!(cloud.points[2], Point3::new(500.0, 0.0, 500.0));
    }

    #[test]
    fn unproject_empty() {
        let k = CameraIntrinsics::centered(3, 3, 10.0).unwrap();
        let d = DepthMap::constant(3, 3, 500.0).unwrap();
        let def = DefinitionMap::new(3, 3, vec![false; 9]).unwrap();
        assert!(unproject(&d, &def, &k).unwrap().is_empty());
    }

    #[test]
    fn self_distance_is_zero() {
        let c = PointCloud::from_points(vec![Point3::new(0.0, 1.0, 2.0), Point3::new(3.0, 1.0, 0.0)]);
        let s = nn_distances(&c, &c).unwrap();
        assert_eq!((s.min, s.max, s.mean), (0.0, 0.0, 0.0));
        assert!(nn_distances(&c, &PointCloud::default()).is_err());
    }

    #[test]
    fn symmetric_mode_covers_both_sides() {
        let a = PointCloud::from_points(vec![Point3::new(0.0, 0.0, 0.0)]);
        let b = PointCloud::from_points(vec![Point3::new(0.0, 0.0, 0.0), Point3::new(10.0, 0.0, 0.0)]);
        assert_eq!(hausdorff(&a, &b, DistanceMode::OneSided).unwrap().max, 0.0);
        let s = hausdorff(&a, &b, DistanceMode::Symmetric).unwrap();
        assert_eq!(s.max, 10.0);
        assert_eq!(s.per_point, vec![0.0, 0.0, 10.0]);
    }

    #[test]
    fn color_ramp() {
        assert_eq!(distance_color(0.0, 2.0), [0.0, 0.0, 1.0]);
        assert_eq!(distance_color(1.0, 2.0), [0.0, 1.0, 0.0]);
        assert_eq!(distance_color(2.0, 2.0), [1.0, 0.0, 0.0]);
        assert_eq!(distance_color(5.0, 2.0), [1.0, 0.0, 0.0]);
        assert_eq!(distance_color(1.5, 2.0), [0.5, 0.5, 0.0]);
        assert_eq!(distance_color(0.5, 2.0), [0.0, 0.5, 0.5]);
    }

    #[test]
    fn retain_keeps_attributes() {
        let mut c = PointCloud::from_points(vec![Point3::origin(), Point3::new(1.0, 0.0, 0.0)]);
        c.source_index = Some(vec![(0, 0), (0, 1)]);
        let kept = c.retain_mask(&[false, true]);
        assert_eq!(kept.points, vec![Point3::new(1.0, 0.0, 0.0)]);
        assert_eq!(kept.source_index, Some(vec![(0, 1)]));
    }
}
