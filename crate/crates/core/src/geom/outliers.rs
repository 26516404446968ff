use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{KdTree, PointCloud};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutlierParams {
    pub k_neighbors: usize,
    pub std_ratio: f64,
}

impl Default for OutlierParams {
    fn default() -> Self {
        Self {
            k_neighbors: 20,
            std_ratio: 2.0,
        }
    }
}

impl OutlierParams {
    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors == 0 || !(self.std_ratio > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "outlier removal needs k >= 1 and ratio > 0, got k={} ratio={}",
                self.k_neighbors, self.std_ratio
            )));
        }
        Ok(())
    }
}

pub const REMOVAL_SLACK: f64 = 1e-9;

/// Mean distance from every point to its `k` nearest other points.
pub fn mean_neighbor_distances(cloud: &PointCloud, k: usize) -> Result<Vec<f64>> {
    if cloud.len() <= k {
        return Err(Error::TooFewPoints {
            needed: k,
            found: cloud.len(),
        });
    }
    let tree = KdTree::new(&cloud.points);
    Ok(cloud
        .points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            // ascending order keeps the sum independent of the search path
            let sum: f64 = tree.knn(p, k, Some(i)).iter().map(|&(d2, _)| d2.sqrt()).sum();
            sum / k as f64
        })
        .collect())
}

/// Statistical outlier removal.
///
/// With `m_i` the mean distance of point `i` to its `k` nearest neighbors,
/// `mu` the mean and `sigma` the sample standard deviation of all `m_i`, every
/// point with `m_i > mu + std_ratio * sigma` is dropped. A relative slack of
/// [`REMOVAL_SLACK`] times `mu` absorbs rounding, so a cloud whose means are
/// all mathematically equal loses nothing. Returns the surviving cloud and
/// the number of removed points.
pub fn remove_outliers(cloud: &PointCloud, params: &OutlierParams) -> Result<(PointCloud, usize)> {
    params.validate()?;
    let means = mean_neighbor_distances(cloud, params.k_neighbors)?;
    let n = means.len() as f64;
    let mu = means.iter().sum::<f64>() / n;
    let var = means.iter().map(|m| (m - mu) * (m - mu)).sum::<f64>() / (n - 1.0);
    let threshold = mu + params.std_ratio * var.sqrt() + REMOVAL_SLACK * mu;
    let keep: Vec<bool> = means.iter().map(|&m| m <= threshold).collect();
    let removed = keep.iter().filter(|&&k| !k).count();
    Ok((cloud.retain_mask(&keep), removed))
}
