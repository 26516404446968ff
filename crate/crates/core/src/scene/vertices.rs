use crate::error::{Error, Result};
use crate::raster::DepthMap;

use super::PlaneSearchConfig;

/// Cell position in a reduced grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridCoord {
    pub row: usize,
    pub col: usize,
}

/// The triangle chosen to define the ground plane: `a` and `b` span the base
/// on the near-mean line, `c` sits in the far region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaneVertices {
    pub a: GridCoord,
    pub b: GridCoord,
    pub c: GridCoord,
}

/// Number of members in the lowest `fraction` of `n` ranked items.
fn rank_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n)
}

/// Pick three ground cells of a coarse grid.
///
/// Cells whose squared deviation from the grid mean is no larger than the
/// largest one among the `near_mean_fraction` smallest deviations form the
/// near-mean group; its leftmost and rightmost members (ties to the smaller
/// row) are `a` and `b`. Cells ranking in the top `far_fraction` of depth
/// form the far group; sorted by row, its middle member is `c`.
/// Undefined cells are ignored.
pub fn select_plane_vertices(grid: &DepthMap, config: &PlaneSearchConfig) -> Result<PlaneVertices> {
    config.validate()?;
    let w = grid.width();
    let cells: Vec<(GridCoord, f64)> = grid
        .data()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .map(|(i, &v)| {
            (
                GridCoord {
                    row: i / w,
                    col: i % w,
                },
                f64::from(v),
            )
        })
        .collect();
    let n = cells.len();
    if n < 3 {
        return Err(Error::DegeneratePlane(format!(
            "need at least 3 defined grid cells, got {n}"
        )));
    }

    // |n*d - sum| orders cells exactly like (d - mean)^2 but is computed
    // without rounding for f32 inputs, so a constant depth offset cannot
    // reorder cells
    let sum: f64 = cells.iter().map(|&(_, v)| v).sum();
    let count = n as f64;
    let dev: Vec<f64> = cells.iter().map(|&(_, v)| (count * v - sum).abs()).collect();
    let mut sorted = dev.clone();
    sorted.sort_by(f64::total_cmp);
    let threshold = sorted[rank_count(config.near_mean_fraction, n) - 1];
    let near: Vec<GridCoord> = cells
        .iter()
        .zip(&dev)
        .filter(|(_, &d)| d <= threshold)
        .map(|(&(p, _), _)| p)
        .collect();
    let a = *near.iter().min_by_key(|p| (p.col, p.row)).expect("non-empty");
    let b = *near
        .iter()
        .min_by_key(|p| (std::cmp::Reverse(p.col), p.row))
        .expect("non-empty");
    if a.col == b.col {
        return Err(Error::DegeneratePlane(
            "near-mean group spans a single column".into(),
        ));
    }

    let mut by_depth: Vec<f64> = cells.iter().map(|&(_, v)| v).collect();
    by_depth.sort_by(|x, y| y.total_cmp(x));
    let far_cut = by_depth[rank_count(config.far_fraction, n) - 1];
    let mut far: Vec<GridCoord> = cells
        .iter()
        .filter(|&&(_, v)| v >= far_cut)
        .map(|&(p, _)| p)
        .collect();
    far.sort();
    let c = far[far.len() / 2];
    if c == a || c == b {
        return Err(Error::DegeneratePlane(format!(
            "far vertex {c:?} coincides with a base vertex"
        )));
    }
    Ok(PlaneVertices { a, b, c })
}
