use crate::error::{Error, Result};
use crate::raster::{DepthMap, UNDEFINED};

use super::PlaneSearchConfig;

/// Coarse depth grid together with the source pixel behind every cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedGrid {
    pub depth: DepthMap,
    /// `(row, col)` in the input raster for each cell, `None` for cells whose
    /// source rectangle holds no defined pixel.
    pub sources: Vec<Option<(usize, usize)>>,
}

fn bounds(i: usize, cells: usize, len: usize) -> (usize, usize) {
    (i * len / cells, (i + 1) * len / cells)
}

/// Reduce `depth` to a `grid_h x grid_w` grid.
///
/// The input is split into near-equal rectangles; each cell takes the defined
/// pixel nearest the rectangle center, ties resolved in row-major order. A
/// fully defined input therefore yields a fully defined grid.
pub fn grid_reduce(depth: &DepthMap, config: &PlaneSearchConfig) -> Result<ReducedGrid> {
    let (w, h) = depth.dims();
    let (gw, gh) = (config.grid_w, config.grid_h);
    if gw == 0 || gh == 0 || gw > w || gh > h {
        return Err(Error::InvalidParameter(format!(
            "grid {gw}x{gh} does not fit the {w}x{h} input"
        )));
    }
    let mut values = Vec::with_capacity(gw * gh);
    let mut sources = Vec::with_capacity(gw * gh);
    for gr in 0..gh {
        let (r0, r1) = bounds(gr, gh, h);
        for gc in 0..gw {
            let (c0, c1) = bounds(gc, gw, w);
            // doubled coordinates keep the center integral
            let (cy2, cx2) = ((r0 + r1 - 1) as i64, (c0 + c1 - 1) as i64);
            let mut best: Option<(i64, usize, usize)> = None;
            for r in r0..r1 {
                let dy = 2 * r as i64 - cy2;
                for c in c0..c1 {
                    if depth.get(r, c).is_none() {
                        continue;
                    }
                    let dx = 2 * c as i64 - cx2;
                    let d2 = dy * dy + dx * dx;
                    if best.is_none_or(|(b, _, _)| d2 < b) {
                        best = Some((d2, r, c));
                    }
                }
            }
            match best {
                Some((_, r, c)) => {
                    values.push(depth.value(r, c));
                    sources.push(Some((r, c)));
                }
                None => {
                    values.push(UNDEFINED);
                    sources.push(None);
                }
            }
        }
    }
    Ok(ReducedGrid {
        depth: DepthMap::new(gw, gh, values)?,
        sources,
    })
}
