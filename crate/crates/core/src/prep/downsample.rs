use crate::error::{Error, Result};
use crate::raster::{DepthMap, UNDEFINED};

/// Default range threshold separating flat blocks from edge blocks.
pub const DEFAULT_TAU_MM: f32 = 5.0;

/// Collapse every `s x s` block of `depth` to one pixel.
///
/// Only defined pixels of a block take part. When their depth range is at most
/// `tau` the block is flat and keeps the defined pixel closest to the block
/// center (ties go to the first pixel in row-major order). Otherwise the block
/// straddles a depth discontinuity and keeps its minimum, so foreground
/// silhouettes survive. A block without defined pixels stays undefined.
pub fn downsample(depth: &DepthMap, s: usize, tau: f32) -> Result<DepthMap> {
    let (w, h) = depth.dims();
    if s == 0 {
        return Err(Error::InvalidParameter("scale must be positive".into()));
    }
    if w % s != 0 || h % s != 0 {
        return Err(Error::InvalidParameter(format!(
            "scale {s} does not divide {w}x{h}"
        )));
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be >= 0, got {tau}")));
    }
    let (lw, lh) = (w / s, h / s);
    // twice the offset of the block center, kept integral
    let center2 = (s - 1) as i64;
    let mut out = Vec::with_capacity(lw * lh);
    for br in 0..lh {
        for bc in 0..lw {
            let mut lo = f32::INFINITY;
            let mut hi = f32::NEG_INFINITY;
            let mut nearest = UNDEFINED;
            let mut best = i64::MAX;
            for dr in 0..s {
                let row = &depth.data()[(br * s + dr) * w + bc * s..][..s];
                for (dc, &v) in row.iter().enumerate() {
                    if v.is_nan() {
                        continue;
                    }
                    lo = lo.min(v);
                    hi = hi.max(v);
                    let (y, x) = (2 * dr as i64 - center2, 2 * dc as i64 - center2);
                    let d2 = y * y + x * x;
                    if d2 < best {
                        best = d2;
                        nearest = v;
                    }
                }
            }
            out.push(if best == i64::MAX {
                UNDEFINED
            } else if hi - lo <= tau {
                nearest
            } else {
                lo
            });
        }
    }
    DepthMap::new(lw, lh, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: f32 = UNDEFINED;

    fn block(v: [f32; 4]) -> DepthMap {
        DepthMap::new(2, 2, v.to_vec()).unwrap()
    }

    #[test]
    fn constant_block() {
        let d = downsample(&block([300.0; 4]), 2, 5.0).unwrap();
        assert_eq!(d.data(), &[300.0]);
    }

    #[test]
    fn edge_block_keeps_minimum() {
        let d = downsample(&block([300.0, 300.0, 300.0, 400.0]), 2, 5.0).unwrap();
        assert_eq!(d.data(), &[300.0]);
        let d = downsample(&block([400.0, 400.0, 400.0, 300.0]), 2, 5.0).unwrap();
        assert_eq!(d.data(), &[300.0]);
    }

    #[test]
    fn flat_block_keeps_center_pixel() {
        // all four pixels of a 2x2 block are equidistant: first one wins
        let d = downsample(&block([302.0, 300.0, 301.0, 303.0]), 2, 5.0).unwrap();
        assert_eq!(d.data(), &[302.0]);
        // 3x3 block: exact center
        let m = DepthMap::new(3, 3, vec![500.0, 501.0, 502.0, 503.0, 504.0, 505.0, 500.0, 500.0, 500.0]).unwrap();
        assert_eq!(downsample(&m, 3, 10.0).unwrap().data(), &[504.0]);
    }

    #[test]
    fn undefined_pixels_are_skipped() {
        let d = downsample(&block([U, U, U, U]), 2, 5.0).unwrap();
        assert!(d.data()[0].is_nan());
        let d = downsample(&block([U, 410.0, U, 400.0]), 2, 5.0).unwrap();
        assert_eq!(d.data(), &[400.0]);
        let d = downsample(&block([U, 402.0, 400.0, U]), 2, 5.0).unwrap();
        assert_eq!(d.data(), &[402.0]);
    }

    #[test]
    fn rejects_bad_scale() {
        let d = DepthMap::constant(6, 4, 1.0).unwrap();
        assert!(downsample(&d, 0, 5.0).is_err());
        assert!(downsample(&d, 4, 5.0).is_err());
        assert_eq!(downsample(&d, 2, 5.0).unwrap().dims(), (3, 2));
    }
}
