//! Baseline upsamplers and re-masking of model outputs.

use crate::error::{check_dims, Error, Result};
use crate::raster::{DefinitionMap, DepthMap, UNDEFINED};

fn check_scale(s: usize) -> Result<()> {
    if s == 0 {
        return Err(Error::InvalidParameter("scale must be positive".into()));
    }
    Ok(())
}

/// Replicate every pixel into an `s x s` block.
pub fn upsample_nn(depth: &DepthMap, s: usize) -> Result<DepthMap> {
    check_scale(s)?;
    let (w, h) = depth.dims();
    let mut out = Vec::with_capacity(w * h * s * s);
    for r in 0..h * s {
        let src = &depth.data()[(r / s) * w..][..w];
        for &v in src {
            out.extend(std::iter::repeat_n(v, s));
        }
    }
    DepthMap::new(w * s, h * s, out)
}

/// Catmull-Rom weights (`a = -0.5`) for taps at offsets -1, 0, 1, 2.
fn cubic_weights(t: f64) -> [f64; 4] {
    const A: f64 = -0.5;
    let near = |x: f64| ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0;
    let far = |x: f64| ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A;
    [far(t + 1.0), near(t), near(1.0 - t), far(2.0 - t)]
}

/// For every output coordinate, the first source tap and the kernel weights.
/// Output pixel centers map to `(x + 0.5) / s - 0.5` in source coordinates;
/// taps beyond the raster clamp to the edge.
fn taps(src_len: usize, s: usize) -> Vec<([usize; 4], [f64; 4])> {
    (0..src_len * s)
        .map(|x| {
            let pos = (x as f64 + 0.5) / s as f64 - 0.5;
            let base = pos.floor();
            let w = cubic_weights(pos - base);
            let idx = std::array::from_fn(|k| {
                (base as i64 - 1 + k as i64).clamp(0, src_len as i64 - 1) as usize
            });
            (idx, w)
        })
        .collect()
}

/// Separable bicubic upsampling with clamp-to-edge boundaries. The input must
/// be fully defined.
pub fn upsample_bicubic(depth: &DepthMap, s: usize) -> Result<DepthMap> {
    check_scale(s)?;
    if !depth.is_fully_defined() {
        return Err(Error::InvalidRaster(
            "bicubic upsampling needs a fully defined depth map".into(),
        ));
    }
    let (w, h) = depth.dims();
    let (ow, oh) = (w * s, h * s);
    let xt = taps(w, s);
    let yt = taps(h, s);

    let mut horiz = vec![0f64; ow * h];
    for r in 0..h {
        let src = &depth.data()[r * w..][..w];
        for (x, (idx, wt)) in xt.iter().enumerate() {
            horiz[r * ow + x] = (0..4).map(|k| wt[k] * f64::from(src[idx[k]])).sum();
        }
    }
    let mut out = Vec::with_capacity(ow * oh);
    for (idx, wt) in &yt {
        for x in 0..ow {
            let v: f64 = (0..4).map(|k| wt[k] * horiz[idx[k] * ow + x]).sum();
            // overshoot at steep edges can in principle leave the valid range
            out.push((v as f32).max(f32::MIN_POSITIVE));
        }
    }
    DepthMap::new(ow, oh, out)
}

/// Put back the undefined pixels recorded in `definition`.
pub fn remask(depth: &DepthMap, definition: &DefinitionMap) -> Result<DepthMap> {
    check_dims("definition map", depth.dims(), definition.dims())?;
    let data = depth
        .data()
        .iter()
        .zip(definition.data())
        .map(|(&v, &d)| if d { v } else { UNDEFINED })
        .collect();
    DepthMap::new(depth.width(), depth.height(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nn_identity_and_constant() {
        let d = DepthMap::from_fn(3, 2, |r, c| 10.0 + (r * 3 + c) as f32).unwrap();
        assert_eq!(upsample_nn(&d, 1).unwrap(), d);
        let one = DepthMap::constant(1, 1, 400.0).unwrap();
        assert_eq!(upsample_nn(&one, 3).unwrap(), DepthMap::constant(3, 3, 400.0).unwrap());
        assert!(upsample_nn(&d, 0).is_err());
    }

    #[test]
    fn nn_quadrants() {
        let d = DepthMap::new(2, 2, vec![1.0, 2.0, 3.0, UNDEFINED]).unwrap();
        let u = upsample_nn(&d, 2).unwrap();
        let expected = DepthMap::new(
            4,
            4,
            vec![
                1.0, 1.0, 2.0, 2.0, //
                1.0, 1.0, 2.0, 2.0, //
                3.0, 3.0, UNDEFINED, UNDEFINED, //
                3.0, 3.0, UNDEFINED, UNDEFINED,
            ],
        )
        .unwrap();
        assert_eq!(u, expected);
    }

    #[test]
    fn kernel_is_partition_of_unity() {
        for i in 0..=16 {
            let w = cubic_weights(i as f64 / 16.0);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(cubic_weights(0.0), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn bicubic_constant() {
        let d = DepthMap::constant(5, 4, 812.5).unwrap();
        let u = upsample_bicubic(&d, 3).unwrap();
        assert_eq!(u.dims(), (15, 12));
        assert!(u.data().iter().all(|&v| (v - 812.5).abs() < 1e-4));
    }

    #[test]
    fn bicubic_step_overshoots() {
        // source row 100 100 100 200 200 200; output x = 8 samples the source
        // at 1.625, i.e. taps (100, 100, 100, 200) at t = 0.625, which gives
        // 100 - 50 t^2 (1 - t) = 92.67578125
        let d = DepthMap::from_fn(6, 1, |_, c| if c < 3 { 100.0 } else { 200.0 }).unwrap();
        let u = upsample_bicubic(&d, 4).unwrap();
        assert_eq!(u.value(0, 8), 92.675_781_25);
        assert!(u.data().iter().any(|&v| v < 100.0));
        assert!(u.data().iter().any(|&v| v > 200.0));
    }

    #[test]
    fn bicubic_rejects_holes() {
        let d = DepthMap::new(2, 1, vec![1.0, UNDEFINED]).unwrap();
        assert!(upsample_bicubic(&d, 2).is_err());
    }

    #[test]
    fn remask_cases() {
        let d = DepthMap::from_fn(2, 2, |r, c| 1.0 + (2 * r + c) as f32).unwrap();
        let ones = DefinitionMap::new(2, 2, vec![true; 4]).unwrap();
        assert_eq!(remask(&d, &ones).unwrap(), d);
        let zeros = DefinitionMap::new(2, 2, vec![false; 4]).unwrap();
        assert_eq!(remask(&d, &zeros).unwrap().defined_count(), 0);
        let checker = DefinitionMap::new(2, 2, vec![true, false, false, true]).unwrap();
        let m = remask(&d, &checker).unwrap();
        assert_eq!(m.get(0, 0), Some(1.0));
        assert_eq!(m.get(0, 1), None);
        assert_eq!(m.get(1, 0), None);
        assert_eq!(m.get(1, 1), Some(4.0));
    }
}
