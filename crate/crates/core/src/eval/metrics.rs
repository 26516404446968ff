use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::raster::{DefinitionMap, DepthMap, ObjectMap};

/// Per-pixel weights of the weighted L1 loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LossWeights {
    pub object_weight: f64,
    pub background_weight: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            object_weight: 1.0,
            background_weight: 0.01,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let (o, b) = (self.object_weight, self.background_weight);
        if !(b > 0.0 && o.is_finite() && o >= b) {
            return Err(Error::InvalidParameter(format!(
                "loss weights need object >= background > 0, got {o} / {b}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rmse: f64,
    /// `None` when the object map has no measured pixel.
    pub object_rmse: Option<f64>,
    pub object_loss: f64,
}

/// Absolute errors at the pixels selected by `select`, in row-major order.
fn errors<'a>(
    pred: &'a DepthMap,
    gt: &'a DepthMap,
    definition: &'a DefinitionMap,
    select: impl Fn(usize) -> bool + 'a,
) -> Result<impl Iterator<Item = (usize, f64)> + 'a> {
    check_dims("prediction", gt.dims(), pred.dims())?;
    check_dims("definition map", gt.dims(), definition.dims())?;
    let measured = definition.data();
    if let Some(i) = (0..measured.len()).find(|&i| measured[i] && !(pred.is_defined_at(i) && gt.is_defined_at(i))) {
        return Err(Error::InvalidRaster(format!(
            "depth undefined at measured pixel ({}, {})",
            i / gt.width(),
            i % gt.width()
        )));
    }
    Ok((0..measured.len())
        .filter(move |&i| measured[i] && select(i))
        .map(move |i| (i, (f64::from(pred.data()[i]) - f64::from(gt.data()[i])).abs())))
}

fn root_mean_square(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for e in it {
        sum += e * e;
        n += 1;
    }
    (n > 0).then(|| (sum / n as f64).sqrt())
}

/// Root mean squared error over measured pixels.
pub fn rmse(pred: &DepthMap, gt: &DepthMap, definition: &DefinitionMap) -> Result<f64> {
    root_mean_square(errors(pred, gt, definition, |_| true)?.map(|(_, e)| e))
        .ok_or_else(|| Error::Empty("no measured pixels".into()))
}

/// RMSE restricted to measured object pixels.
pub fn object_rmse(
    pred: &DepthMap,
    gt: &DepthMap,
    object: &ObjectMap,
    definition: &DefinitionMap,
) -> Result<f64> {
    check_dims("object map", gt.dims(), object.dims())?;
    let obj = object.data();
    root_mean_square(errors(pred, gt, definition, |i| obj[i])?.map(|(_, e)| e))
        .ok_or_else(|| Error::Empty("no measured object pixels".into()))
}

/// Weighted mean absolute error over measured pixels, normalized by the
/// total weight.
pub fn object_loss(
    pred: &DepthMap,
    gt: &DepthMap,
    object: &ObjectMap,
    definition: &DefinitionMap,
    weights: &LossWeights,
) -> Result<f64> {
    weights.validate()?;
    check_dims("object map", gt.dims(), object.dims())?;
    let obj = object.data();
    // per-class sums, weighted once at the end
    let (mut e_obj, mut e_bg, mut n_obj, mut n_bg) = (0.0, 0.0, 0usize, 0usize);
    for (i, e) in errors(pred, gt, definition, |_| true)? {
        if obj[i] {
            e_obj += e;
            n_obj += 1;
        } else {
            e_bg += e;
            n_bg += 1;
        }
    }
    if n_obj + n_bg == 0 {
        return Err(Error::Empty("no measured pixels".into()));
    }
    let (wo, wb) = (weights.object_weight, weights.background_weight);
    Ok((wo * e_obj + wb * e_bg) / (wo * n_obj as f64 + wb * n_bg as f64))
}

impl MetricsReport {
    pub fn compute(
        pred: &DepthMap,
        gt: &DepthMap,
        object: &ObjectMap,
        definition: &DefinitionMap,
        weights: &LossWeights,
    ) -> Result<Self> {
        let object_rmse = match object_rmse(pred, gt, object, definition) {
            Ok(v) => Some(v),
            Err(Error::Empty(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            rmse: rmse(pred, gt, definition)?,
            object_rmse,
            object_loss: object_loss(pred, gt, object, definition, weights)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(w: usize, h: usize) -> DefinitionMap {
        DefinitionMap::new(w, h, vec![true; w * h]).unwrap()
    }

    #[test]
    fn constant_offset() {
        let gt = DepthMap::constant(4, 3, 500.0).unwrap();
        let pred = DepthMap::constant(4, 3, 502.0).unwrap();
        assert_eq!(rmse(&pred, &gt, &all(4, 3)).unwrap(), 2.0);
        assert_eq!(rmse(&gt, &gt, &all(4, 3)).unwrap(), 0.0);
    }

    #[test]
    fn two_pixels() {
        let gt = DepthMap::new(3, 1, vec![100.0, 100.0, 100.0]).unwrap();
        let pred = DepthMap::new(3, 1, vec![103.0, 96.0, 900.0]).unwrap();
        let def = DefinitionMap::new(3, 1, vec![true, true, false]).unwrap();
        assert!((rmse(&pred, &gt, &def).unwrap() - 12.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn object_rmse_mixed() {
        let gt = DepthMap::constant(4, 1, 100.0).unwrap();
        let pred = DepthMap::new(4, 1, vec![101.0, 102.0, 98.0, 150.0]).unwrap();
        let obj = ObjectMap::new(4, 1, vec![true, true, true, false]).unwrap();
        assert!((object_rmse(&pred, &gt, &obj, &all(4, 1)).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let none = ObjectMap::new(4, 1, vec![false; 4]).unwrap();
        assert!(matches!(object_rmse(&pred, &gt, &none, &all(4, 1)), Err(Error::Empty(_))));
    }

    #[test]
    fn weighted_loss_example() {
        let gt = DepthMap::constant(10, 10, 400.0).unwrap();
        let pred = DepthMap::from_fn(10, 10, |r, _| if r == 0 { 402.0 } else { 400.0 }).unwrap();
        let obj = ObjectMap::new(10, 10, (0..100).map(|i| i < 10).collect()).unwrap();
        let l = object_loss(&pred, &gt, &obj, &all(10, 10), &LossWeights::default()).unwrap();
        assert_eq!(l, 20.0 / 10.9);
        assert!((l - 1.834_862_385_321_1).abs() < 1e-12);
    }

    #[test]
    fn uniform_error_ignores_weights() {
        let gt = DepthMap::constant(5, 5, 400.0).unwrap();
        let pred = DepthMap::constant(5, 5, 401.0).unwrap();
        let obj = ObjectMap::new(5, 5, (0..25).map(|i| i % 3 == 0).collect()).unwrap();
        let l = object_loss(&pred, &gt, &obj, &all(5, 5), &LossWeights::default()).unwrap();
        assert!((l - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_undefined_prediction_and_bad_weights() {
        let gt = DepthMap::constant(2, 1, 400.0).unwrap();
        let pred = DepthMap::new(2, 1, vec![400.0, f32::NAN]).unwrap();
        assert!(matches!(rmse(&pred, &gt, &all(2, 1)), Err(Error::InvalidRaster(_))));
        let w = LossWeights { object_weight: 0.001, background_weight: 0.01 };
        assert!(w.validate().is_err());
    }
}
