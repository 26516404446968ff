use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `t(n) = c0 + c1 * m + c2 * m^2` with `m` the pixel count in millions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeModel {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

const PIXELS_PER_UNIT: f64 = 1e6;

impl TimeModel {
    pub fn predict(&self, pixels: f64) -> f64 {
        let m = pixels / PIXELS_PER_UNIT;
        self.c0 + m * (self.c1 + m * self.c2)
    }
}

/// Least-squares quadratic through `(pixel count, seconds)` samples.
pub fn fit_time_model(samples: &[(f64, f64)]) -> Result<TimeModel> {
    if samples.iter().any(|&(n, t)| !n.is_finite() || !t.is_finite()) {
        return Err(Error::InvalidParameter("timing samples must be finite".into()));
    }
    let mut xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::SingularFit(format!(
            "need 3 distinct pixel counts, got {}",
            xs.len()
        )));
    }
    let a = DMatrix::from_fn(samples.len(), 3, |i, j| (samples[i].0 / PIXELS_PER_UNIT).powi(j as i32));
    let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let c = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::SingularFit(e.to_string()))?;
    Ok(TimeModel {
        c0: c[0],
        c1: c[1],
        c2: c[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_samples() {
        let s: Vec<(f64, f64)> = [1e5, 4e5, 9e5, 2e6].iter().map(|&n| (n, 1e-7 * n)).collect();
        let m = fit_time_model(&s).unwrap();
        assert!(m.c0.abs() < 1e-12 && m.c2.abs() < 1e-12);
        assert!((m.c1 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn exact_parabola() {
        let s = [(1.0, 1.0), (2.0, 4.0), (5.0, 25.0)];
        let m = fit_time_model(&s).unwrap();
        for n in [3.0, 10.0, 1000.0] {
            assert!((m.predict(n) - n * n).abs() <= 1e-9 * n * n);
        }
    }

    #[test]
    fn too_few_abscissae() {
        assert!(matches!(
            fit_time_model(&[(1.0, 1.0), (1.0, 2.0), (2.0, 3.0)]),
            Err(Error::SingularFit(_))
        ));
    }
}
