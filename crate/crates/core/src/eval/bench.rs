use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub stage: String,
    pub w: usize,
    pub h: usize,
    /// Median wall time over the repetitions.
    pub seconds: f64,
    pub repetitions: usize,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Run `f` `reps` times on the calling thread and return the median wall
/// time in seconds. The first error aborts the run.
pub fn time_median<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    if reps == 0 {
        return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
    }
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        std::hint::black_box(f()?);
        // a zero reading would break the positive-time invariant
        times.push(start.elapsed().as_secs_f64().max(1e-9));
    }
    Ok(median(&times).expect("reps >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[5.0, 1.0, 3.0, 2.0, 4.0]), Some(3.0));
        assert_eq!(median(&[4.0, 1.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn timer_runs_every_repetition() {
        let mut calls = 0;
        let t = time_median(5, || {
            calls += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(calls, 5);
        assert!(t > 0.0);
        assert!(time_median(0, || Ok(())).is_err());
    }
}
