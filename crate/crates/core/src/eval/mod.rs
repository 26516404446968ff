//! Depth-map error metrics, stage timing and time extrapolation.

mod bench;
mod metrics;
mod timing;

pub use bench::{median, time_median, BenchRecord};
pub use metrics::{object_loss, object_rmse, rmse, LossWeights, MetricsReport};
pub use timing::{fit_time_model, TimeModel};
