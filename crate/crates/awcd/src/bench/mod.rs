//! Benchmark harness: downsampling, seeded noise injection, TPR/FPR/SNRG
//! metrics, and the comparison-table runner.

mod metrics;
mod noise;
mod runner;
pub mod synthetic;

pub use metrics::{compute_metrics, MetricsRow};
pub use noise::{downsample, inject_noise, NoiseSpec};
pub use runner::{run_benchmark, BenchConfig, BenchReport, BenchRow, MethodSpec};

use thiserror::Error;

use crate::cloud::CloudError;
use crate::denoise::DenoiseError;

/// Errors from the benchmark layer.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error(transparent)]
    Denoise(#[from] DenoiseError),
}
