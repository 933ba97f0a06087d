//! Experiment summary statistics.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("cannot summarize an empty value list")]
    Empty,
}

/// Mean, sample standard deviation (n-1 denominator), standard error, and a
/// normal-approximation 95% confidence interval. A single value degenerates
/// to zero spread with the interval collapsed onto the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub sample_std: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

const Z_95: f64 = 1.96;

pub fn summarize_stats(values: &[f64]) -> Result<SummaryStats, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let sample_std = if n == 1 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt()
    };
    let std_error = if n == 1 {
        0.0
    } else {
        sample_std / (n as f64).sqrt()
    };
    Ok(SummaryStats {
        n,
        mean,
        sample_std,
        std_error,
        ci95: (mean - Z_95 * std_error, mean + Z_95 * std_error),
    })
}
