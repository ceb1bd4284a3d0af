use std::time::Instant;

use rayon::ThreadPool;

use super::KeypointDetector;
use crate::cloud::ColoredPointCloud;
use crate::error::{Error, Result};

/// Wall-clock samples of repeated detector runs, in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeStats {
    pub samples: Vec<f64>,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
}

impl RuntimeStats {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n == 0 {
            0.0
        } else if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Self {
            mean: if n == 0 { 0.0 } else { samples.iter().sum::<f64>() / n as f64 },
            median,
            min: sorted.first().copied().unwrap_or(0.0),
            samples,
        }
    }
}

/// A rayon pool with exactly one worker.
pub fn single_thread_pool() -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))
}

/// Times `repetitions` detector runs on a single worker thread.
///
/// Each sample covers the whole detector call, including spatial index
/// construction, and excludes any file IO.
pub fn measure_runtime(
    cloud: &ColoredPointCloud,
    detector: &dyn KeypointDetector,
    repetitions: usize,
) -> Result<RuntimeStats> {
    if repetitions < 3 {
        return Err(Error::InvalidConfig(format!(
            "at least 3 repetitions are required, got {repetitions}"
        )));
    }
    let pool = single_thread_pool()?;
    let samples = pool.install(|| {
        (0..repetitions)
            .map(|rep| {
                let start = Instant::now();
                detector.detect(cloud, rep as u64)?;
                Ok(start.elapsed().as_secs_f64())
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(RuntimeStats::from_samples(samples))
}
