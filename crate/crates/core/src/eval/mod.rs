//! Evaluation harness: synthetic scenes, repeatability under rigid motion and
//! noise, single-thread runtime and threshold sweeps, with CSV reports.

mod ablation;
mod report;
mod repeatability;
mod runtime;
mod scene;

pub use ablation::{ablation_sweep, AblationRow};
pub use report::{write_ablation_csv, write_repeatability_csv, write_runtime_csv};
pub use repeatability::{
    count_repeatable, evaluate_repeatability, evaluate_trial, random_matching_count, DEFAULT_TRIALS,
    RepeatabilityConfig, RepeatabilityReport, TrialResult,
};
pub use runtime::{measure_runtime, single_thread_pool, RuntimeStats};
pub use scene::{generate_scene, SceneKind, SceneSpec};

use crate::baseline::detect_random;
use crate::cloud::ColoredPointCloud;
use crate::detector::{detect, DetectorParams, KeypointSet};
use crate::error::Result;

/// Anything that turns a cloud into keypoints.
///
/// `seed` lets stochastic detectors draw independently per call; the harness
/// passes different seeds for the source and the transformed cloud.
pub trait KeypointDetector: Sync {
    fn name(&self) -> String;

    fn detect(&self, cloud: &ColoredPointCloud, seed: u64) -> Result<KeypointSet>;

    /// Whether repeated calls on the same cloud return the same keypoints.
    fn is_deterministic(&self) -> bool {
        true
    }
}

/// The centroid-distance detector with fixed parameters.
#[derive(Debug, Clone, Copy)]
pub struct CedDetector {
    pub params: DetectorParams,
}

impl CedDetector {
    pub fn new(params: DetectorParams) -> Self {
        Self { params }
    }
}

impl KeypointDetector for CedDetector {
    fn name(&self) -> String {
        self.params.mode.to_string()
    }

    fn detect(&self, cloud: &ColoredPointCloud, _seed: u64) -> Result<KeypointSet> {
        detect(cloud, &self.params)
    }
}

/// Uniform random selection of a fixed number of points.
#[derive(Debug, Clone, Copy)]
pub struct RandomDetector {
    pub count: usize,
}

impl KeypointDetector for RandomDetector {
    fn name(&self) -> String {
        "random".into()
    }

    fn detect(&self, cloud: &ColoredPointCloud, seed: u64) -> Result<KeypointSet> {
        detect_random(cloud, self.count.min(cloud.len()), seed)
    }

    fn is_deterministic(&self) -> bool {
        false
    }
}

impl<F> KeypointDetector for F
where
    F: Fn(&ColoredPointCloud, u64) -> Result<KeypointSet> + Sync,
{
    fn name(&self) -> String {
        "custom".into()
    }

    fn detect(&self, cloud: &ColoredPointCloud, seed: u64) -> Result<KeypointSet> {
        self(cloud, seed)
    }
}
