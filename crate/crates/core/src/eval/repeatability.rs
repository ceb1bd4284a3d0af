use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::KeypointDetector;
use crate::cloud::{add_gaussian_noise, apply_rigid_transform, ColoredPointCloud};
use crate::detector::KeypointSet;
use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::transform::RigidTransform;

/// Repeatability protocol settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatabilityConfig {
    /// Match distance in meters.
    pub epsilon: f64,
    /// Standard deviation of the Gaussian noise added to the transformed cloud.
    pub sigma: f64,
    pub transform_seed: u64,
    pub noise_seed: u64,
    /// Base seed handed to stochastic detectors.
    pub detector_seed: u64,
    pub trials: usize,
    /// Random translations are uniform in `±max_translation` per axis.
    pub max_translation: f64,
}

pub const DEFAULT_TRIALS: usize = 10;

impl RepeatabilityConfig {
    /// `epsilon = 2 × resolution`, `sigma = resolution / 2`, 10 trials.
    pub fn for_resolution(resolution: f64) -> Self {
        Self {
            epsilon: 2.0 * resolution,
            sigma: 0.5 * resolution,
            transform_seed: 1,
            noise_seed: 2,
            detector_seed: 3,
            trials: DEFAULT_TRIALS,
            max_translation: 1.0,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::NegativeSigma(self.sigma));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("at least one trial is required".into()));
        }
        if !(self.max_translation >= 0.0 && self.max_translation.is_finite()) {
            return Err(Error::InvalidConfig("max_translation must be non-negative".into()));
        }
        Ok(())
    }

    /// The transform of trial `t`.
    pub fn transform_for_trial(&self, trial: usize) -> RigidTransform {
        let mut rng = ChaCha8Rng::seed_from_u64(self.transform_seed.wrapping_add(trial as u64));
        rng.set_stream(1);
        RigidTransform::random(&mut rng, self.max_translation)
    }

    pub fn noise_seed_for_trial(&self, trial: usize) -> u64 {
        self.noise_seed.wrapping_add(trial as u64)
    }

    fn detector_seed_for(&self, trial: usize, transformed: bool) -> u64 {
        self.detector_seed
            .wrapping_add((trial as u64) << 1)
            .wrapping_add(transformed as u64)
    }
}

/// Outcome of one transform trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    /// |K_P|
    pub total_keypoints: usize,
    /// |K_Q|
    pub query_keypoints: usize,
    pub repeatable_keypoints: usize,
    pub relative_repeatability: f64,
    /// Mean wall-clock seconds per detector call in this trial.
    pub detect_time_seconds: f64,
}

/// Aggregate over all trials.
///
/// Counts are summed over trials; `relative_repeatability` is the mean of the
/// per-trial ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatabilityReport {
    pub total_keypoints: usize,
    pub repeatable_keypoints: usize,
    pub relative_repeatability: f64,
    pub detect_time_seconds: f64,
    /// Set when the source cloud produced no keypoints; repeatability is then 0.
    pub empty: bool,
    pub epsilon: f64,
    pub sigma: f64,
    pub trials: Vec<TrialResult>,
}

/// Number of source keypoints whose transformed position has a keypoint of
/// the target strictly within `epsilon`.
///
/// Each source keypoint is matched independently; several may share one
/// target keypoint.
pub fn count_repeatable(
    source: &ColoredPointCloud,
    source_keypoints: &[usize],
    transform: &RigidTransform,
    target: &ColoredPointCloud,
    target_keypoints: &[usize],
    epsilon: f64,
) -> Result<usize> {
    if source_keypoints.is_empty() || target_keypoints.is_empty() {
        return Ok(0);
    }
    let targets = target.select(target_keypoints)?;
    let index = SpatialIndex::build(&targets)?;
    let eps2 = epsilon * epsilon;
    let mut count = 0;
    for &i in source_keypoints {
        let p = source.points().get(i).ok_or(Error::IndexOutOfRange { index: i, len: source.len() })?;
        let moved = transform.apply(&p.position());
        if index.any_within(targets.points(), &[moved.x, moved.y, moved.z], eps2) {
            count += 1;
        }
    }
    Ok(count)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// One trial with an explicit transform: `Q = noise(T P)`, detect on both,
/// match by `epsilon`.
///
/// `source_keypoints` may carry a precomputed `K_P` for deterministic detectors.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_trial(
    cloud: &ColoredPointCloud,
    detector: &dyn KeypointDetector,
    transform: &RigidTransform,
    sigma: f64,
    noise_seed: u64,
    epsilon: f64,
    detector_seeds: (u64, u64),
    source_keypoints: Option<(&KeypointSet, f64)>,
) -> Result<TrialResult> {
    let transformed = add_gaussian_noise(&apply_rigid_transform(cloud, transform)?, sigma, noise_seed)?;
    let (kp, kp_time) = match source_keypoints {
        Some((kp, t)) => (kp.clone(), t),
        None => {
            let (kp, t) = timed(|| detector.detect(cloud, detector_seeds.0));
            (kp?, t)
        }
    };
    let (kq, kq_time) = timed(|| detector.detect(&transformed, detector_seeds.1));
    let kq = kq?;
    let repeatable = count_repeatable(cloud, &kp.indices, transform, &transformed, &kq.indices, epsilon)?;
    Ok(TrialResult {
        trial: 0,
        total_keypoints: kp.len(),
        query_keypoints: kq.len(),
        repeatable_keypoints: repeatable,
        relative_repeatability: ratio(repeatable, kp.len()),
        detect_time_seconds: 0.5 * (kp_time + kq_time),
    })
}

/// Repeatability of `detector` on `cloud` over `config.trials` random rigid
/// transforms with optional noise.
pub fn evaluate_repeatability(
    cloud: &ColoredPointCloud,
    detector: &dyn KeypointDetector,
    config: &RepeatabilityConfig,
) -> Result<RepeatabilityReport> {
    config.validate()?;
    let cached = if detector.is_deterministic() {
        let (kp, t) = timed(|| detector.detect(cloud, config.detector_seed_for(0, false)));
        Some((kp?, t))
    } else {
        None
    };
    let mut trials = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        let transform = config.transform_for_trial(trial);
        let mut result = evaluate_trial(
            cloud,
            detector,
            &transform,
            config.sigma,
            config.noise_seed_for_trial(trial),
            config.epsilon,
            (config.detector_seed_for(trial, false), config.detector_seed_for(trial, true)),
            cached.as_ref().map(|(kp, t)| (kp, *t)),
        )?;
        result.trial = trial;
        log::debug!(
            "trial {trial}: {}/{} repeatable ({} keypoints in transformed cloud)",
            result.repeatable_keypoints,
            result.total_keypoints,
            result.query_keypoints
        );
        trials.push(result);
    }
    let total: usize = trials.iter().map(|t| t.total_keypoints).sum();
    let repeatable: usize = trials.iter().map(|t| t.repeatable_keypoints).sum();
    if total == 0 {
        log::warn!("detector '{}' found no keypoints on the source cloud", detector.name());
    }
    Ok(RepeatabilityReport {
        total_keypoints: total,
        repeatable_keypoints: repeatable,
        relative_repeatability: trials.iter().map(|t| t.relative_repeatability).sum::<f64>()
            / trials.len() as f64,
        detect_time_seconds: trials.iter().map(|t| t.detect_time_seconds).sum::<f64>() / trials.len() as f64,
        empty: total == 0,
        epsilon: config.epsilon,
        sigma: config.sigma,
        trials,
    })
}

/// Keypoint count the random baseline should draw to match `detector` on `cloud`.
pub fn random_matching_count(cloud: &ColoredPointCloud, detector: &dyn KeypointDetector) -> Result<usize> {
    Ok(detector.detect(cloud, 0)?.len().max(1))
}
