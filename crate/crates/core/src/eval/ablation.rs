use super::repeatability::{evaluate_repeatability, RepeatabilityConfig};
use super::CedDetector;
use crate::cloud::ColoredPointCloud;
use crate::detector::{DetectorParams, MAX_T_C, MAX_T_G};
use crate::error::{Error, Result};

/// One threshold setting of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub t_g: f64,
    pub t_c: f64,
    /// Keypoints found on the untransformed cloud.
    pub keypoint_count: usize,
    pub repeatability: f64,
    /// Mean seconds per detector call.
    pub runtime_seconds: f64,
    pub epsilon: f64,
    pub sigma: f64,
}

/// Evaluates every `(t_g, t_c)` pair, `t_g` outermost, holding all other
/// parameters at `fixed`.
pub fn ablation_sweep(
    cloud: &ColoredPointCloud,
    t_g_values: &[f64],
    t_c_values: &[f64],
    fixed: &DetectorParams,
    config: &RepeatabilityConfig,
) -> Result<Vec<AblationRow>> {
    if t_g_values.is_empty() || t_c_values.is_empty() {
        return Err(Error::InvalidParams("threshold lists must be non-empty".into()));
    }
    if let Some(v) = t_g_values.iter().find(|v| !(0.0..=MAX_T_G).contains(*v)) {
        return Err(Error::InvalidParams(format!("t_g {v} outside [0, {MAX_T_G}]")));
    }
    if let Some(v) = t_c_values.iter().find(|v| !(0.0..=MAX_T_C).contains(*v)) {
        return Err(Error::InvalidParams(format!("t_c {v} outside [0, {MAX_T_C}]")));
    }
    let mut rows = Vec::with_capacity(t_g_values.len() * t_c_values.len());
    for &t_g in t_g_values {
        for &t_c in t_c_values {
            let params = fixed.with_thresholds(t_g, t_c);
            params.validate()?;
            let report = evaluate_repeatability(cloud, &CedDetector::new(params), config)?;
            let keypoint_count = report.trials.first().map_or(0, |t| t.total_keypoints);
            log::info!(
                "t_g={t_g} t_c={t_c}: {keypoint_count} keypoints, repeatability {:.4}",
                report.relative_repeatability
            );
            rows.push(AblationRow {
                t_g,
                t_c,
                keypoint_count,
                repeatability: report.relative_repeatability,
                runtime_seconds: report.detect_time_seconds,
                epsilon: config.epsilon,
                sigma: config.sigma,
            });
        }
    }
    Ok(rows)
}
