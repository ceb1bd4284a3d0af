//! Keypoint detection for colored point clouds based on centroid distance.
//!
//! A point is salient when it lies far from the centroid of its spherical
//! neighborhood, measured in 3D space and, separately, in RGB space. Keypoints
//! are chosen by a non-maximum suppression that filters on each modality's
//! threshold and ranks by the product of the saliencies.
//!
//! ```
//! use ced_core::{detect, generate_scene, DetectorParams, SceneKind, SceneSpec};
//!
//! let scene = generate_scene(&SceneSpec::new(SceneKind::CheckerFloor)).unwrap();
//! let params = DetectorParams::for_resolution(scene.resolution());
//! let keypoints = detect(&scene, &params).unwrap();
//! assert!(!keypoints.is_empty());
//! ```

pub mod baseline;
pub mod cloud;
pub mod detector;
pub mod error;
pub mod eval;
pub mod export;
pub mod index;
pub mod io;
pub mod transform;

pub use baseline::detect_random;
pub use cloud::{
    add_gaussian_noise, apply_rigid_transform, remove_invalid, voxel_downsample, ColoredPoint,
    ColoredPointCloud,
};
pub use detector::{
    compute_saliency, detect, detect_detailed, detect_with_index, geometric_centroid,
    multimodal_nms, photometric_centroid, Detection, DetectorParams, KeypointSet, Modality, Mode,
    Neighborhoods, RadiusNeighborhoods, SaliencyField,
};
pub use error::{Error, Result};
pub use eval::{
    ablation_sweep, evaluate_repeatability, generate_scene, measure_runtime, AblationRow,
    CedDetector, KeypointDetector, RandomDetector, RepeatabilityConfig, RepeatabilityReport,
    RuntimeStats, SceneKind, SceneSpec,
};
pub use index::{build_index, radius_neighbors, SpatialIndex};
pub use io::{parse_cloud, read_cloud_file, write_cloud, write_cloud_file, CloudFormat};
pub use transform::RigidTransform;
