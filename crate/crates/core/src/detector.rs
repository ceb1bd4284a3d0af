//! Centroid-distance saliency and multi-modal non-maximum suppression.
//!
//! For a point `p` with support `N(p) = { q : |p - q| < r }` (which contains
//! `p` itself) the geometric saliency is the L2 distance from `p` to the mean
//! position of `N(p)`, and the photometric saliency is the L1 distance from the
//! color of `p` to the mean color of `N(p)`.
//!
//! A point becomes a keypoint when it is salient in at least one modality and
//! no neighbor has a strictly larger product of saliencies.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::cloud::ColoredPointCloud;
use crate::error::{Error, Result};
use crate::index::SpatialIndex;

pub const DEFAULT_RADIUS_FACTOR: f64 = 5.0;
pub const DEFAULT_T_G: f64 = 0.2;
pub const DEFAULT_T_C: f64 = 0.5;
pub const DEFAULT_MIN_NEIGHBORS: usize = 5;

pub const MAX_T_G: f64 = 1.0;
pub const MAX_T_C: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Geometry and color.
    Ced,
    /// Geometry only.
    Ced3d,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ced => "ced",
            Mode::Ced3d => "ced3d",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "ced" => Ok(Mode::Ced),
            "ced3d" => Ok(Mode::Ced3d),
            _ => Err(Error::InvalidParams(format!("unknown mode '{s}'"))),
        }
    }
}

/// Detector configuration.
///
/// `t_g` is a fraction of `radius` (a point is geometry-salient when
/// `d_g >= t_g * radius`); `t_c` is compared against the raw L1 color distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    pub radius: f64,
    pub t_g: f64,
    pub t_c: f64,
    pub mode: Mode,
    pub min_neighbors: usize,
}

impl DetectorParams {
    /// Defaults for a cloud sampled at `resolution`: radius of five samples.
    pub fn for_resolution(resolution: f64) -> Self {
        Self {
            radius: DEFAULT_RADIUS_FACTOR * resolution,
            t_g: DEFAULT_T_G,
            t_c: DEFAULT_T_C,
            mode: Mode::Ced,
            min_neighbors: DEFAULT_MIN_NEIGHBORS,
        }
    }

    pub fn for_cloud(cloud: &ColoredPointCloud) -> Self {
        let mut p = Self::for_resolution(cloud.resolution());
        if !cloud.has_color() {
            p.mode = Mode::Ced3d;
        }
        p
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_thresholds(mut self, t_g: f64, t_c: f64) -> Self {
        self.t_g = t_g;
        self.t_c = t_c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        if !(0.0..=MAX_T_G).contains(&self.t_g) {
            return Err(Error::InvalidParams(format!(
                "t_g must lie in [0, {MAX_T_G}], got {}",
                self.t_g
            )));
        }
        if !(0.0..=MAX_T_C).contains(&self.t_c) {
            return Err(Error::InvalidParams(format!(
                "t_c must lie in [0, {MAX_T_C}], got {}",
                self.t_c
            )));
        }
        if self.min_neighbors < 1 {
            return Err(Error::InvalidParams("min_neighbors must be at least 1".into()));
        }
        Ok(())
    }

    /// The absolute geometric threshold in meters.
    pub fn geometric_threshold(&self) -> f64 {
        self.t_g * self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    Geometric,
    Photometric,
    /// Any additional per-point response fed to [`multimodal_nms`].
    Other,
}

/// Per-point saliency of one modality, index-aligned with its cloud.
///
/// Invalid points (support smaller than `min_neighbors`) carry value 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyField {
    values: Vec<f64>,
    valid: Vec<bool>,
    modality: Modality,
}

impl SaliencyField {
    pub fn new(values: Vec<f64>, valid: Vec<bool>, modality: Modality) -> Result<Self> {
        if values.len() != valid.len() {
            return Err(Error::MisalignedFields);
        }
        Ok(Self {
            values,
            valid,
            modality,
        })
    }

    /// A field where every point is valid.
    pub fn from_values(values: Vec<f64>, modality: Modality) -> Self {
        let valid = vec![true; values.len()];
        Self {
            values,
            valid,
            modality,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.valid[i]
    }
}

/// Selected point indices (ascending, unique) and the parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointSet {
    pub indices: Vec<usize>,
    pub params: Option<DetectorParams>,
}

impl KeypointSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Mean position of the listed points, summed in list order.
pub fn geometric_centroid(cloud: &ColoredPointCloud, neighbors: &[usize]) -> Result<Vector3<f64>> {
    if neighbors.is_empty() {
        return Err(Error::EmptyNeighborhood);
    }
    let pts = cloud.points();
    let mut s = [0.0f64; 3];
    for &j in neighbors {
        let p = pts.get(j).ok_or(Error::IndexOutOfRange { index: j, len: pts.len() })?;
        s[0] += p.gx;
        s[1] += p.gy;
        s[2] += p.gz;
    }
    let n = neighbors.len() as f64;
    Ok(Vector3::new(s[0] / n, s[1] / n, s[2] / n))
}

/// Mean color of the listed points, summed in list order.
pub fn photometric_centroid(cloud: &ColoredPointCloud, neighbors: &[usize]) -> Result<Vector3<f64>> {
    if !cloud.has_color() {
        return Err(Error::NoColor);
    }
    if neighbors.is_empty() {
        return Err(Error::EmptyNeighborhood);
    }
    let pts = cloud.points();
    let mut s = [0.0f64; 3];
    for &j in neighbors {
        let p = pts.get(j).ok_or(Error::IndexOutOfRange { index: j, len: pts.len() })?;
        s[0] += p.r;
        s[1] += p.g;
        s[2] += p.b;
    }
    let n = neighbors.len() as f64;
    Ok(Vector3::new(s[0] / n, s[1] / n, s[2] / n))
}

#[inline]
fn l2(a: [f64; 3], b: Vector3<f64>) -> f64 {
    let dx = a[0] - b.x;
    let dy = a[1] - b.y;
    let dz = a[2] - b.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[inline]
fn l1(a: [f64; 3], b: Vector3<f64>) -> f64 {
    (a[0] - b.x).abs() + (a[1] - b.y).abs() + (a[2] - b.z).abs()
}

/// Geometric and (in [`Mode::Ced`]) photometric saliency of every point.
///
/// The per-point map runs on the current rayon pool; results do not depend on
/// how the range is partitioned.
pub fn compute_saliency(
    cloud: &ColoredPointCloud,
    index: &SpatialIndex,
    params: &DetectorParams,
) -> Result<(SaliencyField, Option<SaliencyField>)> {
    params.validate()?;
    if index.len() != cloud.len() {
        return Err(Error::IndexMismatch {
            expected: index.len(),
            found: cloud.len(),
        });
    }
    let with_color = params.mode == Mode::Ced;
    if with_color && !cloud.has_color() {
        return Err(Error::NoColor);
    }
    let r2 = params.radius * params.radius;
    let pts = cloud.points();
    let per_point: Vec<(f64, f64, bool)> = (0..pts.len())
        .into_par_iter()
        .map_init(Vec::new, |support, i| {
            let p = &pts[i];
            index.radius_search(pts, &p.xyz(), r2, support);
            if support.len() < params.min_neighbors {
                return (0.0, 0.0, false);
            }
            // support is non-empty and in range
            let d_g = l2(p.xyz(), geometric_centroid(cloud, support).unwrap());
            let d_c = if with_color {
                l1([p.r, p.g, p.b], photometric_centroid(cloud, support).unwrap())
            } else {
                0.0
            };
            (d_g, d_c, true)
        })
        .collect();

    let valid: Vec<bool> = per_point.iter().map(|t| t.2).collect();
    let geometric = SaliencyField {
        values: per_point.iter().map(|t| t.0).collect(),
        valid: valid.clone(),
        modality: Modality::Geometric,
    };
    let photometric = with_color.then(|| SaliencyField {
        values: per_point.iter().map(|t| t.1).collect(),
        valid,
        modality: Modality::Photometric,
    });
    Ok((geometric, photometric))
}

/// Source of per-point comparison neighborhoods for [`multimodal_nms`].
pub trait Neighborhoods: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes the neighbors of `i` into `out` (cleared first).
    fn neighbors_into(&self, i: usize, out: &mut Vec<usize>);
}

/// Strict fixed-radius neighborhoods answered by a [`SpatialIndex`].
pub struct RadiusNeighborhoods<'a> {
    cloud: &'a ColoredPointCloud,
    index: &'a SpatialIndex,
    r2: f64,
}

impl<'a> RadiusNeighborhoods<'a> {
    pub fn new(cloud: &'a ColoredPointCloud, index: &'a SpatialIndex, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::NonPositiveRadius(radius));
        }
        if index.len() != cloud.len() {
            return Err(Error::IndexMismatch {
                expected: index.len(),
                found: cloud.len(),
            });
        }
        Ok(Self {
            cloud,
            index,
            r2: radius * radius,
        })
    }
}

impl Neighborhoods for RadiusNeighborhoods<'_> {
    fn len(&self) -> usize {
        self.cloud.len()
    }

    fn neighbors_into(&self, i: usize, out: &mut Vec<usize>) {
        let pts = self.cloud.points();
        self.index.radius_search(pts, &pts[i].xyz(), self.r2, out);
    }
}

impl Neighborhoods for [Vec<usize>] {
    fn len(&self) -> usize {
        <[Vec<usize>]>::len(self)
    }

    fn neighbors_into(&self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        out.extend_from_slice(&self[i]);
    }
}

impl Neighborhoods for Vec<Vec<usize>> {
    fn len(&self) -> usize {
        Vec::len(self)
    }

    fn neighbors_into(&self, i: usize, out: &mut Vec<usize>) {
        self.as_slice().neighbors_into(i, out)
    }
}

/// Multi-modal non-maximum suppression.
///
/// Point `i` is kept iff it is valid in every field, at least one field has
/// `field[i] >= threshold` (a point below every threshold is discarded), and no
/// valid neighbor `j` has a strictly larger product of field values. Invalid
/// points neither get selected nor suppress others.
pub fn multimodal_nms<N: Neighborhoods + ?Sized>(
    fields: &[&SaliencyField],
    thresholds: &[f64],
    neighborhoods: &N,
) -> Result<Vec<usize>> {
    let Some(first) = fields.first() else {
        return Err(Error::MisalignedFields);
    };
    let n = first.len();
    if thresholds.len() != fields.len()
        || fields.iter().any(|f| f.len() != n)
        || neighborhoods.len() != n
    {
        return Err(Error::MisalignedFields);
    }
    let valid: Vec<bool> = (0..n).map(|i| fields.iter().all(|f| f.valid[i])).collect();
    let product: Vec<f64> = (0..n)
        .map(|i| {
            fields[1..]
                .iter()
                .fold(first.values[i], |acc, f| acc * f.values[i])
        })
        .collect();

    let keep: Vec<bool> = (0..n)
        .into_par_iter()
        .map_init(Vec::new, |support, i| {
            if !valid[i] {
                return false;
            }
            let below_all = fields
                .iter()
                .zip(thresholds)
                .all(|(f, &t)| f.values[i] < t);
            if below_all {
                return false;
            }
            neighborhoods.neighbors_into(i, support);
            !support
                .iter()
                .any(|&j| j < n && valid[j] && product[i] < product[j])
        })
        .collect();
    Ok(keep
        .iter()
        .enumerate()
        .filter_map(|(i, &k)| k.then_some(i))
        .collect())
}

/// A detection together with the saliency fields that produced it.
#[derive(Debug, Clone)]
pub struct Detection {
    pub keypoints: KeypointSet,
    pub geometric: SaliencyField,
    pub photometric: Option<SaliencyField>,
}

/// Runs the detector with an existing index over `cloud`.
pub fn detect_with_index(
    cloud: &ColoredPointCloud,
    index: &SpatialIndex,
    params: &DetectorParams,
) -> Result<Detection> {
    let (geometric, photometric) = compute_saliency(cloud, index, params)?;
    let neighborhoods = RadiusNeighborhoods::new(cloud, index, params.radius)?;
    let indices = match &photometric {
        Some(color) => {
            if color
                .values
                .iter()
                .zip(&color.valid)
                .all(|(&v, &ok)| !ok || v == 0.0)
            {
                log::warn!(
                    "photometric saliency is zero everywhere; every geometry-salient point \
                     ties at product 0. Consider the geometry-only mode (ced3d)."
                );
            }
            multimodal_nms(
                &[&geometric, color],
                &[params.geometric_threshold(), params.t_c],
                &neighborhoods,
            )?
        }
        None => multimodal_nms(&[&geometric], &[params.geometric_threshold()], &neighborhoods)?,
    };
    Ok(Detection {
        keypoints: KeypointSet {
            indices,
            params: Some(*params),
        },
        geometric,
        photometric,
    })
}

/// Builds an index and runs the detector, keeping the saliency fields.
pub fn detect_detailed(cloud: &ColoredPointCloud, params: &DetectorParams) -> Result<Detection> {
    params.validate()?;
    if params.mode == Mode::Ced && !cloud.has_color() {
        return Err(Error::NoColor);
    }
    let index = SpatialIndex::build(cloud)?;
    detect_with_index(cloud, &index, params)
}

/// Detects keypoints on `cloud`.
pub fn detect(cloud: &ColoredPointCloud, params: &DetectorParams) -> Result<KeypointSet> {
    detect_detailed(cloud, params).map(|d| d.keypoints)
}
