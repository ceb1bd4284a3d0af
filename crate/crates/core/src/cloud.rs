//! Colored points, clouds, preprocessing and perturbations.

use nalgebra::{Point3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::transform::RigidTransform;

/// One sample: a position in meters and an RGB color with channels in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ColoredPoint {
    pub gx: f64,
    pub gy: f64,
    pub gz: f64,
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl ColoredPoint {
    pub const fn new(gx: f64, gy: f64, gz: f64, r: f64, g: f64, b: f64) -> Self {
        Self { gx, gy, gz, r, g, b }
    }

    pub fn from_parts(position: Point3<f64>, color: Vector3<f64>) -> Self {
        Self::new(position.x, position.y, position.z, color.x, color.y, color.z)
    }

    #[inline]
    pub fn position(&self) -> Point3<f64> {
        Point3::new(self.gx, self.gy, self.gz)
    }

    #[inline]
    pub fn color(&self) -> Vector3<f64> {
        Vector3::new(self.r, self.g, self.b)
    }

    #[inline]
    pub fn xyz(&self) -> [f64; 3] {
        [self.gx, self.gy, self.gz]
    }

    pub fn is_finite(&self) -> bool {
        [self.gx, self.gy, self.gz, self.r, self.g, self.b]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// An ordered collection of colored points.
///
/// Indices are stable identifiers: every operation that neither adds nor
/// removes points keeps point `i` at index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoredPointCloud {
    points: Vec<ColoredPoint>,
    resolution: f64,
    has_color: bool,
}

impl ColoredPointCloud {
    pub fn new(points: Vec<ColoredPoint>, resolution: f64, has_color: bool) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidResolution(resolution));
        }
        Ok(Self {
            points,
            resolution,
            has_color,
        })
    }

    pub fn points(&self) -> &[ColoredPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<ColoredPoint> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sampling pitch in meters.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn has_color(&self) -> bool {
        self.has_color
    }

    pub fn with_resolution(mut self, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidResolution(resolution));
        }
        self.resolution = resolution;
        Ok(self)
    }

    /// The points at `indices`, in the given order, as a new cloud.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let points = indices
            .iter()
            .map(|&i| {
                self.points.get(i).copied().ok_or(Error::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            resolution: self.resolution,
            has_color: self.has_color,
        })
    }

    fn map_points(&self, f: impl FnMut(&ColoredPoint) -> ColoredPoint) -> Self {
        Self {
            points: self.points.iter().map(f).collect(),
            resolution: self.resolution,
            has_color: self.has_color,
        }
    }
}

/// Keeps exactly the points whose six fields are finite, in original order.
pub fn remove_invalid(cloud: &ColoredPointCloud) -> ColoredPointCloud {
    ColoredPointCloud {
        points: cloud
            .points
            .iter()
            .filter(|p| p.is_finite())
            .copied()
            .collect(),
        resolution: cloud.resolution,
        has_color: cloud.has_color,
    }
}

/// Integer cell of a coordinate for a grid of edge `leaf`; cells are half-open.
#[inline]
pub(crate) fn voxel_key(p: &ColoredPoint, leaf: f64) -> [i64; 3] {
    [
        (p.gx / leaf).floor() as i64,
        (p.gy / leaf).floor() as i64,
        (p.gz / leaf).floor() as i64,
    ]
}

/// Replaces the points of every occupied voxel with their mean.
///
/// Output is ordered by ascending `(kx, ky, kz)` voxel key; members of a voxel
/// are summed in input order.
pub fn voxel_downsample(cloud: &ColoredPointCloud, leaf: f64) -> Result<ColoredPointCloud> {
    if !(leaf > 0.0 && leaf.is_finite()) {
        return Err(Error::NonPositiveLeaf(leaf));
    }
    let mut keyed: Vec<([i64; 3], usize)> = cloud
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| (voxel_key(p, leaf), i))
        .collect();
    // (key, index) ordering keeps input order inside a voxel
    keyed.sort_unstable();

    let mut out = Vec::new();
    let mut start = 0;
    while start < keyed.len() {
        let key = keyed[start].0;
        let mut end = start;
        let mut sum = [0.0f64; 6];
        while end < keyed.len() && keyed[end].0 == key {
            let p = &cloud.points[keyed[end].1];
            for (s, v) in sum.iter_mut().zip([p.gx, p.gy, p.gz, p.r, p.g, p.b]) {
                *s += v;
            }
            end += 1;
        }
        let n = (end - start) as f64;
        out.push(ColoredPoint::new(
            sum[0] / n,
            sum[1] / n,
            sum[2] / n,
            sum[3] / n,
            sum[4] / n,
            sum[5] / n,
        ));
        start = end;
    }
    Ok(ColoredPointCloud {
        points: out,
        resolution: leaf,
        has_color: cloud.has_color,
    })
}

/// Maps every position through `transform`; colors and order are unchanged.
pub fn apply_rigid_transform(
    cloud: &ColoredPointCloud,
    transform: &RigidTransform,
) -> Result<ColoredPointCloud> {
    transform.validate()?;
    Ok(cloud.map_points(|p| ColoredPoint::from_parts(transform.apply(&p.position()), p.color())))
}

/// Adds independent zero-mean Gaussian noise of standard deviation `sigma` to
/// every coordinate.
///
/// Draws come from a ChaCha8 stream seeded with `seed` through the ziggurat
/// normal sampler, three per point in x, y, z order. Colors are untouched.
pub fn add_gaussian_noise(
    cloud: &ColoredPointCloud,
    sigma: f64,
    seed: u64,
) -> Result<ColoredPointCloud> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::NegativeSigma(sigma));
    }
    if sigma == 0.0 {
        return Ok(cloud.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|_| Error::NegativeSigma(sigma))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(cloud.map_points(|p| {
        let mut q = *p;
        q.gx += normal.sample(&mut rng);
        q.gy += normal.sample(&mut rng);
        q.gz += normal.sample(&mut rng);
        q
    }))
}
