//! Python bindings: `import ced`.

use ced_core as core;
use ced_core::{
    CedDetector, CloudFormat, ColoredPoint, ColoredPointCloud, KeypointDetector, Mode, RandomDetector,
    RepeatabilityConfig, RigidTransform, SceneKind, SceneSpec,
};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn format_from(name: &str) -> PyResult<CloudFormat> {
    match name {
        "ply" => Ok(CloudFormat::PlyAscii),
        "ply-bin" | "ply_bin" => Ok(CloudFormat::PlyBinaryLe),
        "pcd" => Ok(CloudFormat::PcdAscii),
        other => Err(PyValueError::new_err(format!("unknown format '{other}'; use ply, ply-bin or pcd"))),
    }
}

/// A colored point cloud. Positions in meters, colors in [0, 1].
#[pyclass(name = "PointCloud", module = "ced")]
struct PyPointCloud {
    inner: ColoredPointCloud,
}

#[pymethods]
impl PyPointCloud {
    /// `positions` is a sequence of (x, y, z); `colors` an optional sequence
    /// of (r, g, b). Without a resolution it is estimated from the points.
    #[new]
    #[pyo3(signature = (positions, colors=None, resolution=None))]
    fn new(positions: Vec<[f64; 3]>, colors: Option<Vec<[f64; 3]>>, resolution: Option<f64>) -> PyResult<Self> {
        if let Some(c) = &colors {
            if c.len() != positions.len() {
                return Err(PyValueError::new_err(format!(
                    "{} positions but {} colors",
                    positions.len(),
                    c.len()
                )));
            }
        }
        let points: Vec<ColoredPoint> = positions
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let c = colors.as_ref().map_or([0.0; 3], |c| c[i]);
                ColoredPoint::new(p[0], p[1], p[2], c[0], c[1], c[2])
            })
            .collect();
        let res = resolution.unwrap_or_else(|| core::index::estimate_resolution(&points));
        let inner = ColoredPointCloud::new(points, res, colors.is_some()).map_err(err)?;
        Ok(Self { inner })
    }

    /// Reads a PLY or PCD file.
    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::read_cloud_file(path).map_err(err)?,
        })
    }

    /// Writes the cloud as `ply`, `ply-bin` or `pcd`.
    #[pyo3(signature = (path, format="ply-bin"))]
    fn write(&self, path: &str, format: &str) -> PyResult<()> {
        core::write_cloud_file(path, &self.inner, format_from(format)?).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "PointCloud({} points, resolution={}, has_color={})",
            self.inner.len(),
            self.inner.resolution(),
            self.inner.has_color()
        )
    }

    #[getter]
    fn resolution(&self) -> f64 {
        self.inner.resolution()
    }

    #[getter]
    fn has_color(&self) -> bool {
        self.inner.has_color()
    }

    fn positions(&self) -> Vec<[f64; 3]> {
        self.inner.points().iter().map(ColoredPoint::xyz).collect()
    }

    fn colors(&self) -> Vec<[f64; 3]> {
        self.inner.points().iter().map(|p| [p.r, p.g, p.b]).collect()
    }

    fn select(&self, indices: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.select(&indices).map_err(err)?,
        })
    }

    fn remove_invalid(&self) -> Self {
        Self {
            inner: core::remove_invalid(&self.inner),
        }
    }

    fn voxel_downsample(&self, leaf: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::voxel_downsample(&self.inner, leaf).map_err(err)?,
        })
    }

    /// Applies `x -> R x + t`; `rotation` is a row-major 3×3 matrix.
    fn transform(&self, rotation: [[f64; 3]; 3], translation: [f64; 3]) -> PyResult<Self> {
        let t = RigidTransform::from_rows(rotation, translation).map_err(err)?;
        Ok(Self {
            inner: core::apply_rigid_transform(&self.inner, &t).map_err(err)?,
        })
    }

    #[pyo3(signature = (sigma, seed=0))]
    fn add_noise(&self, sigma: f64, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: core::add_gaussian_noise(&self.inner, sigma, seed).map_err(err)?,
        })
    }
}

/// Detector parameters. Unset values follow the cloud: radius 5 × resolution,
/// `ced` for colored clouds and `ced3d` otherwise.
#[pyclass(name = "DetectorParams", module = "ced")]
struct PyDetectorParams {
    #[pyo3(get, set)]
    radius: Option<f64>,
    #[pyo3(get, set)]
    t_g: f64,
    #[pyo3(get, set)]
    t_c: f64,
    #[pyo3(get, set)]
    mode: Option<String>,
    #[pyo3(get, set)]
    min_neighbors: usize,
}

#[pymethods]
impl PyDetectorParams {
    #[new]
    #[pyo3(signature = (radius=None, t_g=core::detector::DEFAULT_T_G, t_c=core::detector::DEFAULT_T_C, mode=None, min_neighbors=core::detector::DEFAULT_MIN_NEIGHBORS))]
    fn new(radius: Option<f64>, t_g: f64, t_c: f64, mode: Option<String>, min_neighbors: usize) -> Self {
        Self {
            radius,
            t_g,
            t_c,
            mode,
            min_neighbors,
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "DetectorParams(radius={:?}, t_g={}, t_c={}, mode={:?}, min_neighbors={})",
            self.radius, self.t_g, self.t_c, self.mode, self.min_neighbors
        )
    }
}

impl PyDetectorParams {
    fn resolve(&self, cloud: &ColoredPointCloud) -> PyResult<core::DetectorParams> {
        let mut p = core::DetectorParams::for_cloud(cloud).with_thresholds(self.t_g, self.t_c);
        if let Some(r) = self.radius {
            p.radius = r;
        }
        if let Some(m) = &self.mode {
            p.mode = m.parse::<Mode>().map_err(err)?;
        }
        p.min_neighbors = self.min_neighbors;
        p.validate().map_err(err)?;
        Ok(p)
    }
}

fn resolve(params: Option<&PyDetectorParams>, cloud: &ColoredPointCloud) -> PyResult<core::DetectorParams> {
    match params {
        Some(p) => p.resolve(cloud),
        None => Ok(core::DetectorParams::for_cloud(cloud)),
    }
}

/// Keypoint indices, ascending.
#[pyfunction]
#[pyo3(signature = (cloud, params=None))]
fn detect(py: Python<'_>, cloud: &PyPointCloud, params: Option<PyRef<'_, PyDetectorParams>>) -> PyResult<Vec<usize>> {
    let p = resolve(params.as_deref(), &cloud.inner)?;
    let kp = py.detach(|| core::detect(&cloud.inner, &p)).map_err(err)?;
    Ok(kp.indices)
}

type Saliency = (Vec<f64>, Option<Vec<f64>>, Vec<bool>);

/// `(d_g, d_c, valid)`; `d_c` is None in geometry-only mode.
#[pyfunction]
#[pyo3(signature = (cloud, params=None))]
fn compute_saliency(
    py: Python<'_>,
    cloud: &PyPointCloud,
    params: Option<PyRef<'_, PyDetectorParams>>,
) -> PyResult<Saliency> {
    let p = resolve(params.as_deref(), &cloud.inner)?;
    let (g, c) = py
        .detach(|| {
            let index = core::build_index(&cloud.inner)?;
            core::compute_saliency(&cloud.inner, &index, &p)
        })
        .map_err(err)?;
    Ok((g.values().to_vec(), c.map(|c| c.values().to_vec()), g.valid().to_vec()))
}

/// `count` distinct indices drawn uniformly, ascending.
#[pyfunction]
#[pyo3(signature = (cloud, count, seed=0))]
fn detect_random(cloud: &PyPointCloud, count: usize, seed: u64) -> PyResult<Vec<usize>> {
    Ok(core::detect_random(&cloud.inner, count, seed).map_err(err)?.indices)
}

/// Synthetic scene: `plane`, `box_corner`, `checker_floor` or `room_composite`.
#[pyfunction]
#[pyo3(signature = (kind, extent=None, pitch=None, tile=None, jitter=None, color_noise=None, seed=None))]
fn generate_scene(
    kind: &str,
    extent: Option<f64>,
    pitch: Option<f64>,
    tile: Option<f64>,
    jitter: Option<f64>,
    color_noise: Option<f64>,
    seed: Option<u64>,
) -> PyResult<PyPointCloud> {
    let kind: SceneKind = kind.parse().map_err(err)?;
    let mut spec = SceneSpec::new(kind);
    spec.extent = extent.unwrap_or(spec.extent);
    spec.pitch = pitch.unwrap_or(spec.pitch);
    spec.tile = tile.unwrap_or(spec.tile);
    spec.jitter = jitter.unwrap_or(spec.jitter);
    spec.color_noise = color_noise.unwrap_or(spec.color_noise);
    spec.seed = seed.unwrap_or(spec.seed);
    Ok(PyPointCloud {
        inner: core::generate_scene(&spec).map_err(err)?,
    })
}

/// Repeatability over random rigid transforms. `detector` is `ced` (with
/// `params`) or `random` (drawing `count` points, by default as many as
/// `ced` finds). Returns a dict with the aggregate and per-trial values.
#[pyfunction]
#[pyo3(signature = (cloud, params=None, detector="ced", count=None, epsilon=None, sigma=None, trials=10, seed=1))]
#[allow(clippy::too_many_arguments)]
fn evaluate_repeatability<'py>(
    py: Python<'py>,
    cloud: &PyPointCloud,
    params: Option<PyRef<'_, PyDetectorParams>>,
    detector: &str,
    count: Option<usize>,
    epsilon: Option<f64>,
    sigma: Option<f64>,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let c = &cloud.inner;
    let ced = CedDetector::new(resolve(params.as_deref(), c)?);
    let mut config = RepeatabilityConfig::for_resolution(c.resolution()).with_trials(trials);
    if let Some(e) = epsilon {
        config.epsilon = e;
    }
    if let Some(s) = sigma {
        config.sigma = s;
    }
    config.transform_seed = seed;
    config.noise_seed = seed.wrapping_add(1);
    config.detector_seed = seed.wrapping_add(2);
    let report = py
        .detach(|| -> core::Result<_> {
            match detector {
                "ced" => core::evaluate_repeatability(c, &ced, &config),
                "random" => {
                    let count = match count {
                        Some(n) => n,
                        None => core::eval::random_matching_count(c, &ced)?,
                    };
                    let det: &dyn KeypointDetector = &RandomDetector { count };
                    core::evaluate_repeatability(c, det, &config)
                }
                other => Err(core::Error::InvalidParams(format!("unknown detector '{other}'"))),
            }
        })
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("relative_repeatability", report.relative_repeatability)?;
    d.set_item("total_keypoints", report.total_keypoints)?;
    d.set_item("repeatable_keypoints", report.repeatable_keypoints)?;
    d.set_item("empty", report.empty)?;
    d.set_item("epsilon", report.epsilon)?;
    d.set_item("sigma", report.sigma)?;
    d.set_item(
        "trials",
        report
            .trials
            .iter()
            .map(|t| (t.total_keypoints, t.query_keypoints, t.repeatable_keypoints, t.relative_repeatability))
            .collect::<Vec<_>>(),
    )?;
    Ok(d)
}

#[pyfunction]
fn read_cloud(path: &str) -> PyResult<PyPointCloud> {
    PyPointCloud::read(path)
}

#[pyfunction]
#[pyo3(signature = (cloud, path, format="ply-bin"))]
fn write_cloud(cloud: &PyPointCloud, path: &str, format: &str) -> PyResult<()> {
    cloud.write(path, format)
}

#[pymodule]
fn ced(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPointCloud>()?;
    m.add_class::<PyDetectorParams>()?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(compute_saliency, m)?)?;
    m.add_function(wrap_pyfunction!(detect_random, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scene, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_repeatability, m)?)?;
    m.add_function(wrap_pyfunction!(read_cloud, m)?)?;
    m.add_function(wrap_pyfunction!(write_cloud, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
