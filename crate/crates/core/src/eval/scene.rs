use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cloud::{ColoredPoint, ColoredPointCloud};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SceneKind {
    /// Square grid in the `z = 0` plane centered on the origin, one color.
    Plane,
    /// Surface of an axis-aligned cube centered on the origin. The corner of
    /// interest is its minimum vertex; the other seven are mirror images.
    BoxCorner,
    /// Like [`Plane`](Self::Plane) with alternating tile colors.
    CheckerFloor,
    /// Inside of a closed box-shaped room: checker floor, colored walls and
    /// ceiling. Its eight inner corners are box corners.
    RoomComposite,
}

impl fmt::Display for SceneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SceneKind::Plane => "plane",
            SceneKind::BoxCorner => "box_corner",
            SceneKind::CheckerFloor => "checker_floor",
            SceneKind::RoomComposite => "room_composite",
        })
    }
}

impl FromStr for SceneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "plane" => Ok(Self::Plane),
            "box_corner" | "box" => Ok(Self::BoxCorner),
            "checker_floor" | "checker" => Ok(Self::CheckerFloor),
            "room_composite" | "room" => Ok(Self::RoomComposite),
            _ => Err(Error::InvalidSpec(format!("unknown scene kind '{s}'"))),
        }
    }
}

/// Parameters of a synthetic scene. All lengths in meters, colors as 8-bit RGB.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub kind: SceneKind,
    /// Side of the plane / floor / cube.
    pub extent: f64,
    /// Grid spacing; also the resolution of the generated cloud.
    pub pitch: f64,
    /// Checker tile side.
    pub tile: f64,
    /// Primary color (plane, first checker color, box).
    pub color_a: [u8; 3],
    /// Second checker color.
    pub color_b: [u8; 3],
    /// Gaussian color noise, standard deviation in 8-bit levels.
    pub color_noise: f64,
    /// In-surface position jitter, uniform in `±jitter * pitch`.
    pub jitter: f64,
    pub seed: u64,
}

const WALL_X_COLOR: [u8; 3] = [200, 40, 40];
const WALL_Y_COLOR: [u8; 3] = [40, 70, 200];
const CEILING_COLOR: [u8; 3] = [220, 200, 120];

impl SceneSpec {
    /// Defaults per kind: 1 m at 0.01 m pitch with 0.2 m tiles. The room is a
    /// sensor-like scene with sampling jitter and color noise; the other kinds
    /// are exact grids.
    pub fn new(kind: SceneKind) -> Self {
        let room = kind == SceneKind::RoomComposite;
        Self {
            kind,
            extent: if room { 0.7 } else { 1.0 },
            pitch: 0.01,
            tile: if room { 0.35 } else { 0.2 },
            color_a: [230, 230, 230],
            color_b: [30, 30, 30],
            color_noise: if room { 4.0 } else { 0.0 },
            jitter: if room { 0.2 } else { 0.0 },
            seed: 7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.pitch) {
            return Err(Error::InvalidSpec(format!("pitch must be positive, got {}", self.pitch)));
        }
        if !positive(self.extent) || self.extent < self.pitch {
            return Err(Error::InvalidSpec(format!(
                "extent must be at least one pitch, got {}",
                self.extent
            )));
        }
        if !positive(self.tile) {
            return Err(Error::InvalidSpec(format!("tile must be positive, got {}", self.tile)));
        }
        if !(0.0..0.5).contains(&self.jitter) {
            return Err(Error::InvalidSpec(format!(
                "jitter must lie in [0, 0.5) pitches, got {}",
                self.jitter
            )));
        }
        if !(self.color_noise >= 0.0 && self.color_noise.is_finite()) {
            return Err(Error::InvalidSpec("color noise must be non-negative".into()));
        }
        if self.extent / self.pitch > 1e5 {
            return Err(Error::InvalidSpec("extent / pitch too large".into()));
        }
        Ok(())
    }

    /// Number of grid steps along the extent.
    fn steps(&self) -> i64 {
        (self.extent / self.pitch).round() as i64
    }
}

/// Lattice points `(i, j, k)` scaled by the pitch, with per-axis jitter on the
/// axes flagged free.
struct Builder<'a> {
    spec: &'a SceneSpec,
    rng: ChaCha8Rng,
    noise: Option<Normal<f64>>,
    points: Vec<ColoredPoint>,
}

impl<'a> Builder<'a> {
    fn new(spec: &'a SceneSpec) -> Self {
        Self {
            spec,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            noise: (spec.color_noise > 0.0).then(|| Normal::new(0.0, spec.color_noise).unwrap()),
            points: Vec::new(),
        }
    }

    fn position(&mut self, lattice: [i64; 3], free: [bool; 3]) -> [f64; 3] {
        let mut p = lattice.map(|v| v as f64 * self.spec.pitch);
        if self.spec.jitter > 0.0 {
            let amp = self.spec.jitter * self.spec.pitch;
            for a in 0..3 {
                if free[a] {
                    p[a] += self.rng.random_range(-amp..amp);
                }
            }
        }
        p
    }

    fn push(&mut self, p: [f64; 3], color: [u8; 3]) {
        let c = color.map(|v| {
            let level = match &self.noise {
                Some(n) => (v as f64 + n.sample(&mut self.rng)).round().clamp(0.0, 255.0),
                None => v as f64,
            };
            level / 255.0
        });
        self.points.push(ColoredPoint::new(p[0], p[1], p[2], c[0], c[1], c[2]));
    }

    fn checker_color(&self, x: f64, y: f64) -> [u8; 3] {
        let tx = (x / self.spec.tile).floor() as i64;
        let ty = (y / self.spec.tile).floor() as i64;
        if (tx + ty).rem_euclid(2) == 0 {
            self.spec.color_a
        } else {
            self.spec.color_b
        }
    }

    /// Floor grid over `[-m/2, m - m/2]²`; lattice points mirror exactly
    /// through the origin when `m` is even.
    fn floor(&mut self, m: i64, checker: bool) {
        let h = m / 2;
        for j in 0..=m {
            for i in 0..=m {
                let p = self.position([i - h, j - h, 0], [i > 0 && i < m, j > 0 && j < m, false]);
                let color = if checker {
                    self.checker_color(p[0], p[1])
                } else {
                    self.spec.color_a
                };
                self.push(p, color);
            }
        }
    }

    /// Surface of the lattice box `[lo, hi]` (inclusive). Points on an edge
    /// jitter only along that edge.
    fn cuboid(
        &mut self,
        lo: [i64; 3],
        hi: [i64; 3],
        color: impl Fn(&Self, [i64; 3], [f64; 3]) -> [u8; 3],
    ) {
        for k in lo[2]..=hi[2] {
            for j in lo[1]..=hi[1] {
                for i in lo[0]..=hi[0] {
                    let l = [i, j, k];
                    let on_face = [0, 1, 2].map(|a| l[a] == lo[a] || l[a] == hi[a]);
                    if !on_face.iter().any(|&f| f) {
                        continue;
                    }
                    let p = self.position(l, on_face.map(|f| !f));
                    let c = color(self, l, p);
                    self.push(p, c);
                }
            }
        }
    }
}

/// Generates a deterministic synthetic cloud; resolution equals the pitch.
pub fn generate_scene(spec: &SceneSpec) -> Result<ColoredPointCloud> {
    spec.validate()?;
    let m = spec.steps();
    let mut b = Builder::new(spec);
    match spec.kind {
        SceneKind::Plane => b.floor(m, false),
        SceneKind::CheckerFloor => b.floor(m, true),
        SceneKind::BoxCorner => {
            let h = m / 2;
            b.cuboid([-h; 3], [m - h; 3], |b, _, _| b.spec.color_a)
        }
        SceneKind::RoomComposite => {
            // inside of a closed box room: checker floor, four walls, ceiling
            let height = (0.5 * m as f64).round().max(2.0) as i64;
            b.cuboid([0, 0, 0], [m, m, height], |b, l, p| {
                if l[2] == 0 {
                    b.checker_color(p[0], p[1])
                } else if l[2] == height {
                    CEILING_COLOR
                } else if l[0] == 0 || l[0] == m {
                    WALL_X_COLOR
                } else {
                    WALL_Y_COLOR
                }
            });
        }
    }
    ColoredPointCloud::new(b.points, spec.pitch, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_grid_count() {
        let c = generate_scene(&SceneSpec::new(SceneKind::Plane)).unwrap();
        assert_eq!(c.len(), 101 * 101);
        assert_eq!(c.resolution(), 0.01);
        let first = c.points()[0].color();
        assert!(c.points().iter().all(|p| p.color() == first));
    }

    #[test]
    fn checker_boundaries_at_tile_multiples() {
        let spec = SceneSpec::new(SceneKind::CheckerFloor);
        let c = generate_scene(&spec).unwrap();
        let a = spec.color_a.map(|v| v as f64 / 255.0);
        for p in c.points() {
            let parity = ((p.gx / 0.2).floor() as i64 + (p.gy / 0.2).floor() as i64) % 2;
            assert_eq!(parity == 0, [p.r, p.g, p.b] == a, "{p:?}");
        }
    }

    #[test]
    fn cube_has_single_apex() {
        let mut spec = SceneSpec::new(SceneKind::BoxCorner);
        spec.extent = 0.3;
        let c = generate_scene(&spec).unwrap();
        assert_eq!(c.len(), 6 * 30 * 30 + 2);
        let lo = c.points().iter().map(|p| p.gx).fold(f64::INFINITY, f64::min);
        assert_eq!(lo, -15.0 * 0.01);
        assert_eq!(c.points().iter().filter(|p| p.xyz() == [lo; 3]).count(), 1);
    }

    #[test]
    fn deterministic_and_validated() {
        let spec = SceneSpec::new(SceneKind::RoomComposite);
        let a = generate_scene(&spec).unwrap();
        assert_eq!(a, generate_scene(&spec).unwrap());
        assert!((15_000..25_000).contains(&a.len()), "{}", a.len());
        for bad in [
            SceneSpec { pitch: 0.0, ..spec.clone() },
            SceneSpec { extent: -1.0, ..spec.clone() },
            SceneSpec { jitter: 0.5, ..spec.clone() },
            SceneSpec { tile: 0.0, ..spec.clone() },
        ] {
            assert!(matches!(generate_scene(&bad), Err(Error::InvalidSpec(_))));
        }
        assert_eq!("room-composite".parse::<SceneKind>().unwrap(), SceneKind::RoomComposite);
    }
}
