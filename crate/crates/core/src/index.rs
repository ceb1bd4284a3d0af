//! Balanced k-d tree over point positions with exact fixed-radius queries.
//!
//! Neighborhoods use the strict rule `|p - q|² < r²`: a point at exactly `r`
//! is excluded, and a query point is always its own neighbor.

use crate::cloud::{ColoredPoint, ColoredPointCloud};
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 16;

/// Resolution assumed when a cloud is too small or degenerate to estimate one.
pub const FALLBACK_RESOLUTION: f64 = 0.01;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: u32, end: u32 },
    Split { axis: u8, value: f64, left: u32, right: u32 },
}

/// Immutable k-d tree over the positions of a source cloud.
///
/// The tree stores a permutation of source indices only; coordinates are read
/// from the cloud passed to each query, which must be the cloud the index was
/// built from.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    nodes: Vec<Node>,
    perm: Vec<u32>,
}

#[inline]
fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

impl SpatialIndex {
    /// Builds an index over all points of a non-empty cloud.
    pub fn build(cloud: &ColoredPointCloud) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        Ok(Self::build_points(cloud.points()))
    }

    pub(crate) fn build_points(points: &[ColoredPoint]) -> Self {
        assert!(points.len() < u32::MAX as usize, "cloud too large for u32 indices");
        let mut perm: Vec<u32> = (0..points.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1);
        build_node(points, &mut perm, 0, &mut nodes);
        Self { nodes, perm }
    }

    /// Number of indexed points.
    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    fn check(&self, cloud: &ColoredPointCloud) -> Result<()> {
        if cloud.len() != self.len() {
            return Err(Error::IndexMismatch {
                expected: self.len(),
                found: cloud.len(),
            });
        }
        Ok(())
    }

    /// Indices `j` with `|p_query - p_j| < r`, ascending, including `query_index`.
    pub fn radius_neighbors(
        &self,
        cloud: &ColoredPointCloud,
        query_index: usize,
        r: f64,
    ) -> Result<Vec<usize>> {
        self.check(cloud)?;
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        let query = cloud.points().get(query_index).ok_or(Error::IndexOutOfRange {
            index: query_index,
            len: cloud.len(),
        })?;
        let mut out = Vec::new();
        self.radius_search(cloud.points(), &query.xyz(), r * r, &mut out);
        Ok(out)
    }

    /// Like [`radius_neighbors`](Self::radius_neighbors) around an arbitrary
    /// position; `out` is cleared first. No argument validation.
    pub fn radius_search(&self, points: &[ColoredPoint], center: &[f64; 3], r2: f64, out: &mut Vec<usize>) {
        out.clear();
        self.visit(points, center, r2, 0, &mut |i| {
            out.push(i);
            false
        });
        out.sort_unstable();
    }

    /// Whether any indexed point lies strictly within `sqrt(r2)` of `center`.
    pub fn any_within(&self, points: &[ColoredPoint], center: &[f64; 3], r2: f64) -> bool {
        self.visit(points, center, r2, 0, &mut |_| true)
    }

    /// Visits every point within range; stops early once `f` returns true.
    fn visit(
        &self,
        points: &[ColoredPoint],
        center: &[f64; 3],
        r2: f64,
        node: usize,
        f: &mut impl FnMut(usize) -> bool,
    ) -> bool {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.perm[start as usize..end as usize] {
                    if dist2(center, &points[i as usize].xyz()) < r2 && f(i as usize) {
                        return true;
                    }
                }
                false
            }
            Node::Split { axis, value, left, right } => {
                let diff = center[axis as usize] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                if self.visit(points, center, r2, near as usize, f) {
                    return true;
                }
                diff * diff < r2 && self.visit(points, center, r2, far as usize, f)
            }
        }
    }

    /// Closest other point to `query_index` (ties to the lowest index).
    pub(crate) fn nearest_other(&self, points: &[ColoredPoint], query_index: usize) -> Option<(usize, f64)> {
        let center = points[query_index].xyz();
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_rec(points, &center, query_index, 0, &mut best);
        (best.0 != usize::MAX).then(|| (best.0, best.1.sqrt()))
    }

    fn nearest_rec(
        &self,
        points: &[ColoredPoint],
        center: &[f64; 3],
        skip: usize,
        node: usize,
        best: &mut (usize, f64),
    ) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.perm[start as usize..end as usize] {
                    let i = i as usize;
                    if i == skip {
                        continue;
                    }
                    let d = dist2(center, &points[i].xyz());
                    if d < best.1 || (d == best.1 && i < best.0) {
                        *best = (i, d);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = center[axis as usize] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.nearest_rec(points, center, skip, near as usize, best);
                if diff * diff <= best.1 {
                    self.nearest_rec(points, center, skip, far as usize, best);
                }
            }
        }
    }
}

fn build_node(points: &[ColoredPoint], perm: &mut [u32], offset: usize, nodes: &mut Vec<Node>) -> u32 {
    let id = nodes.len() as u32;
    if perm.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: offset as u32,
            end: (offset + perm.len()) as u32,
        });
        return id;
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &i in perm.iter() {
        let p = points[i as usize].xyz();
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let axis = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap();
    if !(hi[axis] > lo[axis]) {
        // all points coincide
        nodes.push(Node::Leaf {
            start: offset as u32,
            end: (offset + perm.len()) as u32,
        });
        return id;
    }
    let mid = perm.len() / 2;
    let coord = |i: &u32| points[*i as usize].xyz()[axis];
    perm.select_nth_unstable_by(mid, |a, b| coord(a).total_cmp(&coord(b)));
    let value = coord(&perm[mid]);
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (lower, upper) = perm.split_at_mut(mid);
    let left = build_node(points, lower, offset, nodes);
    let right = build_node(points, upper, offset + mid, nodes);
    nodes[id as usize] = Node::Split {
        axis: axis as u8,
        value,
        left,
        right,
    };
    id
}

/// Convenience wrapper for [`SpatialIndex::build`].
pub fn build_index(cloud: &ColoredPointCloud) -> Result<SpatialIndex> {
    SpatialIndex::build(cloud)
}

/// Convenience wrapper for [`SpatialIndex::radius_neighbors`].
pub fn radius_neighbors(
    index: &SpatialIndex,
    cloud: &ColoredPointCloud,
    query_index: usize,
    r: f64,
) -> Result<Vec<usize>> {
    index.radius_neighbors(cloud, query_index, r)
}

/// Median distance from a point to its nearest distinct neighbor, over up to
/// 1000 evenly strided finite points.
pub fn estimate_resolution(points: &[ColoredPoint]) -> f64 {
    let finite: Vec<ColoredPoint> = points
        .iter()
        .filter(|p| p.gx.is_finite() && p.gy.is_finite() && p.gz.is_finite())
        .copied()
        .collect();
    if finite.len() < 2 {
        return FALLBACK_RESOLUTION;
    }
    let index = SpatialIndex::build_points(&finite);
    let stride = (finite.len() / 1000).max(1);
    let mut d: Vec<f64> = (0..finite.len())
        .step_by(stride)
        .filter_map(|i| index.nearest_other(&finite, i))
        .map(|(_, d)| d)
        .filter(|d| *d > 0.0)
        .collect();
    if d.is_empty() {
        return FALLBACK_RESOLUTION;
    }
    let mid = d.len() / 2;
    *d.select_nth_unstable_by(mid, f64::total_cmp).1
}
