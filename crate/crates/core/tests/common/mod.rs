//! Brute-force reference implementations used by the integration tests.
//!
//! Nothing here goes through the crate's index, detector or matching code;
//! only plain data types are shared.
#![allow(dead_code)]

use ced_core::{ColoredPoint, ColoredPointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn sq_dist(a: &ColoredPoint, b: [f64; 3]) -> f64 {
    let dx = a.gx - b[0];
    let dy = a.gy - b[1];
    let dz = a.gz - b[2];
    dx * dx + dy * dy + dz * dz
}

/// All `j` with `|p_j - center| < r`, ascending.
pub fn linear_neighbors(points: &[ColoredPoint], center: [f64; 3], r: f64) -> Vec<usize> {
    let r2 = r * r;
    (0..points.len()).filter(|&j| sq_dist(&points[j], center) < r2).collect()
}

/// Plain running-sum mean of three components.
fn naive_mean(points: &[ColoredPoint], support: &[usize], get: impl Fn(&ColoredPoint) -> [f64; 3]) -> [f64; 3] {
    let mut s = [0.0; 3];
    for &j in support {
        let v = get(&points[j]);
        s[0] += v[0];
        s[1] += v[1];
        s[2] += v[2];
    }
    let n = support.len() as f64;
    [s[0] / n, s[1] / n, s[2] / n]
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// d_g of point `i` with a compensated-sum centroid and linear-scan support.
pub fn accurate_dg(points: &[ColoredPoint], i: usize, r: f64) -> f64 {
    let p = points[i].xyz();
    let support = linear_neighbors(points, p, r);
    let n = support.len() as f64;
    let c: Vec<f64> = (0..3)
        .map(|a| compensated_sum(support.iter().map(|&j| points[j].xyz()[a])) / n)
        .collect();
    ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt()
}

/// Saliency of every point as literally defined: strict-radius support by
/// linear scan, mean position and color, L2 and L1 distances. `None` marks a
/// support smaller than `min_neighbors`.
pub fn oracle_saliency(cloud: &ColoredPointCloud, r: f64, min_neighbors: usize) -> Vec<Option<(f64, f64)>> {
    let pts = cloud.points();
    (0..pts.len())
        .map(|i| {
            let p = &pts[i];
            let support = linear_neighbors(pts, p.xyz(), r);
            if support.len() < min_neighbors {
                return None;
            }
            let g = naive_mean(pts, &support, |q| [q.gx, q.gy, q.gz]);
            let c = naive_mean(pts, &support, |q| [q.r, q.g, q.b]);
            let dg = {
                let dx = p.gx - g[0];
                let dy = p.gy - g[1];
                let dz = p.gz - g[2];
                (dx * dx + dy * dy + dz * dz).sqrt()
            };
            let dc = (p.r - c[0]).abs() + (p.g - c[1]).abs() + (p.b - c[2]).abs();
            Some((dg, dc))
        })
        .collect()
}

/// Multi-modal non-maximum suppression written out step by step over
/// per-modality fields. `fields[m][i]` is `None` for invalid points.
pub fn oracle_nms(fields: &[Vec<Option<f64>>], thresholds: &[f64], neighbors: &[Vec<usize>]) -> Vec<usize> {
    let n = fields[0].len();
    let value = |i: usize| -> Option<Vec<f64>> { fields.iter().map(|f| f[i]).collect() };
    let mut keypoints = Vec::new();
    'points: for i in 0..n {
        let Some(vi) = value(i) else { continue };
        if vi.iter().zip(thresholds).all(|(v, t)| v < t) {
            continue;
        }
        let mut pi = vi[0];
        for v in &vi[1..] {
            pi *= v;
        }
        for &j in &neighbors[i] {
            let Some(vj) = value(j) else { continue };
            let mut pj = vj[0];
            for v in &vj[1..] {
                pj *= v;
            }
            if pi < pj {
                continue 'points;
            }
        }
        keypoints.push(i);
    }
    keypoints
}

/// The full detector by brute force: `color` selects the two-modality
/// variant, otherwise geometry only.
pub fn oracle_detect(cloud: &ColoredPointCloud, r: f64, t_g: f64, t_c: f64, min_neighbors: usize, color: bool) -> Vec<usize> {
    let pts = cloud.points();
    let sal = oracle_saliency(cloud, r, min_neighbors);
    let neighbors: Vec<Vec<usize>> = pts.iter().map(|p| linear_neighbors(pts, p.xyz(), r)).collect();
    let dg: Vec<Option<f64>> = sal.iter().map(|s| s.map(|v| v.0)).collect();
    if color {
        let dc: Vec<Option<f64>> = sal.iter().map(|s| s.map(|v| v.1)).collect();
        oracle_nms(&[dg, dc], &[t_g * r, t_c], &neighbors)
    } else {
        oracle_nms(&[dg], &[t_g * r], &neighbors)
    }
}

/// Source keypoints whose transformed position is strictly within `eps` of
/// some target keypoint, by scanning every target keypoint.
pub fn oracle_repeatable(
    source: &[[f64; 3]],
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
    targets: &[[f64; 3]],
    eps: f64,
) -> usize {
    source
        .iter()
        .filter(|p| {
            let q: Vec<f64> = (0..3)
                .map(|r| rotation[r][0] * p[0] + rotation[r][1] * p[1] + rotation[r][2] * p[2] + translation[r])
                .collect();
            targets.iter().any(|t| {
                let d = (t[0] - q[0]).powi(2) + (t[1] - q[1]).powi(2) + (t[2] - q[2]).powi(2);
                d.sqrt() < eps
            })
        })
        .count()
}

/// Uniform random cloud in `[0, side]³`; colors are drawn from a small
/// palette when `palette` is set so that exact ties occur.
pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize, side: f64, palette: bool) -> ColoredPointCloud {
    let colors: Vec<[f64; 3]> = (0..4).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
    let points = (0..n)
        .map(|_| {
            let c = if palette {
                colors[rng.random_range(0..colors.len())]
            } else {
                [rng.random(), rng.random(), rng.random()]
            };
            ColoredPoint::new(
                rng.random_range(0.0..side),
                rng.random_range(0.0..side),
                rng.random_range(0.0..side),
                c[0],
                c[1],
                c[2],
            )
        })
        .collect();
    ColoredPointCloud::new(points, side / (n as f64).cbrt(), true).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
