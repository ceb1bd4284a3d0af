mod common;

use ced_core::{
    apply_rigid_transform, build_index, compute_saliency, detect, remove_invalid, ColoredPoint, ColoredPointCloud,
    DetectorParams, Mode, RigidTransform,
};
use common::*;
use nalgebra::{UnitQuaternion, Vector3};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = ColoredPoint> {
    (
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        0.0..=1.0f64,
        0.0..=1.0f64,
        0.0..=1.0f64,
    )
        .prop_map(|(x, y, z, r, g, b)| ColoredPoint::new(x, y, z, r, g, b))
}

fn cloud(max: usize) -> impl Strategy<Value = ColoredPointCloud> {
    prop::collection::vec(point(), 1..max).prop_map(|pts| ColoredPointCloud::new(pts, 0.1, true).unwrap())
}

fn maybe_nan() -> impl Strategy<Value = f64> {
    prop_oneof![8 => -1.0..1.0f64, 1 => Just(f64::NAN), 1 => Just(f64::NEG_INFINITY)]
}

fn transform() -> impl Strategy<Value = RigidTransform> {
    (
        -3.0..3.0f64,
        -3.0..3.0f64,
        -3.0..3.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
    )
        .prop_map(|(a, b, c, x, y, z)| {
            RigidTransform::from_rotation_translation(UnitQuaternion::from_euler_angles(a, b, c), Vector3::new(x, y, z))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn remove_invalid_is_idempotent(raw in prop::collection::vec((maybe_nan(), maybe_nan(), maybe_nan()), 1..60)) {
        let pts = raw.into_iter().map(|(x, y, g)| ColoredPoint::new(x, y, 0.0, 0.5, g, 0.5)).collect();
        let c = ColoredPointCloud::new(pts, 0.01, true).unwrap();
        let once = remove_invalid(&c);
        prop_assert!(once.points().iter().all(ColoredPoint::is_finite));
        prop_assert_eq!(remove_invalid(&once), once);
    }

    #[test]
    fn radius_neighborhoods_are_symmetric_and_self_inclusive(c in cloud(200), r in 0.01..0.8f64) {
        let index = build_index(&c).unwrap();
        let hoods: Vec<Vec<usize>> = (0..c.len()).map(|i| index.radius_neighbors(&c, i, r).unwrap()).collect();
        for (i, h) in hoods.iter().enumerate() {
            prop_assert!(h.binary_search(&i).is_ok());
            prop_assert_eq!(h, &linear_neighbors(c.points(), c.points()[i].xyz(), r));
            for &j in h {
                prop_assert!(hoods[j].binary_search(&i).is_ok());
            }
        }
    }

    #[test]
    fn detect_matches_oracle(c in cloud(150), r in 0.2..0.7f64, t_g in 0.0..1.0f64, t_c in 0.0..3.0f64, color in any::<bool>()) {
        let params = DetectorParams {
            radius: r,
            t_g,
            t_c,
            mode: if color { Mode::Ced } else { Mode::Ced3d },
            min_neighbors: 5,
        };
        let got = detect(&c, &params).unwrap().indices;
        prop_assert_eq!(got, oracle_detect(&c, r, t_g, t_c, 5, color));
    }

    #[test]
    fn keypoint_count_is_monotone_in_thresholds(c in cloud(150), r in 0.2..0.7f64, a in 0.0..1.0f64, b in 0.0..1.0f64, tc in 0.0..3.0f64) {
        let base = DetectorParams { radius: r, ..DetectorParams::for_resolution(0.1) };
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let low = detect(&c, &base.with_thresholds(lo, tc)).unwrap();
        let high = detect(&c, &base.with_thresholds(hi, tc)).unwrap();
        prop_assert!(high.indices.iter().all(|i| low.indices.contains(i)));
        let low = detect(&c, &base.with_thresholds(tc / 3.0, lo * 3.0)).unwrap();
        let high = detect(&c, &base.with_thresholds(tc / 3.0, hi * 3.0)).unwrap();
        prop_assert!(high.len() <= low.len());
    }

    #[test]
    fn saliency_is_rigid_invariant(c in cloud(200), t in transform(), r in 0.2..0.6f64) {
        let params = DetectorParams { radius: r, ..DetectorParams::for_resolution(0.1) };
        let moved = apply_rigid_transform(&c, &t).unwrap();
        let (ia, ib) = (build_index(&c).unwrap(), build_index(&moved).unwrap());
        let (ga, ca) = compute_saliency(&c, &ia, &params).unwrap();
        let (gb, cb) = compute_saliency(&moved, &ib, &params).unwrap();
        let (ca, cb) = (ca.unwrap(), cb.unwrap());
        for i in 0..c.len() {
            if ia.radius_neighbors(&c, i, r).unwrap() != ib.radius_neighbors(&moved, i, r).unwrap() {
                continue;
            }
            prop_assert_eq!(ga.is_valid(i), gb.is_valid(i));
            prop_assert!((ga.value(i) - gb.value(i)).abs() <= 1e-9);
            prop_assert!((ca.value(i) - cb.value(i)).abs() <= 1e-9);
        }
    }
}
