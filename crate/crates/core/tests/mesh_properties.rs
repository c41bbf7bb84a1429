use gesto_core::brush::{tessellate_ribbon, tessellate_tube, BrushParams};
use gesto_core::canvas::CanvasPlane;
use gesto_core::centerline::{resample, Centerline};
use gesto_core::drip::drip_simulate;
use gesto_core::pose::Tool;
use gesto_core::Vector3;
use gesto_testkit::{oracle_drips, random_centerline, rng, unit_quaternion};
use nalgebra::{Quaternion, UnitQuaternion};
use proptest::prelude::*;

fn planar_line(seed: u64, n: usize) -> Centerline {
    // Random walk flattened onto z = 0 and resampled so no points coincide.
    let raw = random_centerline(&mut rng(seed), n, Tool::Spray);
    let flat = raw.map_points(|p| Vector3::new(p.x, p.y, 0.0)).unwrap();
    resample(&flat, 0.004).unwrap()
}

proptest! {
    #[test]
    fn ribbon_count_formula(seed in any::<u64>(), n in 2usize..200) {
        let line = random_centerline(&mut rng(seed), n, Tool::Spray);
        let mesh = tessellate_ribbon(&line, &BrushParams::default(), Vector3::z());
        prop_assert_eq!(mesh.vertex_count(), 2 * n);
        prop_assert_eq!(mesh.triangle_count(), 2 * (n - 1));
        prop_assert!(mesh.validate().is_ok());
    }

    #[test]
    fn tube_count_formula(seed in any::<u64>(), n in 2usize..200, sides in 3usize..16) {
        let line = random_centerline(&mut rng(seed), n, Tool::Spray);
        let mesh = tessellate_tube(&line, &BrushParams::default(), sides).unwrap();
        prop_assert_eq!(mesh.vertex_count(), n * sides);
        prop_assert_eq!(mesh.triangle_count(), 2 * (n - 1) * sides);
        prop_assert!(mesh.validate().is_ok());
    }

    #[test]
    fn ribbon_width_matches_pressure(seed in any::<u64>(), n in 3usize..80, width in 0.005f64..0.3) {
        let line = planar_line(seed, n);
        prop_assume!(line.len() >= 3);
        let params = BrushParams { base_width: width, ..BrushParams::default() };
        let mesh = tessellate_ribbon(&line, &params, Vector3::z());
        for (i, (p, pressure)) in line.points().iter().zip(line.pressure()).enumerate() {
            let (a, b) = (mesh.vertices[2 * i], mesh.vertices[2 * i + 1]);
            prop_assert!(((a - b).norm() - width * pressure).abs() < 1e-6);
            prop_assert!((a - p).norm() <= width / 2.0 + 1e-6);
            prop_assert!((b - p).norm() <= width / 2.0 + 1e-6);
        }
    }

    #[test]
    fn tube_vertices_stay_near_their_ring_center(seed in any::<u64>(), n in 2usize..80, sides in 3usize..12) {
        let line = random_centerline(&mut rng(seed), n, Tool::Spray);
        let params = BrushParams::default();
        let mesh = tessellate_tube(&line, &params, sides).unwrap();
        for (k, v) in mesh.vertices.iter().enumerate() {
            let center = line.points()[k / sides];
            prop_assert!((v - center).norm() <= params.base_width / 2.0 + 1e-6);
        }
    }

    #[test]
    fn ribbon_is_rigidly_equivariant(seed in any::<u64>(), n in 2usize..60, qs in any::<u64>(), t in prop::array::uniform3(-3.0f64..3.0)) {
        let line = planar_line(seed, n);
        let [w, x, y, z] = unit_quaternion(&mut rng(qs));
        let rot = UnitQuaternion::new_normalize(Quaternion::new(w, x, y, z));
        let shift = Vector3::from(t);
        let params = BrushParams::default();
        let moved_line = line.map_points(|p| rot * p + shift).unwrap();
        let moved_mesh = tessellate_ribbon(&moved_line, &params, rot * Vector3::z());
        let base = tessellate_ribbon(&line, &params, Vector3::z());
        prop_assert_eq!(moved_mesh.indices.clone(), base.indices.clone());
        for (a, b) in moved_mesh.vertices.iter().zip(&base.vertices) {
            prop_assert!((a - (rot * b + shift)).norm() < 1e-6);
        }
        for (a, b) in moved_mesh.normals.iter().zip(&base.normals) {
            prop_assert!((a - rot * b).norm() < 1e-6);
        }
    }

    #[test]
    fn drips_replay_the_reference_generator(seed in any::<u64>(), n in 1usize..60, p in 0.0f64..=1.0) {
        let plane = CanvasPlane::from_normal(Vector3::z(), 0.0, [-1.0, 1.0, -1.0, 1.0]).unwrap();
        let pts = (0..n).map(|i| Vector3::new(i as f64 * 0.01, 0.0, 0.0)).collect();
        let line = Centerline::from_points(pts, Tool::DripMop).unwrap();
        let params = BrushParams { drip_probability: p, drip_max_length: 0.2, ..BrushParams::drip(0.05, [1.0; 4]) };
        let drips = drip_simulate(&line, &plane, &params, seed).unwrap();
        let expected = oracle_drips(n, p, 0.2, seed);
        prop_assert_eq!(drips.len(), expected.len());
        for (d, (idx, len)) in drips.iter().zip(expected) {
            prop_assert_eq!(d.seed.anchor, line.points()[idx]);
            prop_assert_eq!(d.seed.length.to_bits(), len.to_bits());
        }
    }
}

#[test]
fn no_nan_for_awkward_lines() {
    let lines = [
        vec![Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0)],
        vec![Vector3::zeros(), Vector3::x(), Vector3::zeros(), Vector3::x()],
        vec![Vector3::zeros(), Vector3::new(1e-9, 0.0, 0.0), Vector3::new(2e-9, 1e-9, 0.0)],
        vec![Vector3::zeros(), Vector3::zeros(), Vector3::zeros()],
    ];
    for pts in lines {
        let line = Centerline::from_points(pts, Tool::Spray).unwrap();
        tessellate_ribbon(&line, &BrushParams::default(), Vector3::z()).validate().unwrap();
        tessellate_tube(&line, &BrushParams::default(), 6).unwrap().validate().unwrap();
    }
}

#[test]
fn drip_acceptance_rate_converges() {
    let plane = CanvasPlane::from_normal(Vector3::z(), 0.0, [-1.0, 1.0, -1.0, 1.0]).unwrap();
    let candidates = 10_000usize;
    let pts = (0..candidates * 4).map(|i| Vector3::new(i as f64 * 1e-4, 0.0, 0.0)).collect();
    let line = Centerline::from_points(pts, Tool::DripMop).unwrap();
    let p = 0.3;
    let params = BrushParams { drip_probability: p, ..BrushParams::drip(0.05, [1.0; 4]) };
    let drips = drip_simulate(&line, &plane, &params, 2024).unwrap();
    let rate = drips.len() as f64 / candidates as f64;
    let sigma = (p * (1.0 - p) / candidates as f64).sqrt();
    assert!((rate - p).abs() <= 3.0 * sigma, "rate {rate}");
    assert_eq!(drips, drip_simulate(&line, &plane, &params, 2024).unwrap());
}
