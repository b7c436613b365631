mod common;

use std::f64::consts::PI;

use bvc3d::bvc::{build_population, ModelConfig, ModelName};
use bvc3d::geometry::{build_arena, EnvironmentSpec};
use bvc3d::sensor::{self, BoundaryPoint, BoundaryPoints, Pose};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, elevated: bool) -> BoundaryPoints {
    let points = (0..n)
        .map(|_| BoundaryPoint {
            r: rng.gen_range(0.0..12.0),
            theta: rng.gen_range(-PI..PI),
            phi: if elevated { rng.gen_range(0.0..0.3) } else { 0.0 },
        })
        .collect();
    BoundaryPoints { points }
}

#[test]
fn pruned_matches_unpruned_on_dense_arena_scans() {
    for (model, env) in [(ModelName::Model3d02, 4), (ModelName::Model3dThreeLayer, 2), (ModelName::Model3d01, 1)] {
        let pop = build_population(&ModelConfig::preset(model)).unwrap();
        let w = build_arena(&EnvironmentSpec::preset(env).unwrap()).unwrap();
        let pose = Pose::new(1.3, -2.2, 0.7);
        let map = sensor::scan_spherical(&w, &pose, 12.0);
        let points = sensor::depth_map_to_points(&map, &pose);
        assert_eq!(points.n_res(), 8100);
        let got = pop.compute_activations(&points).rates;
        let want = common::unpruned_activations(&pop, &points);
        assert!(max_abs_diff(&got, &want) <= 1e-9, "{model}: {}", max_abs_diff(&got, &want));
    }
}

#[test]
fn pruned_matches_unpruned_for_the_planar_model() {
    let pop = build_population(&ModelConfig::preset(ModelName::Model2d)).unwrap();
    let w = build_arena(&EnvironmentSpec::preset(3).unwrap()).unwrap();
    let pose = Pose::new(-3.0, 2.5, -2.0);
    let points = sensor::horizontal_scan_to_points(&sensor::scan_horizontal(&w, &pose, 12.0), &pose);
    let got = pop.compute_activations(&points).rates;
    assert!(max_abs_diff(&got, &common::unpruned_activations(&pop, &points)) <= 1e-9);
}

#[test]
fn points_outside_every_window_give_zero() {
    let pop = build_population(&ModelConfig::preset(ModelName::Model3d02)).unwrap();
    // between the 0 and 0.2 rad layers, more than six widths from both
    let points = BoundaryPoints { points: vec![BoundaryPoint { r: 3.0, theta: 0.0, phi: 0.1 }] };
    let got = pop.compute_activations(&points).rates;
    assert!(got.iter().all(|&v| v == 0.0));
    let want = common::unpruned_activations(&pop, &points);
    assert!(want.iter().all(|&v| v < 1e-9));
}

#[test]
fn single_peak_point_gives_one_half() {
    for model in ModelName::ALL {
        let pop = build_population(&ModelConfig::preset(model)).unwrap();
        for (i, c) in pop.cells().iter().enumerate().step_by(37) {
            let p = BoundaryPoint { r: c.preferred_distance, theta: c.preferred_azimuth, phi: c.preferred_elevation.unwrap_or(0.0) };
            let rates = pop.compute_activations(&BoundaryPoints { points: vec![p] }).rates;
            assert!((rates[i] - 0.5).abs() < 1e-12, "{model} cell {i}: {}", rates[i]);
        }
    }
}

#[test]
fn azimuth_offset_of_five_widths_is_tiny() {
    let pop = build_population(&ModelConfig::preset(ModelName::Model2d)).unwrap();
    let c = pop.cells()[5];
    let p = BoundaryPoint { r: c.preferred_distance, theta: c.preferred_azimuth + 5.0 * c.sigma_theta, phi: 0.0 };
    let v = pop.compute_activations(&BoundaryPoints { points: vec![p] }).rates[5];
    assert!(v <= 0.5 * (-12.5f64).exp() * (1.0 + 1e-12));
}

#[test]
fn single_layer_at_zero_reduces_to_the_planar_model() {
    let planar = build_population(&ModelConfig::preset(ModelName::Model2d)).unwrap();
    let layered = ModelConfig { vertical_angles: vec![0.0], ..ModelConfig::preset(ModelName::Model2d) };
    let layered = build_population(&layered).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let points = random_points(&mut rng, 700, false);
        let a = planar.compute_activations(&points).rates;
        let b = layered.compute_activations(&points).rates;
        assert!(max_abs_diff(&a, &b) <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rates_stay_in_range_and_match_oracle(seed in any::<u64>(), n in 0usize..400, model in 0usize..4) {
        let model = ModelName::ALL[model];
        let pop = build_population(&ModelConfig::preset(model)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = random_points(&mut rng, n, model != ModelName::Model2d);
        let rates = pop.compute_activations(&points).rates;
        prop_assert!(rates.iter().all(|&v| (0.0..=0.5).contains(&v)));
        prop_assert!(max_abs_diff(&rates, &common::unpruned_activations(&pop, &points)) <= 1e-9);
    }

    #[test]
    fn invariant_under_full_turns_and_reordering(seed in any::<u64>(), turns in -3i32..3) {
        let pop = build_population(&ModelConfig::preset(ModelName::Model3dThreeLayer)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = random_points(&mut rng, 200, true);
        let base = pop.compute_activations(&points).rates;
        let mut moved = points.clone();
        for p in &mut moved.points {
            p.theta += turns as f64 * 2.0 * PI;
        }
        moved.points.reverse();
        prop_assert!(max_abs_diff(&base, &pop.compute_activations(&moved).rates) <= 1e-9);
    }
}
