use std::f64::consts::PI;
mod common;

use bvc3d::geometry::{build_arena, EnvironmentSpec, UnitVec3, Vec3, World};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn world(env: u8) -> World {
    build_arena(&EnvironmentSpec::preset(env).unwrap()).unwrap()
}

fn interior_origin(rng: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(rng.gen_range(-4.9..4.9), rng.gen_range(-4.9..4.9), rng.gen_range(0.05..2.45))
}

fn random_dir(rng: &mut ChaCha8Rng) -> UnitVec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return UnitVec3::new(v).unwrap();
        }
    }
}

#[test]
fn ray_cast_equals_brute_force_in_every_environment() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for env in 1..=4 {
        let w = world(env);
        for _ in 0..20_000 {
            let o = interior_origin(&mut rng);
            let d = random_dir(&mut rng);
            let got = w.ray_cast(o, d).map(|h| (h.distance, h.surface_id));
            assert_eq!(got, common::brute_ray(&w, o, d), "env {env} origin {o:?} dir {d:?}");
        }
    }
}

#[test]
fn ray_cast_agrees_with_plane_intersection() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for env in 1..=4 {
        let w = world(env);
        for _ in 0..5_000 {
            let o = interior_origin(&mut rng);
            let d = random_dir(&mut rng);
            let hit = w.ray_cast(o, d).expect("closed arena");
            let (t, _) = common::plane_ray(&w, o, d).expect("closed arena");
            assert!((hit.distance - t).abs() <= 1e-9, "env {env}: {} vs {t}", hit.distance);
        }
    }
}

#[test]
fn hits_lie_on_the_reported_surface() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for env in 1..=4 {
        let w = world(env);
        for _ in 0..5_000 {
            let o = interior_origin(&mut rng);
            let d = random_dir(&mut rng);
            let hit = w.ray_cast(o, d).unwrap();
            assert!(hit.distance >= 0.0);
            let along = o + d.get() * hit.distance;
            assert!((along - hit.point).norm() <= 1e-7);
            let (off, inside) = w.surface(hit.surface_id).unwrap().residual(hit.point, 1e-7);
            assert!(off <= 1e-7 && inside, "env {env}: residual {off}");
        }
    }
}

#[test]
fn tilted_walls_reach_the_ceiling() {
    for env in 1..=4 {
        let w = world(env);
        let spec = w.spec().clone();
        for s in w.surfaces().iter().filter(|s| s.kind.as_str() == "central_wall") {
            let top = s.corners.iter().map(|c| c.z).fold(f64::MIN, f64::max);
            assert!((top - spec.wall_height).abs() < 1e-9, "env {env}");
            let base: Vec<_> = s.corners.iter().filter(|c| c.z.abs() < 1e-12).collect();
            let tops: Vec<_> = s.corners.iter().filter(|c| (c.z - spec.wall_height).abs() < 1e-9).collect();
            let slant = (*tops[0] - *base[0]).norm().min((*tops[0] - *base[1]).norm());
            let expect = spec.wall_height / spec.tilt_deg.to_radians().cos();
            assert!((slant - expect).abs() < 1e-9, "env {env}: slant {slant} vs {expect}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn every_interior_ray_hits_within_the_diagonal(
        env in 1u8..=4,
        x in -4.9f64..4.9, y in -4.9f64..4.9, z in 0.05f64..2.45,
        az in -PI..PI, el in -1.5f64..1.5,
    ) {
        let w = world(env);
        let o = Vec3::new(x, y, z);
        let d = UnitVec3::from_angles(az, el);
        let hit = w.ray_cast(o, d);
        prop_assert!(hit.is_some());
        let h = hit.unwrap();
        prop_assert!(h.distance <= (10.0f64 * 10.0 * 2.0 + 2.5 * 2.5).sqrt() + 1e-9);
        prop_assert_eq!(Some((h.distance, h.surface_id)), common::brute_ray(&w, o, d));
    }

    #[test]
    fn collision_check_matches_ray_distance(
        x in -4.5f64..4.5, y in -4.5f64..4.5, heading in -PI..PI, reach in 0.01f64..2.0,
    ) {
        let w = world(3);
        let o = Vec3::new(x, y, 0.25);
        let d = w.ray_cast(o, UnitVec3::horizontal(heading)).unwrap().distance;
        prop_assert_eq!(w.collision_check(o, heading, reach, 0.0), d < reach);
    }
}
