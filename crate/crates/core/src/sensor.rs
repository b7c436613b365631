//! The agent's two range scanners and their conversion into allocentric
//! boundary points.
//!
//! Egocentric angles are measured counter-clockwise from the agent's heading;
//! allocentric angles from the world +x axis. A return at `max_range` means
//! nothing was hit and never becomes a boundary point.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use crate::geometry::{UnitVec3, Vec3, World};

pub const HORIZONTAL_RAYS: usize = 720;
pub const DEPTH_ROWS: usize = 90;
pub const DEPTH_COLS: usize = 180;
pub const DEFAULT_SENSOR_HEIGHT: f64 = 0.25;
pub const DEFAULT_MAX_RANGE: f64 = 12.0;

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to exactly TAU
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    heading: f64,
    pub sensor_height: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: wrap_angle(heading), sensor_height: DEFAULT_SENSOR_HEIGHT }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn set_heading(&mut self, heading: f64) {
        self.heading = wrap_angle(heading);
    }

    pub fn sensor_origin(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.sensor_height)
    }
}

/// Egocentric azimuth of horizontal ray `i`.
pub fn horizontal_ray_angle(i: usize) -> f64 {
    -PI + i as f64 * (TAU / HORIZONTAL_RAYS as f64)
}

/// Elevation of the centre of depth-map row `r` (row 0 looks straight up).
pub fn depth_row_elevation(r: usize) -> f64 {
    FRAC_PI_2 - (r as f64 + 0.5) * (PI / DEPTH_ROWS as f64)
}

/// Egocentric azimuth of the centre of depth-map column `c`.
pub fn depth_col_azimuth(c: usize) -> f64 {
    -PI + (c as f64 + 0.5) * (TAU / DEPTH_COLS as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalScan {
    pub distances: Vec<f64>,
    pub max_range: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalDepthMap {
    /// Row-major, `DEPTH_ROWS × DEPTH_COLS`.
    pub depth: Vec<f64>,
    pub max_range: f64,
}

impl SphericalDepthMap {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.depth[row * DEPTH_COLS + col]
    }
}

/// One boundary sample in the allocentric frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub r: f64,
    /// Allocentric azimuth in `[-π, π)`.
    pub theta: f64,
    /// Elevation in `[0, π/2]` unless floor returns are kept.
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundaryPoints {
    pub points: Vec<BoundaryPoint>,
}

impl BoundaryPoints {
    pub fn n_res(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn scan_horizontal(world: &World, pose: &Pose, max_range: f64) -> HorizontalScan {
    let origin = pose.sensor_origin();
    let distances = (0..HORIZONTAL_RAYS)
        .map(|i| {
            let az = wrap_angle(pose.heading + horizontal_ray_angle(i));
            world.range(origin, UnitVec3::horizontal(az), max_range)
        })
        .collect();
    HorizontalScan { distances, max_range }
}

pub fn scan_spherical(world: &World, pose: &Pose, max_range: f64) -> SphericalDepthMap {
    let depth = depth_rays(world, pose, max_range, 0..DEPTH_ROWS);
    SphericalDepthMap { depth, max_range }
}

fn depth_rays(world: &World, pose: &Pose, max_range: f64, rows: std::ops::Range<usize>) -> Vec<f64> {
    let origin = pose.sensor_origin();
    let mut out = Vec::with_capacity(rows.len() * DEPTH_COLS);
    for r in rows {
        let el = depth_row_elevation(r);
        for c in 0..DEPTH_COLS {
            let az = wrap_angle(pose.heading + depth_col_azimuth(c));
            out.push(world.range(origin, UnitVec3::from_angles(az, el), max_range));
        }
    }
    out
}

/// Rows of the depth map at or above the horizon.
pub const UPPER_ROWS: usize = DEPTH_ROWS / 2;

pub fn depth_map_to_points(map: &SphericalDepthMap, pose: &Pose) -> BoundaryPoints {
    upper_rows_to_points(&map.depth[..UPPER_ROWS * DEPTH_COLS], map.max_range, pose)
}

/// Every row of the map, below-horizon floor returns included (negative
/// elevations).
pub fn depth_map_to_points_all_rows(map: &SphericalDepthMap, pose: &Pose) -> BoundaryPoints {
    upper_rows_to_points(&map.depth, map.max_range, pose)
}

fn upper_rows_to_points(depth: &[f64], max_range: f64, pose: &Pose) -> BoundaryPoints {
    let mut points = Vec::with_capacity(depth.len());
    for (r, row) in depth.chunks_exact(DEPTH_COLS).enumerate() {
        let phi = depth_row_elevation(r);
        for (c, &d) in row.iter().enumerate() {
            if d < max_range {
                let theta = wrap_angle(pose.heading + depth_col_azimuth(c));
                points.push(BoundaryPoint { r: d, theta, phi });
            }
        }
    }
    BoundaryPoints { points }
}

/// Same result as `depth_map_to_points(&scan_spherical(..))` without casting
/// the rays that would be discarded below the horizon.
pub fn spherical_points(world: &World, pose: &Pose, max_range: f64) -> BoundaryPoints {
    let depth = depth_rays(world, pose, max_range, 0..UPPER_ROWS);
    upper_rows_to_points(&depth, max_range, pose)
}

pub fn horizontal_scan_to_points(scan: &HorizontalScan, pose: &Pose) -> BoundaryPoints {
    let points = scan
        .distances
        .iter()
        .enumerate()
        .filter(|(_, &d)| d < scan.max_range)
        .map(|(i, &d)| BoundaryPoint {
            r: d,
            theta: wrap_angle(pose.heading + horizontal_ray_angle(i)),
            phi: 0.0,
        })
        .collect();
    BoundaryPoints { points }
}

/// Whitespace-delimited dump: one line for the horizontal scan.
pub fn horizontal_scan_text(scan: &HorizontalScan) -> String {
    let mut s = scan.distances.iter().map(|d| format!("{d:.6}")).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s
}

/// Whitespace-delimited dump: one line per depth-map row.
pub fn depth_map_text(map: &SphericalDepthMap) -> String {
    let mut s = String::new();
    for row in map.depth.chunks_exact(DEPTH_COLS) {
        for (c, d) in row.iter().enumerate() {
            if c > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{d:.6}");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_arena, EnvironmentSpec};

    fn arena(tilt: f64) -> World {
        build_arena(&EnvironmentSpec { tilt_deg: tilt, ..Default::default() }).unwrap()
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(PI), -PI);
        assert_eq!(wrap_angle(-PI), -PI);
        assert!((wrap_angle(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert!(wrap_angle(-1e-18) < PI);
    }

    #[test]
    fn forward_ray_sees_outer_wall() {
        let w = arena(0.0);
        let pose = Pose::new(1.0, 0.5, 0.0);
        let scan = scan_horizontal(&w, &pose, DEFAULT_MAX_RANGE);
        assert_eq!(scan.distances.len(), HORIZONTAL_RAYS);
        // ray 360 has egocentric azimuth 0
        assert!((scan.distances[360] - 4.0).abs() < 1e-12);
        assert!(scan.distances.iter().all(|&d| d > 0.0 && d <= DEFAULT_MAX_RANGE));
    }

    #[test]
    fn top_row_sees_ceiling() {
        let w = arena(0.0);
        let pose = Pose::new(2.5, 2.5, 0.3);
        let map = scan_spherical(&w, &pose, DEFAULT_MAX_RANGE);
        assert_eq!(map.depth.len(), DEPTH_ROWS * DEPTH_COLS);
        let el = depth_row_elevation(0);
        assert!((el - 89f64.to_radians()).abs() < 1e-12);
        for c in 0..DEPTH_COLS {
            assert!((map.at(0, c) - 2.25 / el.sin()).abs() < 1e-9);
        }
        // bottom row looks almost straight down at the floor
        for c in 0..DEPTH_COLS {
            assert!(map.at(DEPTH_ROWS - 1, c) < 0.26);
        }
    }

    #[test]
    fn empty_scans_give_no_points() {
        let pose = Pose::new(0.0, 0.0, 0.0);
        let scan = HorizontalScan { distances: vec![12.0; HORIZONTAL_RAYS], max_range: 12.0 };
        assert_eq!(horizontal_scan_to_points(&scan, &pose).n_res(), 0);
        let map = SphericalDepthMap { depth: vec![12.0; DEPTH_ROWS * DEPTH_COLS], max_range: 12.0 };
        assert_eq!(depth_map_to_points(&map, &pose).n_res(), 0);
    }

    #[test]
    fn heading_rotates_egocentric_into_allocentric() {
        let pose = Pose::new(0.0, 0.0, FRAC_PI_2);
        let mut distances = vec![12.0; HORIZONTAL_RAYS];
        distances[360] = 3.0;
        let pts = horizontal_scan_to_points(&HorizontalScan { distances, max_range: 12.0 }, &pose);
        assert_eq!(pts.n_res(), 1);
        assert!((pts.points[0].theta - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(pts.points[0].phi, 0.0);
    }

    #[test]
    fn fast_path_matches_full_depth_map() {
        let w = arena(45.0);
        let pose = Pose::new(-1.3, 2.2, 2.0);
        let full = depth_map_to_points(&scan_spherical(&w, &pose, 12.0), &pose);
        let fast = spherical_points(&w, &pose, 12.0);
        assert_eq!(full, fast);
        assert!(full.n_res() <= UPPER_ROWS * DEPTH_COLS);
    }

    #[test]
    fn ceiling_points_follow_sine_law() {
        let w = arena(0.0);
        let pose = Pose::new(0.7, 0.6, 0.0);
        let pts = spherical_points(&w, &pose, 12.0);
        for p in pts.points.iter().filter(|p| p.phi > 1.4) {
            assert!((p.r - 2.25 / p.phi.sin()).abs() < 1e-9);
        }
        assert!(pts.points.iter().all(|p| (0.0..=FRAC_PI_2).contains(&p.phi)));
    }
}
