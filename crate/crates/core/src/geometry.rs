//! Arena geometry: the cross-walled test environments as quad surfaces, plus
//! the ray and collision queries the sensors and the walker rely on.
//!
//! Walls are zero-thickness quads and are hit from either side. The world is
//! immutable once built, so queries can be issued from any number of threads.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rays shorter than this are treated as self-intersections and ignored.
pub const SELF_HIT_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Alias used where a value denotes a location rather than a displacement.
pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A direction of Euclidean length one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    /// Normalizes `v`; returns `None` for a zero or non-finite vector.
    pub fn new(v: Vec3) -> Option<Self> {
        let n = v.norm();
        if n.is_finite() && n > 0.0 {
            Some(Self(v * (1.0 / n)))
        } else {
            None
        }
    }

    /// Direction from azimuth (counter-clockwise from +x) and elevation above
    /// the horizontal plane.
    pub fn from_angles(azimuth: f64, elevation: f64) -> Self {
        let (sa, ca) = azimuth.sin_cos();
        let (se, ce) = elevation.sin_cos();
        Self(Vec3::new(ce * ca, ce * sa, se))
    }

    pub fn horizontal(azimuth: f64) -> Self {
        let (s, c) = azimuth.sin_cos();
        Self(Vec3::new(c, s, 0.0))
    }

    pub fn get(self) -> Vec3 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    OuterWall,
    Ceiling,
    Floor,
    CentralWall,
}

impl SurfaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SurfaceKind::OuterWall => "outer_wall",
            SurfaceKind::Ceiling => "ceiling",
            SurfaceKind::Floor => "floor",
            SurfaceKind::CentralWall => "central_wall",
        }
    }
}

/// A planar convex quad. Corners are in winding order.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub id: usize,
    pub kind: SurfaceKind,
    pub corners: [Point3; 4],
    normal: Vec3,
}

impl Surface {
    pub fn new(id: usize, kind: SurfaceKind, corners: [Point3; 4]) -> Result<Self> {
        let normal = (corners[1] - corners[0]).cross(corners[3] - corners[0]);
        let n = normal.norm();
        if n.is_nan() || n <= 0.0 {
            return Err(Error::Geometry(format!("surface {id} is degenerate")));
        }
        let normal = normal * (1.0 / n);
        for c in &corners {
            if (*c - corners[0]).dot(normal).abs() > 1e-9 {
                return Err(Error::Geometry(format!("surface {id} is not planar")));
            }
        }
        // convexity: every turn has the same orientation about the normal
        for k in 0..4 {
            let a = corners[(k + 1) % 4] - corners[k];
            let b = corners[(k + 2) % 4] - corners[(k + 1) % 4];
            if a.cross(b).dot(normal) <= 0.0 {
                return Err(Error::Geometry(format!("surface {id} is not convex")));
            }
        }
        Ok(Self { id, kind, corners, normal })
    }

    /// Unit normal (right-handed with respect to the corner winding).
    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    /// Ray parameter of the intersection with this quad, if any, beyond the
    /// self-hit guard. Splits the quad into two triangles and runs the
    /// Möller–Trumbore test on each; edges are inclusive.
    pub fn intersect(&self, origin: Point3, dir: UnitVec3) -> Option<f64> {
        let c = &self.corners;
        let t0 = ray_triangle(origin, dir.get(), c[0], c[1], c[2]);
        let t1 = ray_triangle(origin, dir.get(), c[0], c[2], c[3]);
        match (t0, t1) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Distance from `p` to the plane of the quad, and whether the
    /// projection of `p` falls inside the quad (with tolerance `tol`).
    pub fn residual(&self, p: Point3, tol: f64) -> (f64, bool) {
        let off = (p - self.corners[0]).dot(self.normal);
        let q = p - self.normal * off;
        let inside = (0..4).all(|k| {
            let a = self.corners[k];
            let b = self.corners[(k + 1) % 4];
            let edge = b - a;
            let len = edge.norm();
            edge.cross(q - a).dot(self.normal) / len >= -tol
        });
        (off.abs(), inside)
    }

    fn aabb(&self) -> Aabb {
        let mut b = Aabb::empty();
        for c in &self.corners {
            b.include(*c);
        }
        b
    }
}

fn ray_triangle(o: Point3, d: Vec3, a: Point3, b: Point3, c: Point3) -> Option<f64> {
    const EPS: f64 = 1e-14;
    let e1 = b - a;
    let e2 = c - a;
    let p = d.cross(e2);
    let det = e1.dot(p);
    if det.abs() < EPS {
        return None;
    }
    let inv = 1.0 / det;
    let s = o - a;
    let u = s.dot(p) * inv;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = d.dot(q) * inv;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    let t = e2.dot(q) * inv;
    (t > SELF_HIT_EPS).then_some(t)
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            min: Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn include(&mut self, p: Point3) {
        self.min = Vec3::new(self.min.x.min(p.x), self.min.y.min(p.y), self.min.z.min(p.z));
        self.max = Vec3::new(self.max.x.max(p.x), self.max.y.max(p.y), self.max.z.max(p.z));
    }

    pub fn contains(&self, p: Point3, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
            && p.z >= self.min.z - tol
            && p.z <= self.max.z + tol
    }

    /// Entry parameter of the ray into the (slightly padded) box, or `None`
    /// if the ray misses it or the box lies entirely behind `max_t`.
    fn ray_entry(&self, o: Point3, d: Vec3, max_t: f64) -> Option<f64> {
        const PAD: f64 = 1e-9;
        let mut t_lo = 0.0_f64;
        let mut t_hi = max_t;
        for (oi, di, lo, hi) in [
            (o.x, d.x, self.min.x, self.max.x),
            (o.y, d.y, self.min.y, self.max.y),
            (o.z, d.z, self.min.z, self.max.z),
        ] {
            let (lo, hi) = (lo - PAD, hi + PAD);
            if di == 0.0 {
                if oi < lo || oi > hi {
                    return None;
                }
            } else {
                let inv = 1.0 / di;
                let (mut a, mut b) = ((lo - oi) * inv, (hi - oi) * inv);
                if a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                t_lo = t_lo.max(a);
                t_hi = t_hi.min(b);
                if t_lo > t_hi {
                    return None;
                }
            }
        }
        Some(t_lo)
    }
}

/// Parameters of one test environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentSpec {
    pub arena_side: f64,
    pub wall_height: f64,
    pub central_wall_length: f64,
    /// Lean of the central walls away from vertical, in degrees.
    pub tilt_deg: f64,
    pub include_floor_in_scans: bool,
}

impl Default for EnvironmentSpec {
    fn default() -> Self {
        Self {
            arena_side: 10.0,
            wall_height: 2.5,
            central_wall_length: 7.0,
            tilt_deg: 0.0,
            include_floor_in_scans: false,
        }
    }
}

impl EnvironmentSpec {
    /// Environments 1-4: central walls upright, then tilted 30, 45 and 60 degrees.
    pub fn preset(index: u8) -> Result<Self> {
        let tilt_deg = match index {
            1 => 0.0,
            2 => 30.0,
            3 => 45.0,
            4 => 60.0,
            other => return Err(Error::Config(format!("unknown environment {other} (expected 1-4)"))),
        };
        Ok(Self { tilt_deg, ..Self::default() })
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..90.0).contains(&self.tilt_deg) {
            return Err(Error::Config(format!("tilt_deg {} outside [0, 90)", self.tilt_deg)));
        }
        for (name, v) in [
            ("arena_side", self.arena_side),
            ("wall_height", self.wall_height),
            ("central_wall_length", self.central_wall_length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let reach = self.wall_height * self.tilt_deg.to_radians().tan();
        if reach > self.arena_side / 2.0 {
            return Err(Error::Config(format!(
                "tilted central walls would reach {reach:.3} m past their base, beyond the outer walls"
            )));
        }
        if self.central_wall_length > self.arena_side {
            return Err(Error::Config("central wall longer than the arena".into()));
        }
        Ok(())
    }
}

/// Result of a successful ray query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub distance: f64,
    pub surface_id: usize,
    pub point: Point3,
}

#[derive(Debug, Clone)]
pub struct World {
    surfaces: Vec<Surface>,
    boxes: Vec<Aabb>,
    bounds: Aabb,
    spec: EnvironmentSpec,
}

/// Builds the square arena with the two crossing central walls.
///
/// The wall with its base on the x-axis leans toward +y and the wall with its
/// base on the y-axis leans toward +x, each rotated about its own base line.
/// A tilted wall's slant length is `wall_height / cos(tilt)` so the top edge
/// still meets the ceiling.
pub fn build_arena(spec: &EnvironmentSpec) -> Result<World> {
    spec.validate()?;
    let h = spec.arena_side / 2.0;
    let top = spec.wall_height;
    let half_len = spec.central_wall_length / 2.0;
    let lean = spec.wall_height * spec.tilt_deg.to_radians().tan();
    let p = Vec3::new;

    let quads: [(SurfaceKind, [Point3; 4]); 8] = [
        (SurfaceKind::OuterWall, [p(h, -h, 0.0), p(h, h, 0.0), p(h, h, top), p(h, -h, top)]),
        (SurfaceKind::OuterWall, [p(h, h, 0.0), p(-h, h, 0.0), p(-h, h, top), p(h, h, top)]),
        (SurfaceKind::OuterWall, [p(-h, h, 0.0), p(-h, -h, 0.0), p(-h, -h, top), p(-h, h, top)]),
        (SurfaceKind::OuterWall, [p(-h, -h, 0.0), p(h, -h, 0.0), p(h, -h, top), p(-h, -h, top)]),
        (SurfaceKind::Ceiling, [p(-h, -h, top), p(h, -h, top), p(h, h, top), p(-h, h, top)]),
        (SurfaceKind::Floor, [p(-h, -h, 0.0), p(-h, h, 0.0), p(h, h, 0.0), p(h, -h, 0.0)]),
        (
            SurfaceKind::CentralWall,
            [
                p(-half_len, 0.0, 0.0),
                p(half_len, 0.0, 0.0),
                p(half_len, lean, top),
                p(-half_len, lean, top),
            ],
        ),
        (
            SurfaceKind::CentralWall,
            [
                p(0.0, half_len, 0.0),
                p(0.0, -half_len, 0.0),
                p(lean, -half_len, top),
                p(lean, half_len, top),
            ],
        ),
    ];

    let surfaces = quads
        .into_iter()
        .enumerate()
        .map(|(id, (kind, corners))| Surface::new(id, kind, corners))
        .collect::<Result<Vec<_>>>()?;
    let boxes = surfaces.iter().map(Surface::aabb).collect();
    let bounds = Aabb { min: p(-h, -h, 0.0), max: p(h, h, top) };
    Ok(World { surfaces, boxes, bounds, spec: spec.clone() })
}

impl World {
    pub fn surfaces(&self) -> &[Surface] {
        &self.surfaces
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    pub fn surface(&self, id: usize) -> Option<&Surface> {
        self.surfaces.get(id)
    }

    /// True if `(x, y)` lies strictly inside the outer walls.
    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        x > self.bounds.min.x && x < self.bounds.max.x && y > self.bounds.min.y && y < self.bounds.max.y
    }

    /// Nearest surface hit along the ray. Surfaces whose bounding box the ray
    /// enters only beyond the current best hit are skipped.
    pub fn ray_cast(&self, origin: Point3, dir: UnitVec3) -> Option<Hit> {
        let d = dir.get();
        let mut best: Option<(f64, usize)> = None;
        for (surface, bx) in self.surfaces.iter().zip(&self.boxes) {
            let limit = best.map_or(f64::INFINITY, |(t, _)| t);
            if bx.ray_entry(origin, d, limit).is_none() {
                continue;
            }
            if let Some(t) = surface.intersect(origin, dir) {
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, surface.id));
                }
            }
        }
        best.map(|(distance, surface_id)| Hit { distance, surface_id, point: origin + d * distance })
    }

    /// Ray cast clamped to `max_range`: returns the hit distance, or
    /// `max_range` on a miss or a hit at or beyond it.
    pub fn range(&self, origin: Point3, dir: UnitVec3, max_range: f64) -> f64 {
        self.ray_cast(origin, dir).map_or(max_range, |h| h.distance.min(max_range))
    }

    /// Bumper test: does the horizontal ray along `heading` from `position`
    /// meet a surface closer than `body_radius + step_advance`?
    pub fn collision_check(&self, position: Point3, heading: f64, body_radius: f64, step_advance: f64) -> bool {
        let reach = body_radius + step_advance;
        if reach <= 0.0 {
            return false;
        }
        self.ray_cast(position, UnitVec3::horizontal(heading))
            .is_some_and(|hit| hit.distance < reach)
    }

    /// Plain-text surface list, one quad per line:
    /// `id kind x0 y0 z0 x1 y1 z1 x2 y2 z2 x3 y3 z3`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.surfaces {
            let _ = write!(out, "{} {}", s.id, s.kind.as_str());
            for c in &s.corners {
                let _ = write!(out, " {} {} {}", c.x, c.y, c.z);
            }
            out.push('\n');
        }
        out
    }
}
