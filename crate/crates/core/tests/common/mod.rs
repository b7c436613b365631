//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use bvc3d::bvc::BvcPopulation;
use bvc3d::geometry::{Point3, UnitVec3, World};
use bvc3d::metrics::{ActivationMap, HexGrid};
use bvc3d::sensor::BoundaryPoints;

/// Nearest hit over every surface, no bounding-box culling.
pub fn brute_ray(world: &World, origin: Point3, dir: UnitVec3) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for s in world.surfaces() {
        if let Some(t) = s.intersect(origin, dir) {
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, s.id));
            }
        }
    }
    best
}

/// Plane intersection followed by a point-in-convex-quad test.
pub fn plane_ray(world: &World, origin: Point3, dir: UnitVec3) -> Option<(f64, usize)> {
    let d = dir.get();
    let mut best: Option<(f64, usize)> = None;
    for s in world.surfaces() {
        let n = s.normal();
        let denom = n.dot(d);
        if denom.abs() < 1e-12 {
            continue;
        }
        let t = n.dot(s.corners[0] - origin) / denom;
        if t <= 1e-6 {
            continue;
        }
        let p = origin + d * t;
        let inside = (0..4).all(|k| {
            let a = s.corners[k];
            let b = s.corners[(k + 1) % 4];
            (b - a).cross(p - a).dot(n) >= -1e-9
        });
        if inside && best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, s.id));
        }
    }
    best
}

fn gauss(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
}

fn wrap(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w >= PI {
        w -= 2.0 * PI;
    }
    if w < -PI {
        w += 2.0 * PI;
    }
    w
}

/// Every cell against every point with normalized Gaussian densities.
pub fn unpruned_activations(pop: &BvcPopulation, points: &BoundaryPoints) -> Vec<f64> {
    let n = points.points.len();
    pop.cells()
        .iter()
        .map(|c| {
            if n == 0 {
                return 0.0;
            }
            let mut peak = gauss(0.0, c.sigma_r) * gauss(0.0, c.sigma_theta);
            if c.preferred_elevation.is_some() {
                peak *= gauss(0.0, c.sigma_phi);
            }
            let mut sum = 0.0;
            for p in &points.points {
                let mut g = gauss(p.r - c.preferred_distance, c.sigma_r)
                    * gauss(wrap(p.theta - c.preferred_azimuth), c.sigma_theta);
                if let Some(el) = c.preferred_elevation {
                    g *= gauss(p.phi - el, c.sigma_phi);
                }
                sum += g;
            }
            sum / (2.0 * n as f64 * peak)
        })
        .collect()
}

/// Cluster count by density connectivity: core points are joined when within
/// `eps`, and every connected component of core points is one cluster.
pub fn brute_cluster_count(points: &[(f64, f64)], eps: f64, min_samples: usize) -> usize {
    let n = points.len();
    let close = |i: usize, j: usize| {
        let (a, b) = (points[i], points[j]);
        (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) <= eps * eps
    };
    let core: Vec<usize> = (0..n).filter(|&i| (0..n).filter(|&j| close(i, j)).count() >= min_samples).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (a, &i) in core.iter().enumerate() {
        for &j in &core[a + 1..] {
            if close(i, j) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut roots: Vec<usize> = core.iter().map(|&i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Dense double loop over bins.
pub fn naive_sai(maps: &[ActivationMap], grid: &HexGrid, d_th: f64) -> Vec<f64> {
    let n = grid.len();
    let vec_of = |b: usize| maps.iter().map(|m| m.values[b]).collect::<Vec<f64>>();
    let vectors: Vec<Vec<f64>> = (0..n).map(vec_of).collect();
    let norms: Vec<f64> = vectors.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (ci, cj) = (grid.center(i), grid.center(j));
                if (ci.0 - cj.0).powi(2) + (ci.1 - cj.1).powi(2) <= d_th * d_th {
                    continue;
                }
                if norms[i] == 0.0 || norms[j] == 0.0 {
                    continue;
                }
                let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
                acc += dot / (norms[i] * norms[j]);
            }
            acc / n as f64
        })
        .collect()
}

/// Nearest centre by exhaustive search, ties to the lower index.
pub fn nearest_bin(grid: &HexGrid, x: f64, y: f64) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (i, &(cx, cy)) in grid.centers().iter().enumerate() {
        let d = (x - cx).powi(2) + (y - cy).powi(2);
        if d < best.0 {
            best = (d, i);
        }
    }
    best.1
}
