//! Hexagonal binning of recorded activity, modality analysis and spatial
//! aliasing indices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Aabb, Vec3};
use crate::recording::TraceSample;

/// DBSCAN radius for modality analysis, metres.
pub const MODALITY_EPS: f64 = 1.0;
/// DBSCAN core-point threshold for modality analysis (self included).
pub const MODALITY_MIN_SAMPLES: usize = 20;
/// Fraction of positive bin means zeroed out as noise.
pub const NOISE_QUANTILE: f64 = 0.1;

/// Offset hexagonal lattice of `nx × ny` bin centres covering a rectangle.
///
/// Rows are `side_y / ny` apart; within a row centres are `side_x / nx`
/// apart, with odd rows shifted by half a pitch. Points belong to their
/// nearest centre, ties going to the lower bin index.
#[derive(Debug, Clone, PartialEq)]
pub struct HexGrid {
    pub nx: usize,
    pub ny: usize,
    pub pitch: f64,
    pub row_spacing: f64,
    x0: f64,
    y0: f64,
    centers: Vec<(f64, f64)>,
}

pub fn build_hex_grid(bounds: &Aabb, nx: usize, ny: usize) -> HexGrid {
    assert!(nx > 0 && ny > 0, "hex grid needs at least one row and column");
    let pitch = (bounds.max.x - bounds.min.x) / nx as f64;
    let row_spacing = (bounds.max.y - bounds.min.y) / ny as f64;
    let (x0, y0) = (bounds.min.x, bounds.min.y);
    let mut centers = Vec::with_capacity(nx * ny);
    for r in 0..ny {
        for c in 0..nx {
            centers.push((x0 + (c as f64 + row_offset(r)) * pitch, y0 + (r as f64 + 0.5) * row_spacing));
        }
    }
    HexGrid { nx, ny, pitch, row_spacing, x0, y0, centers }
}

fn row_offset(r: usize) -> f64 {
    if r.is_multiple_of(2) {
        0.25
    } else {
        0.75
    }
}

impl HexGrid {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[(f64, f64)] {
        &self.centers
    }

    /// The rectangle the grid was built over (zero height).
    pub fn bounds(&self) -> Aabb {
        Aabb {
            min: Vec3::new(self.x0, self.y0, 0.0),
            max: Vec3::new(self.x0 + self.nx as f64 * self.pitch, self.y0 + self.ny as f64 * self.row_spacing, 0.0),
        }
    }

    pub fn center(&self, bin: usize) -> (f64, f64) {
        self.centers[bin]
    }

    /// Index of the bin centre nearest to `(x, y)`.
    pub fn bin_of(&self, x: f64, y: f64) -> usize {
        let rf = ((y - self.y0) / self.row_spacing - 0.5).round();
        let r_mid = rf.clamp(0.0, (self.ny - 1) as f64) as usize;
        let mut best = (f64::INFINITY, usize::MAX);
        for r in r_mid.saturating_sub(1)..=(r_mid + 1).min(self.ny - 1) {
            let cf = ((x - self.x0) / self.pitch - row_offset(r)).round();
            let c_mid = cf.clamp(0.0, (self.nx - 1) as f64) as usize;
            for c in c_mid.saturating_sub(1)..=(c_mid + 1).min(self.nx - 1) {
                let idx = r * self.nx + c;
                let (cx, cy) = self.centers[idx];
                let d = (x - cx).powi(2) + (y - cy).powi(2);
                if d < best.0 {
                    best = (d, idx);
                }
            }
        }
        best.1
    }
}

/// One place cell's normalized activation over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationMap {
    pub cell_index: usize,
    pub values: Vec<f64>,
}

impl ActivationMap {
    pub fn is_silent(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// Per-cell maps plus the visit count of every bin.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMaps {
    pub maps: Vec<ActivationMap>,
    pub visit_counts: Vec<u32>,
}

impl BinnedMaps {
    pub fn coverage(&self) -> f64 {
        let visited = self.visit_counts.iter().filter(|&&c| c > 0).count();
        visited as f64 / self.visit_counts.len() as f64
    }
}

/// Bin means of every cell's rate, with sub-quantile bins zeroed and each map
/// scaled to a maximum of one.
pub fn bin_trace<I>(samples: I, n_p: usize, grid: &HexGrid) -> BinnedMaps
where
    I: IntoIterator<Item = TraceSample>,
{
    let n = grid.len();
    let mut sums = vec![0.0f64; n_p * n];
    let mut visit_counts = vec![0u32; n];
    for s in samples {
        let bin = grid.bin_of(s.x, s.y);
        visit_counts[bin] += 1;
        for &(cell, rate) in &s.activations {
            sums[cell as usize * n + bin] += rate;
        }
    }
    let maps = sums
        .chunks_exact(n)
        .enumerate()
        .map(|(cell_index, row)| {
            let mut values: Vec<f64> = row
                .iter()
                .zip(&visit_counts)
                .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
                .collect();
            threshold_and_normalize(&mut values);
            ActivationMap { cell_index, values }
        })
        .collect();
    BinnedMaps { maps, visit_counts }
}

/// Zeroes values below the noise quantile of the positive entries, then
/// divides by the maximum. An all-zero map is left as is.
pub fn threshold_and_normalize(values: &mut [f64]) {
    let mut positive: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
    if positive.is_empty() {
        return;
    }
    positive.sort_by(f64::total_cmp);
    let cut = quantile_sorted(&positive, NOISE_QUANTILE);
    let max = positive[positive.len() - 1];
    for v in values.iter_mut() {
        *v = if *v < cut { 0.0 } else { *v / max };
    }
}

/// Linear-interpolation quantile of ascending `sorted` data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub const NOISE: i32 = -1;

/// Density-based clustering. A point is core when at least `min_samples`
/// points (itself included) lie within `eps`; clusters are grown from core
/// points in input order and absorb reachable border points. Noise is `-1`.
pub fn dbscan(points: &[(f64, f64)], eps: f64, min_samples: usize) -> Vec<i32> {
    assert!(eps > 0.0, "eps must be positive");
    const UNSEEN: i32 = -2;
    let index = CellIndex::new(points, eps);
    let mut labels = vec![UNSEEN; points.len()];
    let mut next = 0;
    let mut neighbours = Vec::new();
    let mut frontier = Vec::new();
    for i in 0..points.len() {
        if labels[i] != UNSEEN {
            continue;
        }
        index.neighbours(points, i, &mut neighbours);
        if neighbours.len() < min_samples {
            labels[i] = NOISE;
            continue;
        }
        let label = next;
        next += 1;
        labels[i] = label;
        frontier.clear();
        frontier.extend(neighbours.iter().copied());
        while let Some(q) = frontier.pop() {
            if labels[q] == NOISE {
                labels[q] = label;
            }
            if labels[q] != UNSEEN {
                continue;
            }
            labels[q] = label;
            index.neighbours(points, q, &mut neighbours);
            if neighbours.len() >= min_samples {
                frontier.extend(neighbours.iter().copied());
            }
        }
    }
    labels
}

pub fn cluster_count(labels: &[i32]) -> usize {
    labels.iter().copied().max().map_or(0, |m| (m + 1).max(0) as usize)
}

/// Uniform bucket grid with cells of side `eps` for radius queries.
struct CellIndex {
    eps2: f64,
    inv: f64,
    buckets: std::collections::HashMap<(i64, i64), Vec<usize>>,
}

impl CellIndex {
    fn new(points: &[(f64, f64)], eps: f64) -> Self {
        let inv = 1.0 / eps;
        let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
        for (i, &(x, y)) in points.iter().enumerate() {
            buckets.entry(((x * inv).floor() as i64, (y * inv).floor() as i64)).or_default().push(i);
        }
        // lattice coordinates come out of sums of a fixed pitch; allow for the
        // last-bit rounding so points exactly eps apart stay neighbours
        Self { eps2: eps * eps * (1.0 + 1e-9), inv, buckets }
    }

    fn neighbours(&self, points: &[(f64, f64)], i: usize, out: &mut Vec<usize>) {
        out.clear();
        let (x, y) = points[i];
        let (cx, cy) = ((x * self.inv).floor() as i64, (y * self.inv).floor() as i64);
        for bx in cx - 1..=cx + 1 {
            for by in cy - 1..=cy + 1 {
                if let Some(ids) = self.buckets.get(&(bx, by)) {
                    for &j in ids {
                        let (px, py) = points[j];
                        if (px - x).powi(2) + (py - y).powi(2) <= self.eps2 {
                            out.push(j);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModalityResult {
    pub cell_index: usize,
    pub modality_index: usize,
}

/// Number of DBSCAN clusters among the centres of a map's active bins.
pub fn modality_index(map: &ActivationMap, grid: &HexGrid) -> ModalityResult {
    let points: Vec<(f64, f64)> = map
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(b, _)| grid.center(b))
        .collect();
    let mi = if points.len() < MODALITY_MIN_SAMPLES {
        0
    } else {
        cluster_count(&dbscan(&points, MODALITY_EPS, MODALITY_MIN_SAMPLES))
    };
    ModalityResult { cell_index: map.cell_index, modality_index: mi }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalitySummary {
    pub frac_mi_gt0: f64,
    pub avg_mi_nonzero: f64,
    pub frac_mi_gt1: f64,
}

/// Fraction of cells with a field, mean index of those cells, and fraction
/// with more than one field. The mean is zero when no cell has a field.
pub fn modality_summary(results: &[ModalityResult]) -> ModalitySummary {
    let n = results.len().max(1) as f64;
    let nonzero: Vec<usize> = results.iter().map(|r| r.modality_index).filter(|&m| m > 0).collect();
    let multi = nonzero.iter().filter(|&&m| m > 1).count();
    let avg = if nonzero.is_empty() {
        0.0
    } else {
        nonzero.iter().sum::<usize>() as f64 / nonzero.len() as f64
    };
    ModalitySummary { frac_mi_gt0: nonzero.len() as f64 / n, avg_mi_nonzero: avg, frac_mi_gt1: multi as f64 / n }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AliasingParams {
    /// Bins closer than this are not compared, metres.
    pub d_th: f64,
}

impl Default for AliasingParams {
    fn default() -> Self {
        Self { d_th: 2.0 }
    }
}

/// Population vectors per bin, unit-normalized and stored sparsely.
pub struct BinVectors {
    rows: Vec<Vec<(u32, f64)>>,
}

impl BinVectors {
    pub fn from_maps(maps: &[ActivationMap], n_bins: usize) -> Self {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_bins];
        for m in maps {
            for (b, &v) in m.values.iter().enumerate() {
                if v != 0.0 {
                    rows[b].push((m.cell_index as u32, v));
                }
            }
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
            let norm = row.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
            for e in row.iter_mut() {
                e.1 /= norm;
            }
        }
        Self { rows }
    }

    fn cos(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.rows[i], &self.rows[j]);
        let (mut p, mut q, mut acc) = (0, 0, 0.0);
        while p < a.len() && q < b.len() {
            match a[p].0.cmp(&b[q].0) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[p].1 * b[q].1;
                    p += 1;
                    q += 1;
                }
            }
        }
        acc
    }
}

/// Spatial aliasing index of one bin: cosine similarity to every bin further
/// than `d_th`, summed and divided by the bin count.
pub fn sai(bin: usize, vectors: &BinVectors, grid: &HexGrid, params: &AliasingParams) -> f64 {
    let n = grid.len();
    if vectors.rows[bin].is_empty() {
        return 0.0;
    }
    let (xi, yi) = grid.center(bin);
    let d2 = params.d_th * params.d_th;
    let mut acc = 0.0;
    for j in 0..n {
        if j == bin || vectors.rows[j].is_empty() {
            continue;
        }
        let (xj, yj) = grid.center(j);
        if (xi - xj).powi(2) + (yi - yj).powi(2) > d2 {
            acc += vectors.cos(bin, j);
        }
    }
    acc / n as f64
}

/// SAI of every bin, in bin order.
pub fn sai_all(maps: &[ActivationMap], grid: &HexGrid, params: &AliasingParams) -> Vec<f64> {
    let vectors = BinVectors::from_maps(maps, grid.len());
    (0..grid.len()).into_par_iter().map(|b| sai(b, &vectors, grid, params)).collect()
}

/// Mean SAI over all bins.
pub fn msai(sai_values: &[f64]) -> f64 {
    if sai_values.is_empty() {
        return 0.0;
    }
    sai_values.iter().sum::<f64>() / sai_values.len() as f64
}
