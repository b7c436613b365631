//! Boundary vector cell populations.
//!
//! A cell responds to boundary points near its preferred distance, allocentric
//! azimuth and (for vertically tuned cells) elevation, with a product of
//! Gaussians in each coordinate. Rates are divided by `2 · n_res · P`, `P`
//! being the product of the Gaussian peak densities, so a scan whose every
//! point sits at a cell's preferred tuning drives that cell to exactly 0.5.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sensor::{wrap_angle, BoundaryPoints};

/// Population size shared by every configuration.
pub const N_BVC: usize = 960;

/// Points further than this many tuning widths from a cell's preferred
/// azimuth or elevation are skipped. The dropped mass is below e^-18 per
/// point, far under any tolerance that matters downstream.
pub const PRUNE_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelName {
    #[serde(rename = "2d")]
    Model2d,
    #[serde(rename = "3d01")]
    Model3d01,
    #[serde(rename = "3d02")]
    Model3d02,
    #[serde(rename = "3d3")]
    Model3dThreeLayer,
}

impl ModelName {
    pub const ALL: [ModelName; 4] =
        [ModelName::Model2d, ModelName::Model3d01, ModelName::Model3d02, ModelName::Model3dThreeLayer];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Model2d => "2d",
            ModelName::Model3d01 => "3d01",
            ModelName::Model3d02 => "3d02",
            ModelName::Model3dThreeLayer => "3d3",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelName::Model2d => "2D",
            ModelName::Model3d01 => "3D (0.1 rad)",
            ModelName::Model3d02 => "3D (0.2 rad)",
            ModelName::Model3dThreeLayer => "3D (three-layer)",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown model {s:?} (expected 2d, 3d01, 3d02 or 3d3)")))
    }
}

/// Layout and tuning of a BVC population.
///
/// An empty `vertical_angles` list means a planar population: cells have no
/// elevation tuning and are fed by the horizontal scanner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: ModelName,
    pub horizontal_directions: usize,
    pub vertical_angles: Vec<f64>,
    pub bvcs_per_axis: usize,
    pub d_max: f64,
    pub sigma_r: f64,
    pub sigma_theta: f64,
    pub sigma_phi: f64,
}

impl ModelConfig {
    pub fn preset(name: ModelName) -> Self {
        let (vertical_angles, bvcs_per_axis) = match name {
            ModelName::Model2d => (vec![], 120),
            ModelName::Model3d01 => (vec![0.0, 0.1], 60),
            ModelName::Model3d02 => (vec![0.0, 0.2], 60),
            ModelName::Model3dThreeLayer => (vec![0.0, 0.1, 0.2], 40),
        };
        Self {
            name,
            horizontal_directions: 8,
            vertical_angles,
            bvcs_per_axis,
            d_max: 12.0,
            sigma_r: 0.75,
            sigma_theta: 0.1,
            sigma_phi: 0.01,
        }
    }

    pub fn is_planar(&self) -> bool {
        self.vertical_angles.is_empty()
    }

    pub fn layers(&self) -> usize {
        self.vertical_angles.len().max(1)
    }

    pub fn cell_count(&self) -> usize {
        self.horizontal_directions * self.layers() * self.bvcs_per_axis
    }

    pub fn validate(&self) -> Result<()> {
        if self.cell_count() != N_BVC {
            return Err(Error::Config(format!(
                "BVC layout {} directions x {} layers x {} per axis = {} cells, expected {N_BVC}",
                self.horizontal_directions,
                self.layers(),
                self.bvcs_per_axis,
                self.cell_count()
            )));
        }
        let positive = [
            ("d_max", self.d_max),
            ("sigma_r", self.sigma_r),
            ("sigma_theta", self.sigma_theta),
            ("sigma_phi", self.sigma_phi),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(a) = self.vertical_angles.iter().find(|a| !(0.0..=PI / 2.0).contains(*a)) {
            return Err(Error::Config(format!("vertical angle {a} outside [0, pi/2]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvcCell {
    pub preferred_distance: f64,
    pub preferred_azimuth: f64,
    /// `None` for planar cells.
    pub preferred_elevation: Option<f64>,
    pub sigma_r: f64,
    pub sigma_theta: f64,
    pub sigma_phi: f64,
}

/// Cells ordered direction-major, then elevation, then distance, so each
/// (direction, elevation) pair owns a contiguous block of `bvcs_per_axis`
/// cells.
#[derive(Debug, Clone)]
pub struct BvcPopulation {
    cells: Vec<BvcCell>,
    config: ModelConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvcActivations {
    pub rates: Vec<f64>,
}

pub fn build_population(config: &ModelConfig) -> Result<BvcPopulation> {
    config.validate()?;
    let elevations: Vec<Option<f64>> = if config.is_planar() {
        vec![None]
    } else {
        config.vertical_angles.iter().copied().map(Some).collect()
    };
    let spacing = config.d_max / config.bvcs_per_axis as f64;
    let mut cells = Vec::with_capacity(config.cell_count());
    for k in 0..config.horizontal_directions {
        let azimuth = wrap_angle(k as f64 * 2.0 * PI / config.horizontal_directions as f64);
        for &elevation in &elevations {
            for m in 1..=config.bvcs_per_axis {
                cells.push(BvcCell {
                    preferred_distance: m as f64 * spacing,
                    preferred_azimuth: azimuth,
                    preferred_elevation: elevation,
                    sigma_r: config.sigma_r,
                    sigma_theta: config.sigma_theta,
                    sigma_phi: config.sigma_phi,
                });
            }
        }
    }
    Ok(BvcPopulation { cells, config: config.clone() })
}

impl BvcPopulation {
    pub fn cells(&self) -> &[BvcCell] {
        &self.cells
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Firing rates for one scan. Zero for every cell when the scan is empty.
    pub fn compute_activations(&self, points: &BoundaryPoints) -> BvcActivations {
        let mut rates = vec![0.0; self.cells.len()];
        self.compute_into(points, &mut rates);
        BvcActivations { rates }
    }

    /// As [`compute_activations`](Self::compute_activations), writing into
    /// `rates` (length `len()`).
    pub fn compute_into(&self, points: &BoundaryPoints, rates: &mut [f64]) {
        assert_eq!(rates.len(), self.cells.len());
        rates.fill(0.0);
        let n_res = points.n_res();
        if n_res == 0 {
            return;
        }
        let scale = 1.0 / (2.0 * n_res as f64);
        let mut window = Window::default();
        for (block, out) in self.cells.chunks(self.config.bvcs_per_axis).zip(rates.chunks_mut(self.config.bvcs_per_axis)) {
            window.select(&block[0], points);
            if window.weights.is_empty() {
                continue;
            }
            for (cell, rate) in block.iter().zip(out.iter_mut()) {
                let inv = -0.5 / (cell.sigma_r * cell.sigma_r);
                let mut acc = 0.0;
                for (&r, &w) in window.ranges.iter().zip(&window.weights) {
                    let dr = r - cell.preferred_distance;
                    acc += w * (inv * dr * dr).exp();
                }
                *rate = acc * scale;
            }
        }
    }
}

impl BvcPopulation {
    /// Rate of every cell when each point of `directions` lies at that
    /// cell's preferred distance, i.e. the response to a boundary
    /// surrounding the agent at exactly the tuned range. Ranges in
    /// `directions` are ignored.
    pub fn surround_response(&self, directions: &BoundaryPoints) -> Vec<f64> {
        let n_res = directions.n_res();
        if n_res == 0 {
            return vec![0.0; self.cells.len()];
        }
        let scale = 1.0 / (2.0 * n_res as f64);
        let mut window = Window::default();
        let mut out = Vec::with_capacity(self.cells.len());
        for block in self.cells.chunks(self.config.bvcs_per_axis) {
            window.select(&block[0], directions);
            let rate = window.weights.iter().sum::<f64>() * scale;
            out.extend(std::iter::repeat_n(rate, block.len()));
        }
        out
    }
}

/// Points surviving the angular window of one (direction, elevation) block,
/// with their angular tuning factors (peak-normalized).
#[derive(Default)]
struct Window {
    ranges: Vec<f64>,
    weights: Vec<f64>,
}

impl Window {
    fn select(&mut self, cell: &BvcCell, points: &BoundaryPoints) {
        self.ranges.clear();
        self.weights.clear();
        let max_dt = PRUNE_SIGMAS * cell.sigma_theta;
        let inv_t = -0.5 / (cell.sigma_theta * cell.sigma_theta);
        let max_dp = PRUNE_SIGMAS * cell.sigma_phi;
        let inv_p = -0.5 / (cell.sigma_phi * cell.sigma_phi);
        for p in &points.points {
            let dt = wrap_angle(p.theta - cell.preferred_azimuth);
            if dt.abs() > max_dt {
                continue;
            }
            let mut e = inv_t * dt * dt;
            if let Some(el) = cell.preferred_elevation {
                let dp = p.phi - el;
                if dp.abs() > max_dp {
                    continue;
                }
                e += inv_p * dp * dp;
            }
            self.ranges.push(p.r);
            self.weights.push(e.exp());
        }
    }
}
