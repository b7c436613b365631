//! Place cell network: leaky membrane dynamics with feedforward and recurrent
//! inhibition, a rectified-tanh rate readout and Oja plasticity on the
//! BVC-to-place weights.
//!
//! Integration is forward Euler with `substeps_per_update` substeps per
//! sensory update. Summation order is fixed so runs are bit-reproducible.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PcnParams {
    /// Membrane time constant, seconds.
    pub tau_p: f64,
    /// Feedforward inhibition gain on the summed BVC rate.
    pub gamma_pb: f64,
    /// Recurrent inhibition gain on the summed place-cell rate.
    pub gamma_pp: f64,
    /// Gain inside the rate nonlinearity.
    pub psi_gain: f64,
    /// Learning time constant, seconds.
    pub tau_wpb: f64,
    /// Weight normalization of the Oja rule.
    pub alpha_pb: f64,
    /// Euler step, seconds.
    pub dt: f64,
    pub substeps_per_update: usize,
    /// Upper bound of the uniform initial weight draw.
    pub init_w0: f64,
    /// Initial row sum as a multiple of `alpha_pb`.
    pub init_c0: f64,
    /// Factor applied to the BVC rates before they reach the network.
    pub input_gain: f64,
}

impl Default for PcnParams {
    fn default() -> Self {
        Self {
            tau_p: 0.1,
            gamma_pb: 0.5,
            gamma_pp: 0.3,
            psi_gain: 10.0,
            tau_wpb: 2.0,
            alpha_pb: 1.0,
            dt: 0.02,
            substeps_per_update: 5,
            init_w0: 1.0,
            init_c0: 495.0,
            input_gain: 1.0,
        }
    }
}

impl PcnParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau_p", self.tau_p),
            ("psi_gain", self.psi_gain),
            ("tau_wpb", self.tau_wpb),
            ("alpha_pb", self.alpha_pb),
            ("dt", self.dt),
            ("init_w0", self.init_w0),
            ("init_c0", self.init_c0),
            ("input_gain", self.input_gain),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("pcn.{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("gamma_pb", self.gamma_pb), ("gamma_pp", self.gamma_pp)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("pcn.{name} must be nonnegative, got {v}")));
            }
        }
        if self.substeps_per_update == 0 {
            return Err(Error::Config("pcn.substeps_per_update must be at least 1".into()));
        }
        if self.dt >= self.tau_p || self.dt >= self.tau_wpb {
            return Err(Error::Config(format!(
                "pcn.dt {} must be below tau_p {} and tau_wpb {}",
                self.dt, self.tau_p, self.tau_wpb
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaceCellNetwork {
    n_p: usize,
    n_b: usize,
    /// Row-major `n_p × n_b`.
    weights: Vec<f64>,
    potentials: Vec<f64>,
    rates: Vec<f64>,
    params: PcnParams,
    /// `weights · v_b` for the input of the last substep.
    drive: Vec<f64>,
    /// Scaled input of the current update.
    input: Vec<f64>,
}

/// Uniform weights on `[0, init_w0]`, each row rescaled to sum to
/// `alpha_pb · init_c0`. Deterministic in `seed`.
pub fn init_network(n_p: usize, n_b: usize, seed: u64, params: PcnParams) -> Result<PlaceCellNetwork> {
    if n_p == 0 || n_b == 0 {
        return Err(Error::Config("network dimensions must be positive".into()));
    }
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = params.alpha_pb * params.init_c0;
    let mut weights = Vec::with_capacity(n_p * n_b);
    for _ in 0..n_p {
        let row: Vec<f64> = (0..n_b).map(|_| rng.gen_range(0.0..=params.init_w0)).collect();
        let sum: f64 = row.iter().sum();
        let k = if sum > 0.0 { target / sum } else { 0.0 };
        weights.extend(row.into_iter().map(|w| w * k));
    }
    Ok(PlaceCellNetwork {
        n_p,
        n_b,
        weights,
        potentials: vec![0.0; n_p],
        rates: vec![0.0; n_p],
        params,
        drive: vec![0.0; n_p],
        input: vec![0.0; n_b],
    })
}

impl PlaceCellNetwork {
    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn params(&self) -> &PcnParams {
        &self.params
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n_b..(i + 1) * self.n_b]
    }

    pub fn reset_state(&mut self) {
        self.potentials.fill(0.0);
        self.rates.fill(0.0);
    }

    /// Advances the network by one sensory update and returns the rates.
    pub fn step(&mut self, v_b: &[f64], plasticity: bool) -> &[f64] {
        assert_eq!(v_b.len(), self.n_b, "BVC input length");
        let p = self.params.clone();
        let mut input = std::mem::take(&mut self.input);
        for (x, &v) in input.iter_mut().zip(v_b) {
            *x = p.input_gain * v;
        }
        let k = p.dt / p.tau_p;
        let ff = p.gamma_pb * input.iter().sum::<f64>();
        for i in 0..self.n_p {
            self.drive[i] = dot(self.weight_row(i), &input);
        }
        for _ in 0..p.substeps_per_update {
            let rec = p.gamma_pp * self.rates.iter().sum::<f64>();
            for i in 0..self.n_p {
                let s = self.potentials[i];
                self.potentials[i] = s + k * (-s + self.drive[i] - ff - rec);
            }
            let psi = p.psi_gain;
            for (v, &s) in self.rates.iter_mut().zip(&self.potentials) {
                *v = (psi * s.max(0.0)).tanh();
            }
            if plasticity {
                self.learn(&input);
            }
        }
        self.input = input;
        &self.rates
    }

    /// One Euler step of the Oja rule at the current place-cell rates,
    /// clamping weights at zero. Rows of silent cells are untouched.
    /// `v_b` is scaled by `input_gain` like the input of [`Self::step`].
    pub fn oja_update(&mut self, v_b: &[f64]) {
        assert_eq!(v_b.len(), self.n_b, "BVC input length");
        let input: Vec<f64> = v_b.iter().map(|v| v * self.params.input_gain).collect();
        self.learn(&input);
    }

    fn learn(&mut self, input: &[f64]) {
        let eta = self.params.dt / self.params.tau_wpb;
        let inv_alpha = 1.0 / self.params.alpha_pb;
        for i in 0..self.n_p {
            let vp = self.rates[i];
            if vp == 0.0 {
                continue;
            }
            let decay = vp * inv_alpha;
            let row = &mut self.weights[i * self.n_b..(i + 1) * self.n_b];
            for (w, &vb) in row.iter_mut().zip(input) {
                *w = (*w + eta * vp * (vb - decay * *w)).max(0.0);
            }
            self.drive[i] = dot(row, input);
        }
    }

    /// Binary snapshot: magic, dimensions, parameters, membrane potentials,
    /// then row-major weights, all little-endian.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&(self.n_p as u64).to_le_bytes())?;
        w.write_all(&(self.n_b as u64).to_le_bytes())?;
        let p = &self.params;
        for v in [
            p.tau_p,
            p.gamma_pb,
            p.gamma_pp,
            p.psi_gain,
            p.tau_wpb,
            p.alpha_pb,
            p.dt,
            p.init_w0,
            p.init_c0,
            p.input_gain,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(p.substeps_per_update as u64).to_le_bytes())?;
        for v in self.potentials.iter().chain(&self.weights) {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self> {
        let bad = |detail: &str| Error::Config(format!("network snapshot: {detail}"));
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|e| Error::io("network snapshot", e))?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(bad("bad magic"));
        }
        let mut u = || -> Result<u64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b).map_err(|e| Error::io("network snapshot", e))?;
            Ok(u64::from_le_bytes(b))
        };
        let n_p = u()? as usize;
        let n_b = u()? as usize;
        let mut f = [0f64; 10];
        for v in f.iter_mut() {
            *v = f64::from_bits(u()?);
        }
        let substeps = u()? as usize;
        let params = PcnParams {
            tau_p: f[0],
            gamma_pb: f[1],
            gamma_pp: f[2],
            psi_gain: f[3],
            tau_wpb: f[4],
            alpha_pb: f[5],
            dt: f[6],
            init_w0: f[7],
            init_c0: f[8],
            input_gain: f[9],
            substeps_per_update: substeps,
        };
        params.validate()?;
        if n_p == 0 || n_b == 0 || n_p.saturating_mul(n_b) > (1 << 28) {
            return Err(bad("implausible dimensions"));
        }
        let potentials = (0..n_p).map(|_| u().map(f64::from_bits)).collect::<Result<Vec<_>>>()?;
        let weights = (0..n_p * n_b).map(|_| u().map(f64::from_bits)).collect::<Result<Vec<_>>>()?;
        let psi = params.psi_gain;
        let rates = potentials.iter().map(|&s: &f64| (psi * s.max(0.0)).tanh()).collect();
        Ok(Self { n_p, n_b, weights, potentials, rates, params, drive: vec![0.0; n_p], input: vec![0.0; n_b] })
    }
}

const SNAPSHOT_MAGIC: &[u8; 8] = b"BVCPCN1\n";

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
