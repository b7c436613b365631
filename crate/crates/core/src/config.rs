//! Run configuration.
//!
//! A configuration starts from the model and environment presets, then
//! takes overrides from a TOML file and finally from individual flags. The
//! resolved parameter set is fully explicit and its digest identifies every
//! artifact a run produces.
//!
//! ```toml
//! model = "3d02"
//! env = 4
//!
//! [walk]
//! seed = 7
//! sampling_steps = 20000
//!
//! [pcn]
//! gamma_pp = 0.4
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agent::WalkParams;
use crate::bvc::{ModelConfig, ModelName};
use crate::error::{Error, Result};
use crate::geometry::EnvironmentSpec;
use crate::metrics::AliasingParams;
use crate::pcn::PcnParams;

pub const DEFAULT_PLACE_CELLS: usize = 250;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisParams {
    pub grid_nx: usize,
    pub grid_ny: usize,
    /// Minimum bin separation for aliasing comparisons, metres.
    pub d_th: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self { grid_nx: 50, grid_ny: 50, d_th: AliasingParams::default().d_th }
    }
}

impl AnalysisParams {
    pub fn aliasing(&self) -> AliasingParams {
        AliasingParams { d_th: self.d_th }
    }
}

/// A complete parameter set for one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelName,
    /// Environment preset the geometry started from (1-4).
    pub env: u8,
    pub n_place_cells: usize,
    /// Divide BVC rates by the model's reference rate before they reach the
    /// place cells (see [`crate::agent::reference_rate`]).
    pub normalize_input: bool,
    pub environment: EnvironmentSpec,
    pub bvc: ModelConfig,
    pub pcn: PcnParams,
    pub walk: WalkParams,
    pub analysis: AnalysisParams,
}

/// Values given on the command line or through the environment. They win
/// over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub model: Option<ModelName>,
    pub env: Option<u8>,
    pub seed: Option<u64>,
    pub exploration_steps: Option<usize>,
    pub sampling_steps: Option<usize>,
}

impl RunConfig {
    pub fn preset(model: ModelName, env: u8) -> Result<Self> {
        Ok(Self {
            model,
            env,
            n_place_cells: DEFAULT_PLACE_CELLS,
            normalize_input: true,
            environment: EnvironmentSpec::preset(env)?,
            bvc: ModelConfig::preset(model),
            pcn: PcnParams::default(),
            walk: WalkParams::default(),
            analysis: AnalysisParams::default(),
        })
    }

    /// Presets, then `file`, then `flags`.
    pub fn resolve(file: Option<&toml::Table>, flags: &Overrides) -> Result<Self> {
        let from_file = |key: &str| file.and_then(|t| t.get(key));
        let model = match (flags.model, from_file("model")) {
            (Some(m), _) => m,
            (None, Some(v)) => v
                .as_str()
                .ok_or_else(|| Error::Config("model must be a string".into()))?
                .parse()?,
            (None, None) => ModelName::Model2d,
        };
        let env = match (flags.env, from_file("env")) {
            (Some(e), _) => e,
            (None, Some(v)) => v
                .as_integer()
                .and_then(|i| u8::try_from(i).ok())
                .ok_or_else(|| Error::Config("env must be an integer 1-4".into()))?,
            (None, None) => 1,
        };
        let mut value = serde_json::to_value(Self::preset(model, env)?).expect("config serializes");
        if let Some(table) = file {
            let patch = serde_json::to_value(table).map_err(|e| Error::Config(e.to_string()))?;
            merge(&mut value, patch);
        }
        value["model"] = serde_json::to_value(model).expect("model serializes");
        value["env"] = env.into();
        if let Some(seed) = flags.seed {
            value["walk"]["seed"] = seed.into();
        }
        if let Some(n) = flags.exploration_steps {
            value["walk"]["exploration_steps"] = n.into();
        }
        if let Some(n) = flags.sampling_steps {
            value["walk"]["sampling_steps"] = n.into();
        }
        let config: RunConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.environment.validate()?;
        self.bvc.validate()?;
        self.pcn.validate()?;
        self.walk.validate()?;
        if self.bvc.name != self.model {
            return Err(Error::Config(format!(
                "bvc.name {} does not match model {}",
                self.bvc.name, self.model
            )));
        }
        if self.n_place_cells == 0 {
            return Err(Error::Config("n_place_cells must be positive".into()));
        }
        if self.analysis.grid_nx == 0 || self.analysis.grid_ny == 0 {
            return Err(Error::Config("analysis grid must have at least one bin per axis".into()));
        }
        if !(self.analysis.d_th > 0.0 && self.analysis.d_th.is_finite()) {
            return Err(Error::Config(format!("analysis.d_th must be positive, got {}", self.analysis.d_th)));
        }
        if i64::try_from(self.walk.seed).is_err() {
            return Err(Error::Config(format!("seed {} does not fit a signed 64-bit integer", self.walk.seed)));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, lowercase hex.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(json.as_bytes()))
    }

    /// TOML text that resolves back to this configuration, preceded by a
    /// digest comment.
    pub fn to_toml(&self) -> String {
        let body = toml::to_string(self).expect("config serializes to TOML");
        format!("# digest {}\n{body}", self.digest())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

/// Parses a TOML configuration file into a table of overrides.
pub fn load_table(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn merge(base: &mut serde_json::Value, patch: serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
