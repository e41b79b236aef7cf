//! JSON experiment description: a base configuration, one swept parameter
//! and the simulation settings.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use specshape_core::analysis::FormulaMode;
use specshape_core::sim::{ReceptionModel, SimParams};
use specshape_core::{validate_config, ConfigError, NetworkConfig, SimError};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed experiment spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error("empty sweep")]
    EmptySweep,
    #[error("sweep value {value} is not a legal {param}: {reason}")]
    BadValue {
        param: SweepParam,
        value: f64,
        reason: String,
    },
    #[error("invalid base config: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid simulation settings: {0}")]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "lambda")]
    Lambda,
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "m")]
    M,
    #[serde(rename = "k")]
    K,
    #[serde(rename = "N")]
    N,
    #[serde(rename = "B")]
    B,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Epsilon => "epsilon",
            SweepParam::M => "m",
            SweepParam::K => "k",
            SweepParam::N => "N",
            SweepParam::B => "B",
        }
    }

    /// `base` with this parameter set to `value`, validated.
    pub fn apply(self, base: &NetworkConfig, value: f64) -> Result<NetworkConfig, SpecError> {
        let bad = |reason: String| SpecError::BadValue {
            param: self,
            value,
            reason,
        };
        let int = || -> Result<u32, SpecError> {
            if value.is_finite() && value.fract() == 0.0 && (0.0..=f64::from(u32::MAX)).contains(&value) {
                Ok(value as u32)
            } else {
                Err(bad("expected a non-negative integer".into()))
            }
        };
        let mut cfg = *base;
        match self {
            SweepParam::Lambda => cfg.arrival_rate = value,
            SweepParam::Epsilon => cfg.erasure_prob = value,
            SweepParam::M => cfg.batch_size = int()?,
            SweepParam::K => cfg.backoff = int()?,
            SweepParam::N => cfg.num_channels = int()?,
            SweepParam::B => cfg.minislots_per_slot = int()?,
        }
        validate_config(cfg).map_err(|e| bad(e.to_string()))
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reception {
    #[default]
    Counting,
    Coded,
}

/// Simulation settings; every field has a default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimOverrides {
    pub horizon: u64,
    /// Defaults to 10% of the horizon.
    pub warmup: Option<u64>,
    pub trials: u32,
    pub seed: u64,
    pub reception: Reception,
    pub payload_len: usize,
}

impl Default for SimOverrides {
    fn default() -> Self {
        Self {
            horizon: 110_000,
            warmup: None,
            trials: 1,
            seed: 1,
            reception: Reception::Counting,
            payload_len: specshape_core::rlnc::DEFAULT_PAYLOAD_LEN,
        }
    }
}

impl SimOverrides {
    pub fn params(&self, cfg: NetworkConfig) -> SimParams {
        let mut p = SimParams::new(cfg, self.horizon, self.seed);
        if let Some(w) = self.warmup {
            p.warmup = w;
        }
        p.trials = self.trials;
        p.reception = match self.reception {
            Reception::Counting => ReceptionModel::Counting,
            Reception::Coded => ReceptionModel::Coded {
                payload_len: self.payload_len,
            },
        };
        p
    }
}

fn default_outputs() -> Vec<FormulaMode> {
    vec![FormulaMode::Rederived]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Fields left out take the defaults (N = 10, L = 20, m = 5, λ = 0.4,
    /// ε = 0.1, B = 15, q = 256, k = 2, network coding, adaptive sensing).
    #[serde(default, deserialize_with = "partial_config")]
    pub base: NetworkConfig,
    pub sweep: Sweep,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<FormulaMode>,
    #[serde(default)]
    pub simulate: bool,
    #[serde(default)]
    pub sim: SimOverrides,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

fn partial_config<'de, D: serde::Deserializer<'de>>(d: D) -> Result<NetworkConfig, D::Error> {
    use serde::de::Error;
    let given = serde_json::Value::deserialize(d)?;
    let serde_json::Value::Object(given) = given else {
        return Err(D::Error::custom("base must be an object"));
    };
    let mut merged = serde_json::to_value(NetworkConfig::default()).map_err(D::Error::custom)?;
    let obj = merged.as_object_mut().expect("config serializes to an object");
    for (k, v) in given {
        obj.insert(k, v);
    }
    serde_json::from_value(merged).map_err(D::Error::custom)
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        validate_config(self.base)?;
        if self.sweep.values.is_empty() {
            return Err(SpecError::EmptySweep);
        }
        for &v in &self.sweep.values {
            self.sweep.parameter.apply(&self.base, v)?;
        }
        self.sim.params(self.base).validate()?;
        Ok(())
    }

    /// `(value, config)` for every sweep point, in the order given.
    pub fn points(&self) -> Result<Vec<(f64, NetworkConfig)>, SpecError> {
        self.sweep
            .values
            .iter()
            .map(|&v| Ok((v, self.sweep.parameter.apply(&self.base, v)?)))
            .collect()
    }
}
