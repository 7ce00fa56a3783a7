use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::targets::TargetSpec;
use crate::train::{LossKind, TrainConfig};

/// Contents of a run configuration file.
///
/// ```toml
/// vl = 3
/// mpd_layers = 1
///
/// [target]
/// family = "normal1d"
/// mu = 0.5
/// sigma = 0.1
/// grid = { n_qubits = 10, lo = 0.0, hi = 1.0, dims = 1 }
///
/// [train]
/// max_iters = 10000
/// seed = 7
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub target: Option<TargetSpec>,
    #[serde(default)]
    pub train: TrainConfig,
    pub vl: Option<usize>,
    pub mpd_layers: Option<usize>,
    pub loss: Option<LossKind>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.train.validate()?;
        if let Some(t) = &cfg.target {
            t.validate()?;
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}
