//! The JSON run configuration shared by every front end.
//!
//! ```json
//! {"model": "XYOpp", "m": 2, "W0": 2, "B0": 2, "dX": 1, "dY": [3, 5],
//!  "horizon": 10000, "checkpoints": [1000], "replicas": 5000, "seed": 7}
//! ```
//!
//! A law is written as an integer (point mass), a list of integers (uniform on
//! the list) or `{"atoms": [[value, "p/q"], ...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::harness::ExperimentConfig;
use crate::urn::{Count, ModelKind, UrnModel, UrnState};
use crate::{DiscreteDist, Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: String,
    pub m: u64,
    #[serde(rename = "W0")]
    pub w0: Count,
    #[serde(rename = "B0")]
    pub b0: Count,
    #[serde(rename = "dX")]
    pub dx: Value,
    #[serde(rename = "dY", default, skip_serializing_if = "Option::is_none")]
    pub dy: Option<Value>,
    #[serde(default)]
    pub horizon: u64,
    #[serde(default)]
    pub checkpoints: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn field(name: &str, e: impl std::fmt::Display) -> Error {
    let text = e.to_string();
    let text = text
        .strip_prefix("invalid model configuration: ")
        .unwrap_or(&text);
    Error::InvalidConfig(format!("{name}: {text}"))
}

/// Reads one law in any of the accepted spellings.
pub fn parse_law(v: &Value) -> Result<DiscreteDist> {
    match v {
        Value::Number(n) => {
            let x = n.as_u64().ok_or_else(|| {
                Error::InvalidDistribution(format!("{n} is not a positive integer"))
            })?;
            DiscreteDist::point_mass(x)
        }
        Value::Array(items) => {
            let support = items
                .iter()
                .map(|i| {
                    i.as_u64().ok_or_else(|| {
                        Error::InvalidDistribution(format!("{i} is not a positive integer"))
                    })
                })
                .collect::<Result<Vec<u64>>>()?;
            DiscreteDist::uniform(&support)
        }
        Value::Object(_) => {
            DiscreteDist::deserialize(v).map_err(|e| Error::InvalidDistribution(e.to_string()))
        }
        _ => Err(Error::InvalidDistribution(
            "expected an integer, a list of integers or an atoms object".into(),
        )),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn kind(&self) -> Result<ModelKind> {
        self.model.parse().map_err(|e| field("model", e))
    }

    pub fn urn_model(&self) -> Result<UrnModel> {
        let kind = self.kind()?;
        let x = parse_law(&self.dx).map_err(|e| field("dX", e))?;
        let y = self
            .dy
            .as_ref()
            .map(|v| parse_law(v).map_err(|e| field("dY", e)))
            .transpose()?;
        let model = UrnModel::new(kind, self.m, x, y).map_err(|e| match e {
            Error::ModelLaws { .. } => field("dY", e),
            other => field("m", other),
        })?;
        model
            .check_state(&self.initial())
            .map_err(|e| field("W0/B0", e))?;
        Ok(model)
    }

    pub fn initial(&self) -> UrnState {
        UrnState::new(self.w0, self.b0)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            model: self.urn_model()?,
            w0: self.w0,
            b0: self.b0,
            horizon: self.horizon,
            checkpoints: self.checkpoints.clone(),
            replicas: self
                .replicas
                .ok_or_else(|| field("replicas", "required for experiments"))?,
            master_seed: self.seed,
        };
        cfg.validate().map_err(|e| {
            let name = match &e {
                Error::InvalidConfig(msg) if msg.starts_with("replicas") => "replicas",
                Error::InvalidConfig(_) => "checkpoints",
                _ => "W0/B0",
            };
            field(name, e)
        })?;
        Ok(cfg)
    }
}
