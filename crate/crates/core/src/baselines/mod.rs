//! Comparison policies behind the common [`DuelPolicy`] interface, and the
//! JSON-facing [`PolicySpec`] that builds any policy by name.

mod dts;
mod merge_rucb;
mod rucb;
mod self_sparring;

pub use dts::Dts;
pub use merge_rucb::MergeRucb;
pub use rucb::Rucb;
pub use self_sparring::SelfSparring;

use serde::{Deserialize, Serialize};

use crate::mergedts::{MergeDts, MergeDtsParams};
use crate::policy::{DuelPolicy, PolicyError};

/// Default exploration parameter for RUCB and DTS.
pub const DEFAULT_UCB_ALPHA: f64 = 0.51;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    MergeDts,
    MergeRucb,
    Rucb,
    Dts,
    SelfSparring,
}

impl PolicyKind {
    pub fn is_merge_family(self) -> bool {
        matches!(self, PolicyKind::MergeDts | PolicyKind::MergeRucb)
    }
}

/// `{"kind": "...", "params": {...}}`. Unknown parameter keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MergeParamsJson {
    alpha: Option<f64>,
    batch_size: Option<usize>,
    epsilon: Option<f64>,
    c_override: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct UcbParamsJson {
    alpha: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn parse_params<T: serde::de::DeserializeOwned>(
    params: &serde_json::Map<String, serde_json::Value>,
) -> Result<T, PolicyError> {
    serde_json::from_value(serde_json::Value::Object(params.clone()))
        .map_err(|e| PolicyError::BadParams(e.to_string()))
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            params: serde_json::Map::new(),
        }
    }

    /// Adds a parameter, builder style.
    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Merge-family parameters resolved against `horizon`. Missing values
    /// default to the theory regime (`alpha = 1.01`, `M = 4`, `epsilon = 1/T`).
    pub fn merge_params(&self, horizon: u64) -> Result<Option<MergeDtsParams>, PolicyError> {
        if !self.kind.is_merge_family() {
            return Ok(None);
        }
        let raw: MergeParamsJson = parse_params(&self.params)?;
        let defaults = MergeDtsParams::theoretical(horizon);
        Ok(Some(MergeDtsParams {
            alpha: raw.alpha.unwrap_or(defaults.alpha),
            batch_size: raw.batch_size.unwrap_or(defaults.batch_size),
            horizon,
            epsilon: raw.epsilon,
            c_override: raw.c_override,
        }))
    }

    /// Checks parameter names and values without needing the arm count.
    pub fn validate(&self, horizon: u64) -> Result<(), PolicyError> {
        self.build(2, horizon).map(|_| ())
    }

    pub fn build(&self, k: usize, horizon: u64) -> Result<Box<dyn DuelPolicy>, PolicyError> {
        Ok(match self.kind {
            PolicyKind::MergeDts => {
                let p = self.merge_params(horizon)?.expect("merge family");
                Box::new(MergeDts::new(k, p)?)
            }
            PolicyKind::MergeRucb => {
                let p = self.merge_params(horizon)?.expect("merge family");
                Box::new(MergeRucb::new(k, p)?)
            }
            PolicyKind::Rucb => {
                let p: UcbParamsJson = parse_params(&self.params)?;
                Box::new(Rucb::new(k, p.alpha.unwrap_or(DEFAULT_UCB_ALPHA))?)
            }
            PolicyKind::Dts => {
                let p: UcbParamsJson = parse_params(&self.params)?;
                Box::new(Dts::new(k, p.alpha.unwrap_or(DEFAULT_UCB_ALPHA))?)
            }
            PolicyKind::SelfSparring => {
                let _: NoParams = parse_params(&self.params)?;
                Box::new(SelfSparring::new(k)?)
            }
        })
    }
}
