use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::baselines::PolicySpec;
use crate::environments::EnvironmentSpec;

/// Number of log-spaced checkpoints placed before the horizon.
pub const DEFAULT_CHECKPOINTS: usize = 50;

/// One experiment: an environment, a policy, and how many seeded repeats of
/// `horizon` steps to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub environment: EnvironmentSpec,
    pub policy: PolicySpec,
    pub horizon: u64,
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Explicit checkpoint steps; log-spaced when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default = "one")]
    pub parallelism: usize,
    /// Directory that relative matrix paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn one() -> usize {
    1
}

impl RunConfig {
    pub fn new(environment: EnvironmentSpec, policy: PolicySpec, horizon: u64) -> Self {
        Self {
            environment,
            policy,
            horizon,
            repeats: 1,
            base_seed: 0,
            checkpoints: None,
            parallelism: 1,
            base_dir: None,
        }
    }

    /// Reads a JSON config; relative matrix paths resolve against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.horizon == 0 {
            return Err(RunError::Config("horizon must be >= 1".into()));
        }
        if self.repeats == 0 {
            return Err(RunError::Config("repeats must be >= 1".into()));
        }
        if self.parallelism == 0 {
            return Err(RunError::Config("parallelism must be >= 1".into()));
        }
        if let Some(cps) = &self.checkpoints {
            check_checkpoints(cps, self.horizon)?;
        }
        self.policy.validate(self.horizon)?;
        Ok(())
    }

    pub fn resolved_checkpoints(&self) -> Vec<u64> {
        self.checkpoints
            .clone()
            .unwrap_or_else(|| default_checkpoints(self.horizon))
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repeats as u64).map(move |i| self.base_seed.wrapping_add(i))
    }
}

fn check_checkpoints(cps: &[u64], horizon: u64) -> Result<(), RunError> {
    if cps.is_empty() {
        return Err(RunError::Config("checkpoint list is empty".into()));
    }
    if cps[0] == 0 || cps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RunError::Config(
            "checkpoints must be positive and strictly increasing".into(),
        ));
    }
    if *cps.last().expect("nonempty") != horizon {
        return Err(RunError::Config(format!(
            "last checkpoint must equal the horizon {horizon}"
        )));
    }
    Ok(())
}

/// [`DEFAULT_CHECKPOINTS`] log-spaced steps from 10 up to (not including)
/// the horizon, deduplicated after rounding, then the horizon itself.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(DEFAULT_CHECKPOINTS + 1);
    if horizon > 10 {
        let lo = 1.0f64;
        let hi = (horizon as f64).log10();
        for i in 0..DEFAULT_CHECKPOINTS {
            let x = lo + (hi - lo) * i as f64 / DEFAULT_CHECKPOINTS as f64;
            let step = 10f64.powf(x).round() as u64;
            if step < horizon && out.last().is_none_or(|&last| step > last) {
                out.push(step);
            }
        }
    }
    out.push(horizon);
    out
}
