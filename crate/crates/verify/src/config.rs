//! Experiment configuration.

use std::path::PathBuf;

use anyhow::{bail, Result};
use dynwalk::constructions::ConstructionSpec;
use dynwalk::Tolerances;
use serde::{Deserialize, Serialize};

use crate::suites::SUITES;

pub const DEFAULT_SEED: u64 = 20_261_014;

/// Everything a suite run depends on. Fields a suite does not read are
/// ignored by it; unset fields take the suite's defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub construction: Option<ConstructionSpec>,
    #[serde(default)]
    pub schedule: Option<PathBuf>,
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    /// Number of random instances (schedules, graphs, queries).
    #[serde(default)]
    pub instances: Option<usize>,
    #[serde(default)]
    pub trials: Option<usize>,
    /// Horizon cap: steps to trace, or the hitting/mixing search limit.
    #[serde(default)]
    pub tmax: Option<usize>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl ExperimentConfig {
    pub fn new(suite: &str) -> Self {
        ExperimentConfig {
            suite: suite.to_string(),
            seed: DEFAULT_SEED,
            construction: None,
            schedule: None,
            sizes: None,
            seeds: None,
            instances: None,
            trials: None,
            tmax: None,
            eps: None,
            tolerances: Tolerances::default(),
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| anyhow::anyhow!("config parse error at line {}: {e}", e.line()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !SUITES.contains(&self.suite.as_str()) {
            bail!("unknown suite {:?}; expected one of {}", self.suite, SUITES.join(", "));
        }
        if let Some(s) = &self.sizes {
            if s.is_empty() || s.contains(&0) {
                bail!("sizes must be a nonempty list of positive integers");
            }
        }
        if self.seeds.as_ref().is_some_and(|s| s.is_empty()) {
            bail!("seeds must be nonempty when given");
        }
        for (name, v) in [("instances", self.instances), ("trials", self.trials), ("tmax", self.tmax)] {
            if v == Some(0) {
                bail!("{name} must be positive");
            }
        }
        if let Some(e) = self.eps {
            if !(e > 0.0 && e < 1.0) {
                bail!("eps must lie in (0, 1)");
            }
        }
        let t = &self.tolerances;
        for (name, v) in
            [("structural", t.structural), ("spectral", t.spectral), ("inequality", t.inequality), ("stationary", t.stationary)]
        {
            if !(v.is_finite() && v >= 0.0) {
                bail!("tolerance {name} must be finite and non-negative");
            }
        }
        Ok(())
    }

    pub fn sizes_or(&self, default: &[usize]) -> Vec<usize> {
        self.sizes.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn seeds_or(&self, default: &[u64]) -> Vec<u64> {
        self.seeds.clone().unwrap_or_else(|| default.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::from_json(r#"{"suite":"midpoint","sizez":[3]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"suite":"nope"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"suite":"midpoint","eps":2}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"suite":"midpoint","sizes":[]}"#).is_err());
        let err = ExperimentConfig::from_json("{\n\"suite\": \"midpoint\",\n\"seed\": \"x\"}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn accepts_nested_sections() {
        let c = ExperimentConfig::from_json(
            r#"{"suite":"cover-gap","trials":20,"tolerances":{"inequality":1e-8},
               "construction":{"name":"complete_then_cycle","params":{"n":16}}}"#,
        )
        .unwrap();
        assert_eq!(c.trials, Some(20));
        assert_eq!(c.tolerances.inequality, 1e-8);
        assert_eq!(c.seed, DEFAULT_SEED);
        assert!(c.construction.is_some());
    }
}
