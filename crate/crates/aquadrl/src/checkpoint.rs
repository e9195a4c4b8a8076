//! Versioned JSON policy checkpoints.
//!
//! ```json
//! { "format": "aquadrl-policy", "version": 1, "algo": "tqc", "profile": "hp",
//!   "seed": 1, "step": 50000, "observation": { ... },
//!   "policy": { "kind": { "kind": "squashed_gaussian" },
//!               "actor": { "sizes": [...], "activations": [...], "params": [...] } } }
//! ```
//! Actor parameters are stored layer by layer, each as a row-major
//! `out x in` weight block followed by the bias.

use std::path::Path;

use aquadrl_core::agents::{Algo, Policy};
use aquadrl_core::env::{ObsScales, RewardProfile};
use aquadrl_core::neural::Mlp;
use serde::{Deserialize, Serialize};

use crate::io::write_atomic;
use crate::{Error, Result};

pub const FORMAT: &str = "aquadrl-policy";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub algo: Algo,
    pub profile: RewardProfile,
    pub seed: u64,
    /// Environment steps taken when the snapshot was made.
    pub step: u64,
    /// Observation scaling the policy was trained with.
    pub observation: ObsScales,
    pub policy: Policy,
}

impl Checkpoint {
    pub fn new(algo: Algo, profile: RewardProfile, seed: u64, step: u64, observation: ObsScales, policy: Policy) -> Self {
        Self { format: FORMAT.into(), version: VERSION, algo, profile, seed, step, observation, policy }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Checkpoint(format!("not valid JSON: {e}")))?;
        let format = value.get("format").and_then(|v| v.as_str());
        let version = value.get("version").and_then(|v| v.as_u64());
        match (format, version) {
            (Some(FORMAT), Some(v)) if v == u64::from(VERSION) => {}
            (Some(FORMAT), Some(v)) => {
                return Err(Error::Checkpoint(format!("unsupported format version {v} (this build reads version {VERSION})")));
            }
            _ => return Err(Error::Checkpoint(format!("missing '{FORMAT}' format marker or version field"))),
        }
        let ck: Checkpoint = serde_json::from_value(value).map_err(|e| Error::Checkpoint(format!("invalid contents: {e}")))?;
        // Re-validate shapes and parameter finiteness.
        let a = &ck.policy.actor;
        let actor = Mlp::from_params(a.sizes().to_vec(), a.activations().to_vec(), a.params().to_vec())?;
        Policy::new(ck.policy.kind, actor)?;
        Ok(ck)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Checkpoint(m) => Error::Checkpoint(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use aquadrl_core::agents::{AgentConfig, LearnerConfig, TqcConfig};
    use aquadrl_core::SimRng;
    use rand::SeedableRng;

    fn sample() -> Checkpoint {
        let cfg = AgentConfig::Tqc(TqcConfig { learner: LearnerConfig { hidden: vec![8, 8], ..Default::default() }, ..Default::default() });
        let policy = cfg.build(&mut SimRng::seed_from_u64(3)).unwrap().policy();
        Checkpoint::new(Algo::Tqc, RewardProfile::Ea, 3, 0, ObsScales::default(), policy)
    }

    #[test]
    fn round_trip_is_exact() {
        let ck = sample();
        let back = Checkpoint::from_json(&ck.to_json().unwrap()).unwrap();
        assert_eq!(back, ck);
    }

    #[test]
    fn rejects_wrong_version_and_garbage() {
        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json().unwrap()).unwrap();
        v["version"] = 2.into();
        let err = Checkpoint::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("version 2"), "{err}");
        assert!(Checkpoint::from_json("{\"format\": \"other\"}").is_err());
        assert!(Checkpoint::from_json("not json").is_err());
    }

    #[test]
    fn rejects_inconsistent_shapes() {
        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json().unwrap()).unwrap();
        v["policy"]["actor"]["params"].as_array_mut().unwrap().pop();
        assert!(Checkpoint::from_json(&v.to_string()).is_err());
    }
}
