//! Run configuration: one TOML file, optionally including a separate vehicle
//! description, resolved into core types.

use std::path::{Path, PathBuf};

use aquadrl_core::agents::{AgentConfig, Algo, PidGains, SacConfig, Td3Config, TqcConfig};
use aquadrl_core::env::{EnvConfig, EpisodeConfig, ObsScales, RewardProfile};
use aquadrl_core::geometry::Pose;
use aquadrl_core::harness::{EvalGrid, SettlingBand};
use aquadrl_core::vehicle::{PowerModel, Thruster, ThrusterLayout, VehicleParams};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Run-level selections, all overridable from the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub algo: Algo,
    pub profile: RewardProfile,
    pub steps: u64,
    pub seed: u64,
    pub grid: EvalGrid,
    pub checkpoint_every: Option<u64>,
    pub workers: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            algo: Algo::Tqc,
            profile: RewardProfile::Hp,
            steps: 50_000,
            seed: 1,
            grid: EvalGrid::Smoke,
            checkpoint_every: Some(10_000),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeSection {
    /// `[x, y, z, roll, pitch, heading]`
    pub goal: [f64; 6],
    pub max_steps: u32,
    pub dt: f64,
    pub substeps: u32,
    pub inner_box_half: f64,
    pub outer_box_half: f64,
    pub terminate_out_of_bounds: bool,
}

impl Default for EpisodeSection {
    fn default() -> Self {
        let e = EpisodeConfig::default();
        let env = EnvConfig::default();
        Self {
            goal: [0.0, 0.0, 4.0, 0.0, 0.0, 0.0],
            max_steps: e.max_steps,
            dt: e.dt,
            substeps: env.substeps,
            inner_box_half: e.inner_box_half,
            outer_box_half: e.outer_box_half,
            terminate_out_of_bounds: env.terminate_out_of_bounds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThrusterSection {
    pub time_constant: f64,
    pub deadband: f64,
    pub units: Vec<Thruster>,
}

/// Vehicle description: hydrodynamics, thruster geometry and power model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleFile {
    pub params: VehicleParams,
    pub thrusters: ThrusterSection,
    pub power: PowerModel,
}

impl Default for VehicleFile {
    fn default() -> Self {
        let layout = ThrusterLayout::default_layout();
        Self {
            params: VehicleParams::default(),
            thrusters: ThrusterSection {
                time_constant: layout.time_constant(),
                deadband: layout.deadband(),
                units: layout.thrusters().to_vec(),
            },
            power: PowerModel::default(),
        }
    }
}

/// Either a path (relative to the including file) or an inline table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VehicleSource {
    Path(PathBuf),
    Inline(Box<VehicleFile>),
}

/// On-disk configuration layout.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub vehicle: Option<VehicleSource>,
    pub run: RunSection,
    pub episode: EpisodeSection,
    pub observation: Option<ObsScales>,
    pub settling: Option<SettlingBand>,
    pub tqc: Option<TqcConfig>,
    pub sac: Option<SacConfig>,
    pub td3: Option<Td3Config>,
    pub pid: Option<PidGains>,
}

/// Fully resolved configuration; serialising it yields a self-contained
/// file that reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub episode: EpisodeSection,
    pub observation: ObsScales,
    pub settling: SettlingBand,
    pub tqc: TqcConfig,
    pub sac: SacConfig,
    pub td3: Td3Config,
    pub pid: PidGains,
    pub vehicle: VehicleFile,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::resolve(ConfigFile::default(), Path::new(".")).expect("built-in defaults are valid")
    }
}

impl RunConfig {
    /// Reads `path` and any vehicle file it includes.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ConfigFile = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::resolve(file, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::resolve(file, base_dir)
    }

    fn resolve(file: ConfigFile, base_dir: &Path) -> Result<Self> {
        let vehicle = match file.vehicle {
            None => VehicleFile::default(),
            Some(VehicleSource::Inline(v)) => *v,
            Some(VehicleSource::Path(p)) => {
                let full = base_dir.join(&p);
                let text = std::fs::read_to_string(&full).map_err(|e| Error::io(&full, e))?;
                toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", full.display())))?
            }
        };
        let cfg = Self {
            run: file.run,
            episode: file.episode,
            observation: file.observation.unwrap_or_default(),
            settling: file.settling.unwrap_or_default(),
            tqc: file.tqc.unwrap_or_default(),
            sac: file.sac.unwrap_or_default(),
            td3: file.td3.unwrap_or_default(),
            pid: file.pid.unwrap_or_default(),
            vehicle,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.env_config()?.validate()?;
        self.layout()?;
        self.vehicle.params.validate()?;
        self.vehicle.power.validate()?;
        self.settling.validate()?;
        self.tqc.validate()?;
        self.sac.validate()?;
        self.td3.validate()?;
        self.pid.validate()?;
        if self.run.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn env_config(&self) -> Result<EnvConfig> {
        let e = &self.episode;
        let [x, y, z, r, p, h] = e.goal;
        let mut env = EnvConfig::with_profile(self.run.profile);
        env.episode = EpisodeConfig {
            goal: Pose::from_xyz_rpy(x, y, z, r, p, h),
            max_steps: e.max_steps,
            dt: e.dt,
            inner_box_half: e.inner_box_half,
            outer_box_half: e.outer_box_half,
        };
        env.scales = self.observation;
        env.substeps = e.substeps;
        env.terminate_out_of_bounds = e.terminate_out_of_bounds;
        env.validate()?;
        Ok(env)
    }

    pub fn layout(&self) -> Result<ThrusterLayout> {
        let t = &self.vehicle.thrusters;
        Ok(ThrusterLayout::new(&t.units, t.time_constant, t.deadband)?)
    }

    pub fn agent_config(&self, algo: Algo) -> AgentConfig {
        match algo {
            Algo::Tqc => AgentConfig::Tqc(self.tqc.clone()),
            Algo::Sac => AgentConfig::Sac(self.sac.clone()),
            Algo::Td3 => AgentConfig::Td3(self.td3.clone()),
        }
    }

    /// A fresh environment for this configuration.
    pub fn make_env(&self) -> Result<aquadrl_core::env::AuvEnv> {
        Ok(aquadrl_core::env::AuvEnv::new(self.env_config()?, self.vehicle.params.clone(), self.layout()?, self.vehicle.power)?)
    }
}
