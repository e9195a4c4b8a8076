//! The pose-regulation task: observation and action spaces, reward and the
//! episode lifecycle.

mod reward;
mod spaces;

pub use reward::{episode_energy, reward, RewardComponents, RewardProfile, RewardWeights};
pub use spaces::{observe, Action, ObsScales, Observation, ACTION_DIM, OBS_DIM};

use nalgebra::{Quaternion, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::geometry::{attitude_error, position_error, Pose, RotationMatrix, Vec3};
use crate::vehicle::{dynamics_step, PowerModel, ThrusterLayout, VehicleParams, VehicleState};
use crate::{invalid, Error, Result, SimRng};

/// Goal, timing and spawn region of an episode.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeConfig {
    pub goal: Pose,
    pub max_steps: u32,
    /// Control period, s.
    pub dt: f64,
    /// Half side of the exclusion box around the goal, m.
    pub inner_box_half: f64,
    /// Half side of the spawn box around the goal, m.
    pub outer_box_half: f64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            goal: Pose::from_xyz_rpy(0.0, 0.0, 4.0, 0.0, 0.0, 0.0),
            max_steps: 800,
            dt: 0.05,
            inner_box_half: 1.5,
            outer_box_half: 3.0,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(invalid("max_steps must be positive"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt must be positive"));
        }
        if !(0.0 < self.inner_box_half && self.inner_box_half < self.outer_box_half) {
            return Err(invalid("need 0 < inner_box_half < outer_box_half"));
        }
        if !self.goal.is_finite() {
            return Err(invalid("goal pose must be finite"));
        }
        Ok(())
    }

    /// Episode length in seconds.
    pub fn duration(&self) -> f64 {
        self.max_steps as f64 * self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnvConfig {
    pub episode: EpisodeConfig,
    pub weights: RewardWeights,
    pub scales: ObsScales,
    /// Physics substeps per control step.
    pub substeps: u32,
    /// End the episode early when the vehicle leaves the spawn box.
    pub terminate_out_of_bounds: bool,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            episode: EpisodeConfig::default(),
            weights: RewardWeights::HP,
            scales: ObsScales::default(),
            substeps: 5,
            terminate_out_of_bounds: false,
        }
    }
}

impl EnvConfig {
    pub fn with_profile(profile: RewardProfile) -> Self {
        Self { weights: profile.weights(), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.episode.validate()?;
        RewardWeights::new(self.weights.0)?;
        if self.substeps == 0 {
            return Err(invalid("substeps must be positive"));
        }
        let s = &self.scales;
        if ![s.position, s.attitude, s.linear_velocity, s.angular_velocity].iter().all(|v| *v > 0.0) {
            return Err(invalid("observation scales must be positive"));
        }
        Ok(())
    }
}

/// Diagnostics attached to every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub components: RewardComponents,
    /// Total electrical power of the applied commands, W.
    pub power: f64,
    pub position_error: Vec3,
    pub attitude_error: Vec3,
    pub theta: f64,
    /// The submitted action had to be clamped into bounds.
    pub clamped: bool,
    /// The episode ended for a reason other than the step limit.
    pub terminal: bool,
    /// The action actually applied.
    pub action: Action,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// Single-vehicle pose-regulation environment.
#[derive(Debug, Clone)]
pub struct AuvEnv {
    config: EnvConfig,
    params: VehicleParams,
    layout: ThrusterLayout,
    power: PowerModel,
    state: VehicleState,
    prev_action: Action,
    steps: u32,
    active: bool,
}

impl AuvEnv {
    pub fn new(config: EnvConfig, params: VehicleParams, layout: ThrusterLayout, power: PowerModel) -> Result<Self> {
        config.validate()?;
        params.validate()?;
        power.validate()?;
        Ok(Self {
            state: VehicleState::at_rest(config.episode.goal),
            config,
            params,
            layout,
            power,
            prev_action: Action::ZERO,
            steps: 0,
            active: false,
        })
    }

    /// Default vehicle and layout with the given task configuration.
    pub fn with_defaults(config: EnvConfig) -> Result<Self> {
        Self::new(config, VehicleParams::default(), ThrusterLayout::default_layout(), PowerModel::default())
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn params(&self) -> &VehicleParams {
        &self.params
    }

    pub fn layout(&self) -> &ThrusterLayout {
        &self.layout
    }

    pub fn power_model(&self) -> &PowerModel {
        &self.power
    }

    pub fn state(&self) -> &VehicleState {
        &self.state
    }

    pub fn goal(&self) -> &Pose {
        &self.config.episode.goal
    }

    pub fn prev_action(&self) -> &Action {
        &self.prev_action
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    /// Starts an episode from a random pose drawn with `seed`.
    pub fn reset(&mut self, seed: u64) -> Result<Observation> {
        let mut rng = SimRng::seed_from_u64(seed);
        let start = sample_start(&self.config.episode, &mut rng);
        self.reset_to(start)
    }

    /// Starts an episode at rest from `start`.
    pub fn reset_to(&mut self, start: Pose) -> Result<Observation> {
        self.reset_to_state(VehicleState::at_rest(start))
    }

    pub fn reset_to_state(&mut self, state: VehicleState) -> Result<Observation> {
        if !state.pose.is_finite() {
            return Err(invalid("start pose must be finite"));
        }
        self.state = state;
        self.prev_action = Action::ZERO;
        self.steps = 0;
        self.active = true;
        self.observation()
    }

    pub fn observation(&self) -> Result<Observation> {
        observe(&self.state, self.goal(), &self.prev_action, &self.config.scales)
    }

    /// Applies `action` for one control period.
    pub fn step(&mut self, action: &Action) -> Result<Step> {
        if !self.active {
            return Err(Error::EpisodeDone);
        }
        let (action, clamped) = action.clamped();
        let sub_dt = self.config.episode.dt / self.config.substeps as f64;
        let mut state = self.state;
        for _ in 0..self.config.substeps {
            state = match dynamics_step(&state, &action.0, sub_dt, &self.params, &self.layout) {
                Ok(s) => s,
                Err(e) => {
                    self.active = false;
                    return Err(e);
                }
            };
        }
        self.state = state;

        let goal = self.config.episode.goal;
        let ep = position_error(&state.pose.position, &goal.position);
        let ea = attitude_error(&state.pose.rotation, &goal.rotation)?;
        let theta = ea.norm();
        let errors = [ep.x, ep.y, ep.z, ea.x, ea.y, ea.z];
        let (r, components) = reward(&errors, theta, &action, &self.prev_action, &self.config.weights);
        let power = self.power.total_power(&action.0);

        self.prev_action = action;
        self.steps += 1;
        let out_of_bounds = ep.iter().any(|e| e.abs() > self.config.episode.outer_box_half);
        let terminal = self.config.terminate_out_of_bounds && out_of_bounds;
        let done = terminal || self.steps >= self.config.episode.max_steps;
        if done {
            self.active = false;
        }
        Ok(Step {
            observation: self.observation()?,
            reward: r,
            done,
            info: StepInfo {
                components,
                power,
                position_error: ep,
                attitude_error: ea,
                theta,
                clamped,
                terminal,
                action,
            },
        })
    }
}

/// Uniform position in the shell between the inner and outer boxes around
/// the goal, and a uniformly random orientation.
pub fn sample_start(cfg: &EpisodeConfig, rng: &mut SimRng) -> Pose {
    let outer = cfg.outer_box_half;
    let offset = loop {
        let v = Vec3::new(
            rng.gen_range(-outer..=outer),
            rng.gen_range(-outer..=outer),
            rng.gen_range(-outer..=outer),
        );
        if v.iter().any(|c| c.abs() > cfg.inner_box_half) {
            break v;
        }
    };
    Pose::new(cfg.goal.position + offset, uniform_rotation(rng))
}

/// Haar-uniform rotation from a normalised 4-D Gaussian quaternion.
pub fn uniform_rotation(rng: &mut SimRng) -> RotationMatrix {
    loop {
        let q: [f64; 4] = core::array::from_fn(|_| rng.sample(StandardNormal));
        let quat = Quaternion::new(q[0], q[1], q[2], q[3]);
        if quat.norm() > 1e-6 {
            let m = UnitQuaternion::from_quaternion(quat).to_rotation_matrix().into_inner();
            return RotationMatrix::from_matrix_unchecked(m);
        }
    }
}
