use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;

use super::grid::GridStart;
use super::metrics::{rmse, settling_time, EpisodeMetrics, SettlingBand};
use crate::agents::{PidController, PidGains, Policy};
use crate::env::{episode_energy, Action, AuvEnv, Observation, ACTION_DIM};
use crate::geometry::{attitude_error, position_error, rotation_to_rpy, Pose};
use crate::{Error, Result, SimRng};

/// Anything that can drive the vehicle for an episode.
pub trait Controller {
    fn name(&self) -> String;
    /// Called before every episode.
    fn reset(&mut self);
    fn act(&mut self, env: &AuvEnv, obs: &Observation) -> Result<Action>;
}

/// Learned policy in deterministic mode.
#[derive(Debug, Clone)]
pub struct PolicyController {
    policy: Policy,
    label: String,
    rng: SimRng,
}

impl PolicyController {
    pub fn new(policy: Policy, label: impl Into<String>) -> Self {
        Self { policy, label: label.into(), rng: SimRng::seed_from_u64(0) }
    }
}

impl Controller for PolicyController {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn reset(&mut self) {}

    fn act(&mut self, _env: &AuvEnv, obs: &Observation) -> Result<Action> {
        self.policy.act(obs, true, &mut self.rng)
    }
}

/// Cascaded PID acting on the true vehicle state at the control period.
#[derive(Debug, Clone)]
pub struct PidAgent {
    pid: PidController,
}

impl PidAgent {
    pub fn new(gains: PidGains) -> Result<Self> {
        Ok(Self { pid: PidController::new(gains)? })
    }
}

impl Controller for PidAgent {
    fn name(&self) -> String {
        "pid".into()
    }

    fn reset(&mut self) {
        self.pid.reset();
    }

    fn act(&mut self, env: &AuvEnv, _obs: &Observation) -> Result<Action> {
        self.pid.control(env.state(), env.goal(), env.config().episode.dt, env.layout())
    }
}

/// One logged control step. Sample 0 is the start state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryPoint {
    pub t: f64,
    /// `[x, y, z, roll, pitch, heading]`
    pub pose: [f64; 6],
    /// Body twist `[u, v, w, p, q, r]` after the step.
    pub twist: [f64; 6],
    /// Thruster commands applied during the step; zero for sample 0.
    pub action: [f64; ACTION_DIM],
    /// `[e_x, e_y, e_z, theta]`
    pub error: [f64; 4],
    /// Position, attitude, smoothness and usage reward terms.
    pub components: [f64; 4],
    pub power: f64,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub metrics: EpisodeMetrics,
    /// Empty unless requested.
    pub trajectory: Vec<TrajectoryPoint>,
}

fn pose_row(p: &Pose) -> [f64; 6] {
    let (r, pi, h) = rotation_to_rpy(&p.rotation);
    [p.position.x, p.position.y, p.position.z, r, pi, h]
}

fn error_row(p: &Pose, goal: &Pose) -> Result<[f64; 4]> {
    let e = position_error(&p.position, &goal.position);
    let a = attitude_error(&p.rotation, &goal.rotation)?;
    Ok([e.x, e.y, e.z, a.norm()])
}

/// Runs one full episode from `start` at rest.
pub fn run_episode(env: &mut AuvEnv, controller: &mut dyn Controller, start: &Pose, band: &SettlingBand, record: bool) -> Result<EpisodeRecord> {
    controller.reset();
    let mut obs = env.reset_to(*start)?;
    let goal = *env.goal();
    let dt = env.config().episode.dt;
    let n = env.config().episode.max_steps as usize;

    let mut errors = Vec::with_capacity(n + 1);
    errors.push(error_row(start, &goal)?);
    let mut powers = Vec::with_capacity(n);
    let mut total_reward = 0.0;
    let mut trajectory = Vec::new();
    if record {
        trajectory.push(TrajectoryPoint {
            t: 0.0,
            pose: pose_row(start),
            twist: [0.0; 6],
            action: [0.0; ACTION_DIM],
            error: errors[0],
            components: [0.0; 4],
            power: 0.0,
            reward: 0.0,
        });
    }
    loop {
        let action = controller.act(env, &obs)?;
        let step = env.step(&action)?;
        let i = step.info;
        let e = [i.position_error.x, i.position_error.y, i.position_error.z, i.theta];
        errors.push(e);
        powers.push(i.power);
        total_reward += step.reward;
        if record {
            let t = errors.len() as f64 * dt - dt;
            let state = env.state();
            trajectory.push(TrajectoryPoint {
                t,
                pose: pose_row(&state.pose),
                twist: state.twist.into(),
                action: i.action.0,
                error: e,
                components: i.components.as_array(),
                power: i.power,
                reward: step.reward,
            });
        }
        obs = step.observation;
        if step.done {
            break;
        }
    }

    let post = &errors[1..];
    let col = |k: usize| -> Vec<f64> { post.iter().map(|e| e[k]).collect() };
    let (mean_power, energy) = episode_energy(&powers, dt)?;
    let last = errors[errors.len() - 1];
    let metrics = EpisodeMetrics {
        rmse_x: rmse(&col(0))?,
        rmse_y: rmse(&col(1))?,
        rmse_z: rmse(&col(2))?,
        rmse_theta: rmse(&col(3))?,
        settling_time: settling_time(&errors, dt, band)?,
        mean_power,
        energy,
        final_x: last[0],
        final_y: last[1],
        final_z: last[2],
        final_theta: last[3],
        total_reward,
    };
    Ok(EpisodeRecord { metrics, trajectory })
}

/// Outcome of one grid episode; failures are kept, not aggregated.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub start: GridStart,
    pub result: core::result::Result<EpisodeMetrics, Error>,
}

/// Evaluates `controller` on every start, in order.
pub fn evaluate(env: &mut AuvEnv, controller: &mut dyn Controller, starts: &[GridStart], band: &SettlingBand) -> Vec<EvalOutcome> {
    starts
        .iter()
        .map(|s| EvalOutcome { start: *s, result: run_episode(env, controller, &s.pose(), band, false).map(|r| r.metrics) })
        .collect()
}
