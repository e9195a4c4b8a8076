//! Learning agents, the replay buffer and the cascaded PID baseline.

mod buffer;
mod pid;
#[cfg(feature = "comparators")]
mod sac;
#[cfg(feature = "comparators")]
mod td3;
mod tqc;

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use crate::env::{Action, Observation, ACTION_DIM, OBS_DIM};
use crate::neural::{squashed_backward, squashed_sample, Mlp, SquashedSample};
use crate::{invalid, Error, Result, SimRng};

pub use buffer::{Batch, ReplayBuffer, Transition};
pub use pid::{AxisGains, PidController, PidGains};
#[cfg(feature = "comparators")]
pub use sac::{SacAgent, SacConfig};
#[cfg(feature = "comparators")]
pub use td3::{Td3Agent, Td3Config};
pub use tqc::{truncate_pooled_quantiles, EntropyCoef, TqcAgent, TqcConfig};

/// Input width of every critic: observation followed by action.
pub const CRITIC_INPUT_DIM: usize = OBS_DIM + ACTION_DIM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Algo {
    Tqc,
    Sac,
    Td3,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Tqc => "tqc",
            Algo::Sac => "sac",
            Algo::Td3 => "td3",
        }
    }
}

impl core::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tqc" => Ok(Algo::Tqc),
            "sac" => Ok(Algo::Sac),
            "td3" => Ok(Algo::Td3),
            other => Err(invalid(alloc::format!("unknown algorithm '{other}' (expected tqc, sac or td3)"))),
        }
    }
}

impl core::fmt::Display for Algo {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// How an actor network's output is turned into an action.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PolicyKind {
    /// Output is `[mean; log_std]`, squashed through tanh.
    SquashedGaussian,
    /// Output is already in `[-1, 1]`; stochastic mode adds clipped
    /// Gaussian noise of standard deviation `exploration_noise`.
    Deterministic { exploration_noise: f64 },
}

/// Read-only actor snapshot. Cheap to clone and safe to share across
/// evaluation workers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Policy {
    pub kind: PolicyKind,
    pub actor: Mlp,
}

impl Policy {
    pub fn new(kind: PolicyKind, actor: Mlp) -> Result<Self> {
        let out = match kind {
            PolicyKind::SquashedGaussian => 2 * ACTION_DIM,
            PolicyKind::Deterministic { exploration_noise } => {
                if !(exploration_noise >= 0.0 && exploration_noise.is_finite()) {
                    return Err(invalid("exploration noise must be finite and non-negative"));
                }
                ACTION_DIM
            }
        };
        if actor.input_dim() != OBS_DIM {
            return Err(Error::DimensionMismatch { expected: OBS_DIM, got: actor.input_dim() });
        }
        if actor.output_dim() != out {
            return Err(Error::DimensionMismatch { expected: out, got: actor.output_dim() });
        }
        Ok(Self { kind, actor })
    }

    /// Maps an observation to an action in `[-1, 1]^8`.
    pub fn act(&self, obs: &Observation, deterministic: bool, rng: &mut SimRng) -> Result<Action> {
        let out = self.actor.forward(obs.as_slice())?;
        let mut a = [0.0; ACTION_DIM];
        match self.kind {
            PolicyKind::SquashedGaussian => {
                for j in 0..ACTION_DIM {
                    a[j] = if deterministic {
                        libm::tanh(out[j])
                    } else {
                        let eps: f64 = StandardNormal.sample(rng);
                        squashed_sample(out[j], out[ACTION_DIM + j], eps).action
                    };
                }
            }
            PolicyKind::Deterministic { exploration_noise } => {
                for j in 0..ACTION_DIM {
                    a[j] = out[j];
                    if !deterministic && exploration_noise > 0.0 {
                        let n: f64 = StandardNormal.sample(rng);
                        a[j] += exploration_noise * n;
                    }
                    a[j] = a[j].clamp(-1.0, 1.0);
                }
            }
        }
        if !a.iter().all(|v| v.is_finite()) {
            return Err(Error::TrainingDiverged { what: "actor output".into() });
        }
        Ok(Action(a))
    }
}

/// Diagnostics of one gradient update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UpdateStats {
    pub critic_loss: f64,
    /// `None` when the actor was not updated on this call.
    pub actor_loss: Option<f64>,
    pub alpha: f64,
    pub alpha_loss: Option<f64>,
}

/// Common surface of the off-policy learners.
pub trait Agent {
    fn algo(&self) -> Algo;
    fn act(&self, obs: &Observation, deterministic: bool, rng: &mut SimRng) -> Result<Action>;
    /// One gradient step on a minibatch drawn from `buffer`.
    fn update(&mut self, buffer: &ReplayBuffer, rng: &mut SimRng) -> Result<UpdateStats>;
    /// One gradient step on a given minibatch.
    fn update_batch(&mut self, batch: &Batch, rng: &mut SimRng) -> Result<UpdateStats>;
    fn policy(&self) -> Policy;
    fn batch_size(&self) -> usize;
    fn warmup_steps(&self) -> u64;
    fn buffer_capacity(&self) -> usize;
}

/// Agent construction parameters for any supported algorithm.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "algo", rename_all = "lowercase"))]
pub enum AgentConfig {
    Tqc(TqcConfig),
    #[cfg(feature = "comparators")]
    Sac(SacConfig),
    #[cfg(feature = "comparators")]
    Td3(Td3Config),
}

impl AgentConfig {
    /// Defaults for `algo`.
    pub fn default_for(algo: Algo) -> Result<Self> {
        match algo {
            Algo::Tqc => Ok(AgentConfig::Tqc(TqcConfig::default())),
            #[cfg(feature = "comparators")]
            Algo::Sac => Ok(AgentConfig::Sac(SacConfig::default())),
            #[cfg(feature = "comparators")]
            Algo::Td3 => Ok(AgentConfig::Td3(Td3Config::default())),
            #[allow(unreachable_patterns)]
            other => Err(invalid(alloc::format!("{other} support was not compiled in"))),
        }
    }

    pub fn algo(&self) -> Algo {
        match self {
            AgentConfig::Tqc(_) => Algo::Tqc,
            #[cfg(feature = "comparators")]
            AgentConfig::Sac(_) => Algo::Sac,
            #[cfg(feature = "comparators")]
            AgentConfig::Td3(_) => Algo::Td3,
        }
    }

    pub fn build(&self, rng: &mut SimRng) -> Result<Box<dyn Agent>> {
        Ok(match self {
            AgentConfig::Tqc(c) => Box::new(TqcAgent::new(c.clone(), rng)?),
            #[cfg(feature = "comparators")]
            AgentConfig::Sac(c) => Box::new(SacAgent::new(c.clone(), rng)?),
            #[cfg(feature = "comparators")]
            AgentConfig::Td3(c) => Box::new(Td3Agent::new(c.clone(), rng)?),
        })
    }
}

/// Hyperparameters shared by every learner.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct LearnerConfig {
    pub gamma: f64,
    pub tau: f64,
    pub batch_size: usize,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub buffer_capacity: usize,
    pub warmup_steps: u64,
    pub hidden: Vec<usize>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            tau: 0.005,
            batch_size: 256,
            actor_lr: 3e-4,
            critic_lr: 3e-4,
            buffer_capacity: 1_000_000,
            warmup_steps: 10_000,
            hidden: vec![256, 256],
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(invalid("discount must lie in [0, 1)"));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(invalid("polyak coefficient must lie in (0, 1]"));
        }
        if self.batch_size == 0 || self.buffer_capacity == 0 {
            return Err(invalid("batch size and buffer capacity must be positive"));
        }
        if !(self.actor_lr > 0.0 && self.critic_lr > 0.0) || !self.actor_lr.is_finite() || !self.critic_lr.is_finite() {
            return Err(invalid("learning rates must be positive and finite"));
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(invalid("hidden layer sizes must be non-empty and positive"));
        }
        Ok(())
    }

    pub(crate) fn layer_sizes(&self, input: usize, output: usize) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.hidden.len() + 2);
        s.push(input);
        s.extend_from_slice(&self.hidden);
        s.push(output);
        s
    }
}

/// Rows of `[obs | action]` for a critic batch.
pub(crate) fn critic_input(obs: &[f64], actions: &[f64], batch: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(batch * CRITIC_INPUT_DIM);
    for i in 0..batch {
        x.extend_from_slice(&obs[i * OBS_DIM..(i + 1) * OBS_DIM]);
        x.extend_from_slice(&actions[i * ACTION_DIM..(i + 1) * ACTION_DIM]);
    }
    x
}

/// Adds the action columns of a critic input gradient into `acc`.
pub(crate) fn accumulate_action_grad(dx: &[f64], acc: &mut [f64]) {
    for (row, out) in dx.chunks_exact(CRITIC_INPUT_DIM).zip(acc.chunks_exact_mut(ACTION_DIM)) {
        for (o, g) in out.iter_mut().zip(&row[OBS_DIM..]) {
            *o += g;
        }
    }
}

/// Reparameterised batch of squashed-Gaussian actions.
pub(crate) struct SampledActions {
    pub actions: Vec<f64>,
    /// Summed over action dimensions, one per row.
    pub log_probs: Vec<f64>,
    samples: Vec<SquashedSample>,
}

pub(crate) fn sample_squashed(head: &[f64], batch: usize, rng: &mut SimRng) -> SampledActions {
    let mut actions = Vec::with_capacity(batch * ACTION_DIM);
    let mut log_probs = Vec::with_capacity(batch);
    let mut samples = Vec::with_capacity(batch * ACTION_DIM);
    for row in head.chunks_exact(2 * ACTION_DIM).take(batch) {
        let mut lp = 0.0;
        for j in 0..ACTION_DIM {
            let eps: f64 = StandardNormal.sample(rng);
            let s = squashed_sample(row[j], row[ACTION_DIM + j], eps);
            actions.push(s.action);
            lp += s.log_prob;
            samples.push(s);
        }
        log_probs.push(lp);
    }
    SampledActions { actions, log_probs, samples }
}

impl SampledActions {
    /// Gradient with respect to the actor head `[mean; log_std]` given
    /// per-element action gradients and per-row log-probability gradients.
    pub fn head_gradient(&self, grad_actions: &[f64], grad_log_probs: &[f64]) -> Vec<f64> {
        let batch = self.log_probs.len();
        let mut up = vec![0.0; batch * 2 * ACTION_DIM];
        for i in 0..batch {
            for j in 0..ACTION_DIM {
                let k = i * ACTION_DIM + j;
                let (gm, gs) = squashed_backward(&self.samples[k], grad_actions[k], grad_log_probs[i]);
                up[i * 2 * ACTION_DIM + j] = gm;
                up[i * 2 * ACTION_DIM + ACTION_DIM + j] = gs;
            }
        }
        up
    }
}

pub(crate) fn ensure_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::TrainingDiverged { what: what.into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::Activation;
    use rand::SeedableRng;

    fn zero_actor(out: usize, bias: f64) -> Mlp {
        let sizes = vec![OBS_DIM, out];
        let mut p = vec![0.0; OBS_DIM * out + out];
        for b in &mut p[OBS_DIM * out..] {
            *b = bias;
        }
        Mlp::from_params(sizes, vec![Activation::Identity], p).unwrap()
    }

    #[test]
    fn zero_weight_actor_outputs_tanh_of_bias() {
        let policy = Policy::new(PolicyKind::SquashedGaussian, zero_actor(2 * ACTION_DIM, 0.4)).unwrap();
        let mut rng = SimRng::seed_from_u64(1);
        let obs = Observation([0.3; OBS_DIM]);
        let a = policy.act(&obs, true, &mut rng).unwrap();
        assert!(a.0.iter().all(|&v| v == libm::tanh(0.4)));
        assert_eq!(a, policy.act(&obs, true, &mut rng).unwrap());
    }

    #[test]
    fn stochastic_mean_tracks_deterministic_action() {
        // log_std = -3 keeps the tanh nearly linear around the mean.
        let sizes = vec![OBS_DIM, 2 * ACTION_DIM];
        let mut p = vec![0.0; OBS_DIM * 2 * ACTION_DIM + 2 * ACTION_DIM];
        let off = OBS_DIM * 2 * ACTION_DIM;
        for j in 0..ACTION_DIM {
            p[off + j] = 0.1 * j as f64 - 0.35;
            p[off + ACTION_DIM + j] = -3.0;
        }
        let actor = Mlp::from_params(sizes, vec![Activation::Identity], p).unwrap();
        let policy = Policy::new(PolicyKind::SquashedGaussian, actor).unwrap();
        let obs = Observation::default();
        let mut rng = SimRng::seed_from_u64(5);
        let det = policy.act(&obs, true, &mut rng).unwrap();
        let n = 10_000;
        let mut sum = [0.0; ACTION_DIM];
        let mut sq = [0.0; ACTION_DIM];
        for _ in 0..n {
            let a = policy.act(&obs, false, &mut rng).unwrap();
            assert!(a.in_bounds());
            for j in 0..ACTION_DIM {
                sum[j] += a[j];
                sq[j] += a[j] * a[j];
            }
        }
        for j in 0..ACTION_DIM {
            let mean = sum[j] / n as f64;
            let var = sq[j] / n as f64 - mean * mean;
            let se = libm::sqrt(var / n as f64);
            // tanh curvature shifts the mean by O(sigma^2); allow for it.
            let bias = libm::exp(-6.0);
            assert!((mean - det[j]).abs() <= 3.0 * se + bias, "dim {j}: {mean} vs {}", det[j]);
        }
    }

    #[test]
    fn deterministic_policy_clips_noise() {
        let policy = Policy::new(PolicyKind::Deterministic { exploration_noise: 5.0 }, zero_actor(ACTION_DIM, 0.9)).unwrap();
        let mut rng = SimRng::seed_from_u64(2);
        for _ in 0..100 {
            assert!(policy.act(&Observation::default(), false, &mut rng).unwrap().in_bounds());
        }
        assert!(Policy::new(PolicyKind::SquashedGaussian, zero_actor(ACTION_DIM, 0.0)).is_err());
    }

    #[test]
    fn algo_names_round_trip() {
        for a in [Algo::Tqc, Algo::Sac, Algo::Td3] {
            assert_eq!(a.name().parse::<Algo>().unwrap(), a);
        }
        assert!("ppo".parse::<Algo>().is_err());
    }
}
