use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};

use crate::agents::{AgentConfig, Policy, ReplayBuffer, Transition};
use crate::env::{Action, AuvEnv, ACTION_DIM};
use crate::{Error, Result, SimRng};

/// Per-episode total rewards and their trailing moving average.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RewardCurve {
    pub rewards: Vec<f64>,
}

impl RewardCurve {
    pub const WINDOW: usize = 100;

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    /// Entry `k` is the mean of episodes `k ..= k + window - 1`, so the
    /// output has `max(0, len - window + 1)` entries.
    pub fn moving_average(&self, window: usize) -> Vec<f64> {
        if window == 0 || self.rewards.len() < window {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(self.rewards.len() + 1 - window);
        let mut sum: f64 = self.rewards[..window].iter().sum();
        out.push(sum / window as f64);
        for k in window..self.rewards.len() {
            sum += self.rewards[k] - self.rewards[k - window];
            out.push(sum / window as f64);
        }
        out
    }

    /// Mean of the first `n` episodes.
    pub fn head_mean(&self, n: usize) -> Option<f64> {
        (n > 0 && self.rewards.len() >= n).then(|| self.rewards[..n].iter().sum::<f64>() / n as f64)
    }

    /// Mean of the last `n` episodes.
    pub fn tail_mean(&self, n: usize) -> Option<f64> {
        let len = self.rewards.len();
        (n > 0 && len >= n).then(|| self.rewards[len - n..].iter().sum::<f64>() / n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub steps: u64,
    pub seed: u64,
    /// Emit a checkpoint event every this many environment steps.
    pub checkpoint_every: Option<u64>,
}

/// Progress notifications.
#[derive(Debug)]
pub enum TrainEvent<'a> {
    EpisodeEnd { episode: usize, step: u64, reward: f64, length: u32 },
    Checkpoint { step: u64, policy: &'a Policy },
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub policy: Policy,
    pub curve: RewardCurve,
    pub updates: u64,
}

/// A run that stopped early. `last_good` is the most recent checkpointed
/// policy (the initial one if none was taken).
#[derive(Debug, Clone)]
pub struct TrainFailure {
    pub error: Error,
    pub at_step: u64,
    pub last_good: Policy,
    pub curve: RewardCurve,
}

impl core::fmt::Display for TrainFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "training stopped at step {}: {}", self.at_step, self.error)
    }
}

/// Independent generator for one role of a run.
fn stream(seed: u64, id: u64) -> SimRng {
    let mut r = SimRng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

/// Off-policy rollout/update loop.
///
/// Random uniform actions are used for the first `warmup_steps` steps, after
/// which every step performs one gradient update. Step-limit truncation does
/// not mark a transition terminal.
pub fn train(
    env: &mut AuvEnv,
    agent_cfg: &AgentConfig,
    cfg: &TrainConfig,
    observer: &mut dyn FnMut(TrainEvent<'_>) -> Result<()>,
) -> core::result::Result<TrainOutcome, Box<TrainFailure>> {
    let mut init_rng = stream(cfg.seed, 0);
    let mut agent = agent_cfg.build(&mut init_rng).map_err(|e| {
        Box::new(TrainFailure { error: e, at_step: 0, last_good: placeholder_policy(), curve: RewardCurve::default() })
    })?;
    let mut last_good = agent.policy();
    let mut curve = RewardCurve::default();
    let fail = |error: Error, at_step: u64, last_good: &Policy, curve: &RewardCurve| {
        Box::new(TrainFailure { error, at_step, last_good: last_good.clone(), curve: curve.clone() })
    };

    let mut run = || -> core::result::Result<u64, (Error, u64)> {
        let mut env_rng = stream(cfg.seed, 1);
        let mut act_rng = stream(cfg.seed, 2);
        let mut learn_rng = stream(cfg.seed, 3);
        let mut buffer = ReplayBuffer::new(agent.buffer_capacity()).map_err(|e| (e, 0))?;
        let mut updates = 0;
        if cfg.steps == 0 {
            return Ok(0);
        }
        let mut obs = env.reset(env_rng.next_u64()).map_err(|e| (e, 0))?;
        let mut ep_reward = 0.0;
        for step in 0..cfg.steps {
            let action = if step < agent.warmup_steps() {
                Action(core::array::from_fn::<f64, ACTION_DIM, _>(|_| act_rng.gen_range(-1.0..=1.0)))
            } else {
                agent.act(&obs, false, &mut act_rng).map_err(|e| (e, step))?
            };
            let s = env.step(&action).map_err(|e| (e, step))?;
            buffer.push(Transition { obs, action: s.info.action, reward: s.reward, next_obs: s.observation, done: s.info.terminal });
            ep_reward += s.reward;
            obs = s.observation;

            if step >= agent.warmup_steps() && buffer.len() >= agent.batch_size() {
                agent.update(&buffer, &mut learn_rng).map_err(|e| (e, step))?;
                updates += 1;
            }
            if s.done {
                curve.rewards.push(ep_reward);
                observer(TrainEvent::EpisodeEnd { episode: curve.len(), step: step + 1, reward: ep_reward, length: env.steps() })
                    .map_err(|e| (e, step))?;
                ep_reward = 0.0;
                obs = env.reset(env_rng.next_u64()).map_err(|e| (e, step))?;
            }
            if let Some(every) = cfg.checkpoint_every {
                if every > 0 && (step + 1) % every == 0 {
                    last_good = agent.policy();
                    observer(TrainEvent::Checkpoint { step: step + 1, policy: &last_good }).map_err(|e| (e, step))?;
                }
            }
        }
        Ok(updates)
    };
    match run() {
        Ok(updates) => Ok(TrainOutcome { policy: agent.policy(), curve, updates }),
        Err((e, step)) => Err(fail(e, step, &last_good, &curve)),
    }
}

fn placeholder_policy() -> Policy {
    use crate::agents::PolicyKind;
    use crate::env::OBS_DIM;
    use crate::neural::{Activation, Mlp};
    let sizes = alloc::vec![OBS_DIM, 2 * ACTION_DIM];
    let params = alloc::vec![0.0; OBS_DIM * 2 * ACTION_DIM + 2 * ACTION_DIM];
    Policy { kind: PolicyKind::SquashedGaussian, actor: Mlp::from_params(sizes, alloc::vec![Activation::Identity], params).expect("static shape") }
}

/// Trains every configuration under the same seed and environment settings.
pub fn compare(
    make_env: &dyn Fn() -> Result<AuvEnv>,
    configs: &[AgentConfig],
    cfg: &TrainConfig,
) -> Vec<core::result::Result<RewardCurve, Box<TrainFailure>>> {
    configs
        .iter()
        .map(|c| {
            let mut env = make_env().map_err(|e| {
                Box::new(TrainFailure { error: e, at_step: 0, last_good: placeholder_policy(), curve: RewardCurve::default() })
            })?;
            train(&mut env, c, cfg, &mut |_| Ok(())).map(|o| o.curve)
        })
        .collect()
}
