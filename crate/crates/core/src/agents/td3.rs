use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, Normal};

use super::{
    accumulate_action_grad, critic_input, ensure_finite, Agent, Algo, Batch, LearnerConfig, Policy, PolicyKind, ReplayBuffer,
    UpdateStats, CRITIC_INPUT_DIM,
};
use crate::env::{Action, Observation, ACTION_DIM, OBS_DIM};
use crate::neural::{adam_step, polyak_blend, Activation, AdamState, Mlp};
use crate::{invalid, Result, SimRng};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Td3Config {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub learner: LearnerConfig,
    pub policy_delay: u64,
    pub target_noise: f64,
    pub target_noise_clip: f64,
    pub exploration_noise: f64,
}

impl Default for Td3Config {
    fn default() -> Self {
        Self { learner: LearnerConfig::default(), policy_delay: 2, target_noise: 0.2, target_noise_clip: 0.5, exploration_noise: 0.1 }
    }
}

impl Td3Config {
    pub fn validate(&self) -> Result<()> {
        self.learner.validate()?;
        if self.policy_delay == 0 {
            return Err(invalid("policy delay must be at least 1"));
        }
        for v in [self.target_noise, self.target_noise_clip, self.exploration_noise] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid("noise settings must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

/// Twin-delayed deterministic policy gradient.
#[derive(Debug, Clone)]
pub struct Td3Agent {
    cfg: Td3Config,
    actor: Mlp,
    actor_target: Mlp,
    actor_opt: AdamState,
    critics: [Mlp; 2],
    targets: [Mlp; 2],
    critic_opts: [AdamState; 2],
    updates: u64,
}

impl Td3Agent {
    pub fn new(cfg: Td3Config, rng: &mut SimRng) -> Result<Self> {
        cfg.validate()?;
        let l = &cfg.learner;
        let actor = Mlp::new(&l.layer_sizes(OBS_DIM, ACTION_DIM), Activation::Relu, Activation::Tanh, rng)?;
        let sizes = l.layer_sizes(CRITIC_INPUT_DIM, 1);
        let critics = [Mlp::new(&sizes, Activation::Relu, Activation::Identity, rng)?, Mlp::new(&sizes, Activation::Relu, Activation::Identity, rng)?];
        Ok(Self {
            actor_opt: AdamState::new(actor.param_count(), l.actor_lr),
            actor_target: actor.clone(),
            critic_opts: [AdamState::new(critics[0].param_count(), l.critic_lr), AdamState::new(critics[1].param_count(), l.critic_lr)],
            targets: critics.clone(),
            critics,
            actor,
            updates: 0,
            cfg,
        })
    }

    pub fn actor(&self) -> &Mlp {
        &self.actor
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }
}

impl Agent for Td3Agent {
    fn algo(&self) -> Algo {
        Algo::Td3
    }

    fn act(&self, obs: &Observation, deterministic: bool, rng: &mut SimRng) -> Result<Action> {
        self.policy().act(obs, deterministic, rng)
    }

    fn update(&mut self, buffer: &ReplayBuffer, rng: &mut SimRng) -> Result<UpdateStats> {
        let batch = buffer.sample(self.cfg.learner.batch_size, rng)?;
        self.update_batch(&batch, rng)
    }

    fn update_batch(&mut self, batch: &Batch, rng: &mut SimRng) -> Result<UpdateStats> {
        let b = batch.size;
        if b == 0 {
            return Err(invalid("empty minibatch"));
        }
        self.updates += 1;
        let gamma = self.cfg.learner.gamma;

        // Target policy smoothing.
        let noise = Normal::new(0.0, self.cfg.target_noise).map_err(|_| invalid("invalid target noise"))?;
        let clip = self.cfg.target_noise_clip;
        let next = self.actor_target.forward_batch(&batch.next_obs, b)?;
        let next_actions: Vec<f64> = next.output().iter().map(|a| (a + noise.sample(rng).clamp(-clip, clip)).clamp(-1.0, 1.0)).collect();
        let xn = critic_input(&batch.next_obs, &next_actions, b);
        let q1n = self.targets[0].forward_batch(&xn, b)?;
        let q2n = self.targets[1].forward_batch(&xn, b)?;
        let y: Vec<f64> =
            (0..b).map(|i| batch.rewards[i] + gamma * (1.0 - batch.dones[i]) * q1n.output()[i].min(q2n.output()[i])).collect();

        let x = critic_input(&batch.obs, &batch.actions, b);
        let mut critic_loss = 0.0;
        for c in 0..2 {
            let cache = self.critics[c].forward_batch(&x, b)?;
            let mut upstream = vec![0.0; b];
            for i in 0..b {
                let e = cache.output()[i] - y[i];
                critic_loss += 0.5 * e * e / b as f64;
                upstream[i] = e / b as f64;
            }
            let mut grads = self.critics[c].zero_grads();
            self.critics[c].backward(&cache, &upstream, &mut grads)?;
            adam_step(self.critics[c].params_mut(), &grads, &mut self.critic_opts[c], "critic")?;
        }
        ensure_finite(critic_loss, "critic loss")?;

        let mut actor_loss = None;
        if self.updates.is_multiple_of(self.cfg.policy_delay) {
            let actor_cache = self.actor.forward_batch(&batch.obs, b)?;
            let xa = critic_input(&batch.obs, actor_cache.output(), b);
            let qc = self.critics[0].forward_batch(&xa, b)?;
            let loss = -qc.output().iter().sum::<f64>() / b as f64;
            actor_loss = Some(ensure_finite(loss, "actor loss")?);
            let dx = self.critics[0].input_gradient(&qc, &vec![-1.0 / b as f64; b])?;
            let mut grad_actions = vec![0.0; b * ACTION_DIM];
            accumulate_action_grad(&dx, &mut grad_actions);
            let mut grads = self.actor.zero_grads();
            self.actor.backward(&actor_cache, &grad_actions, &mut grads)?;
            adam_step(self.actor.params_mut(), &grads, &mut self.actor_opt, "actor")?;

            let tau = self.cfg.learner.tau;
            for (t, c) in self.targets.iter_mut().zip(&self.critics) {
                polyak_blend(t.params_mut(), c.params(), tau)?;
            }
            polyak_blend(self.actor_target.params_mut(), self.actor.params(), tau)?;
        }
        Ok(UpdateStats { critic_loss, actor_loss, alpha: 0.0, alpha_loss: None })
    }

    fn policy(&self) -> Policy {
        Policy { kind: PolicyKind::Deterministic { exploration_noise: self.cfg.exploration_noise }, actor: self.actor.clone() }
    }

    fn batch_size(&self) -> usize {
        self.cfg.learner.batch_size
    }

    fn warmup_steps(&self) -> u64 {
        self.cfg.learner.warmup_steps
    }

    fn buffer_capacity(&self) -> usize {
        self.cfg.learner.buffer_capacity
    }
}
