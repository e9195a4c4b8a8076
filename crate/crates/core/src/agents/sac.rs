use alloc::vec;
use alloc::vec::Vec;

use super::{
    accumulate_action_grad, critic_input, ensure_finite, sample_squashed, Agent, Algo, Batch, EntropyCoef, LearnerConfig, Policy,
    PolicyKind, ReplayBuffer, UpdateStats, CRITIC_INPUT_DIM,
};
use crate::env::{Action, Observation, ACTION_DIM, OBS_DIM};
use crate::neural::{adam_step, polyak_blend, Activation, AdamState, Mlp};
use crate::{invalid, Result, SimRng};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SacConfig {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub learner: LearnerConfig,
    pub target_entropy: f64,
    pub entropy: EntropyCoef,
}

impl Default for SacConfig {
    fn default() -> Self {
        Self {
            learner: LearnerConfig::default(),
            target_entropy: -(ACTION_DIM as f64),
            entropy: EntropyCoef::Auto { initial: 1.0, lr: 3e-4 },
        }
    }
}

impl SacConfig {
    pub fn validate(&self) -> Result<()> {
        self.learner.validate()?;
        if !self.target_entropy.is_finite() {
            return Err(invalid("entropy target must be finite"));
        }
        match self.entropy {
            EntropyCoef::Auto { initial, lr } if !(initial > 0.0 && lr > 0.0) => Err(invalid("entropy coefficient settings must be positive")),
            EntropyCoef::Fixed { value } if !(value >= 0.0 && value.is_finite()) => Err(invalid("fixed entropy coefficient must be non-negative")),
            _ => Ok(()),
        }
    }
}

/// Soft actor-critic with twin clipped critics.
#[derive(Debug, Clone)]
pub struct SacAgent {
    cfg: SacConfig,
    actor: Mlp,
    actor_opt: AdamState,
    critics: [Mlp; 2],
    targets: [Mlp; 2],
    critic_opts: [AdamState; 2],
    log_alpha: f64,
    alpha_opt: Option<AdamState>,
}

impl SacAgent {
    pub fn new(cfg: SacConfig, rng: &mut SimRng) -> Result<Self> {
        cfg.validate()?;
        let l = &cfg.learner;
        let actor = Mlp::new(&l.layer_sizes(OBS_DIM, 2 * ACTION_DIM), Activation::Relu, Activation::Identity, rng)?;
        let sizes = l.layer_sizes(CRITIC_INPUT_DIM, 1);
        let critics = [Mlp::new(&sizes, Activation::Relu, Activation::Identity, rng)?, Mlp::new(&sizes, Activation::Relu, Activation::Identity, rng)?];
        let (log_alpha, alpha_opt) = match cfg.entropy {
            EntropyCoef::Auto { initial, lr } => (libm::log(initial), Some(AdamState::new(1, lr))),
            EntropyCoef::Fixed { value } => (if value > 0.0 { libm::log(value) } else { f64::NEG_INFINITY }, None),
        };
        Ok(Self {
            actor_opt: AdamState::new(actor.param_count(), l.actor_lr),
            critic_opts: [AdamState::new(critics[0].param_count(), l.critic_lr), AdamState::new(critics[1].param_count(), l.critic_lr)],
            targets: critics.clone(),
            critics,
            actor,
            log_alpha,
            alpha_opt,
            cfg,
        })
    }

    pub fn alpha(&self) -> f64 {
        match self.cfg.entropy {
            EntropyCoef::Fixed { value } => value,
            EntropyCoef::Auto { .. } => libm::exp(self.log_alpha),
        }
    }

    /// Online twin values at one state-action pair.
    pub fn q_values(&self, obs: &Observation, action: &Action) -> Result<[f64; 2]> {
        let x = critic_input(obs.as_slice(), action.as_slice(), 1);
        Ok([self.critics[0].forward(&x)?[0], self.critics[1].forward(&x)?[0]])
    }
}

impl Agent for SacAgent {
    fn algo(&self) -> Algo {
        Algo::Sac
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
        let gamma = self.cfg.learner.gamma;

        let actor_cache = self.actor.forward_batch(&batch.obs, b)?;
        let pi = sample_squashed(actor_cache.output(), b, rng);

        let alpha = self.alpha();
        let mut alpha_loss = None;
        if let Some(opt) = self.alpha_opt.as_mut() {
            let mean_term = pi.log_probs.iter().map(|lp| lp + self.cfg.target_entropy).sum::<f64>() / b as f64;
            alpha_loss = Some(ensure_finite(-self.log_alpha * mean_term, "entropy coefficient loss")?);
            let mut la = [self.log_alpha];
            adam_step(&mut la, &[-mean_term], opt, "entropy coefficient")?;
            self.log_alpha = la[0];
        }

        let next_head = self.actor.forward_batch(&batch.next_obs, b)?;
        let next = sample_squashed(next_head.output(), b, rng);
        let xn = critic_input(&batch.next_obs, &next.actions, b);
        let q1n = self.targets[0].forward_batch(&xn, b)?;
        let q2n = self.targets[1].forward_batch(&xn, b)?;
        let y: Vec<f64> = (0..b)
            .map(|i| {
                let q = q1n.output()[i].min(q2n.output()[i]);
                let entropy = if alpha > 0.0 { alpha * next.log_probs[i] } else { 0.0 };
                batch.rewards[i] + gamma * (1.0 - batch.dones[i]) * (q - entropy)
            })
            .collect();

        // Sum of the two critics' halved mean-squared errors.
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

        // Actor: alpha * log pi - min(Q1, Q2), gradient routed through the
        // smaller critic per sample.
        let xa = critic_input(&batch.obs, &pi.actions, b);
        let c1 = self.critics[0].forward_batch(&xa, b)?;
        let c2 = self.critics[1].forward_batch(&xa, b)?;
        let mut up1 = vec![0.0; b];
        let mut up2 = vec![0.0; b];
        let mut q_mean = 0.0;
        for i in 0..b {
            let (q1, q2) = (c1.output()[i], c2.output()[i]);
            if q1 <= q2 {
                up1[i] = -1.0 / b as f64;
            } else {
                up2[i] = -1.0 / b as f64;
            }
            q_mean += q1.min(q2) / b as f64;
        }
        let mut grad_actions = vec![0.0; b * ACTION_DIM];
        accumulate_action_grad(&self.critics[0].input_gradient(&c1, &up1)?, &mut grad_actions);
        accumulate_action_grad(&self.critics[1].input_gradient(&c2, &up2)?, &mut grad_actions);
        let mean_logp = pi.log_probs.iter().sum::<f64>() / b as f64;
        let actor_loss = ensure_finite(alpha * mean_logp - q_mean, "actor loss")?;
        let head_grad = pi.head_gradient(&grad_actions, &vec![alpha / b as f64; b]);
        let mut grads = self.actor.zero_grads();
        self.actor.backward(&actor_cache, &head_grad, &mut grads)?;
        adam_step(self.actor.params_mut(), &grads, &mut self.actor_opt, "actor")?;

        for (t, c) in self.targets.iter_mut().zip(&self.critics) {
            polyak_blend(t.params_mut(), c.params(), self.cfg.learner.tau)?;
        }
        Ok(UpdateStats { critic_loss, actor_loss: Some(actor_loss), alpha, alpha_loss })
    }

    fn policy(&self) -> Policy {
        Policy { kind: PolicyKind::SquashedGaussian, actor: self.actor.clone() }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::Transition;
    use rand::{Rng, SeedableRng};

    #[test]
    fn critic_converges_to_reward_on_frozen_batch() {
        let mut rng = SimRng::seed_from_u64(13);
        let cfg = SacConfig {
            learner: LearnerConfig { hidden: vec![16, 16], gamma: 0.0, critic_lr: 3e-3, batch_size: 4, ..LearnerConfig::default() },
            ..SacConfig::default()
        };
        let mut agent = SacAgent::new(cfg, &mut rng).unwrap();
        let ts: Vec<Transition> = (0..4)
            .map(|i| {
                let mut obs = Observation::default();
                for v in obs.0.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
                let mut action = Action::ZERO;
                for v in action.0.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
                Transition { obs, action, reward: 0.2 * i as f64 - 0.3, next_obs: obs, done: false }
            })
            .collect();
        let batch = Batch::from_transitions(&ts);
        for _ in 0..2000 {
            agent.update_batch(&batch, &mut rng).unwrap();
        }
        for t in &ts {
            for q in agent.q_values(&t.obs, &t.action).unwrap() {
                assert!((q - t.reward).abs() < 1e-2, "{q} vs {}", t.reward);
            }
        }
    }
}
